"""
Joins speedups with accuracy into Sparsity Roofline series and lays out chart geometry
for the SVG templates.
"""
import math
from collections import defaultdict
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict

from sparsity_roofline.core.hwmodel import knee_ai, peak, roof_segments
from sparsity_roofline.models.hardware_model import EngineClass, HardwareProfile
from sparsity_roofline.models.report_model import AccuracyRecord, Series, SeriesPoint, SeriesSet
from sparsity_roofline.models.roofline_model import RooflinePoint, SpeedupRecord
from sparsity_roofline.models.sparsity_model import PatternKind
from sparsity_roofline.utils.constants import Errors
from sparsity_roofline.utils.exceptions import EmitError, EmptyJoinError
from sparsity_roofline.utils.formatting import fmt, level_key

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 20, 20, 50


def assemble_series(speedups: List[SpeedupRecord], accuracy: List[AccuracyRecord]) -> SeriesSet:
    """
    One series per (model, pattern) with points ordered by level. Speedups without an
    accuracy record go to `unjoined`; accuracy is never interpolated.
    """
    by_key = {record.key: record for record in accuracy}
    dense_top1 = {record.model: record.top1 for record in accuracy if record.pattern == PatternKind.DENSE.value}

    grouped: Dict[Tuple[str, str], List[SeriesPoint]] = defaultdict(list)
    unjoined = []
    for record in speedups:
        key = (record.model, record.config.pattern_label, level_key(record.config.level))
        match = by_key.get(key)
        if match is None:
            unjoined.append(record)
            continue
        grouped[key[:2]].append(SeriesPoint(
            level=record.config.level, speedup=record.speedup, top1=match.top1, label=record.config.encode(),
        ))

    if not grouped:
        raise EmptyJoinError(Errors.EMPTY_JOIN)

    series = [
        Series(model=model, pattern=pattern, points=sorted(points, key=lambda point: point.level),
               dense_top1=dense_top1.get(model))
        for (model, pattern), points in grouped.items()
    ]
    return SeriesSet(series=series, unjoined=unjoined)


class LinearScale(BaseModel):
    model_config = ConfigDict(frozen=True)

    domain: Tuple[float, float]
    range: Tuple[float, float]

    def __call__(self, value: float) -> float:
        (d0, d1), (r0, r1) = self.domain, self.range
        return r0 + (value - d0) / (d1 - d0) * (r1 - r0)

    def ticks(self, count: int = 5) -> List[float]:
        d0, d1 = self.domain
        return [d0 + (d1 - d0) * i / (count - 1) for i in range(count)]


class LogScale(LinearScale):
    def __call__(self, value: float) -> float:
        (d0, d1), (r0, r1) = self.domain, self.range
        return r0 + (math.log10(value) - math.log10(d0)) / (math.log10(d1) - math.log10(d0)) * (r1 - r0)

    def ticks(self, count: int = 0) -> List[float]:
        low, high = (round(math.log10(bound)) for bound in self.domain)
        return [10.0 ** exponent for exponent in range(low, high + 1)]


def _px(value: float) -> str:
    return f"{value:.2f}"


def _polyline(points: List[Tuple[float, float]], x: LinearScale, y: LinearScale) -> str:
    return " ".join(f"{_px(x(px))},{_px(y(py))}" for px, py in points)


def _frame(width: int, height: int) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    return (MARGIN_LEFT, width - MARGIN_RIGHT), (height - MARGIN_BOTTOM, MARGIN_TOP)


def sparsity_roofline_chart(series_set: SeriesSet, width: int, height: int, title: str = "") -> dict:
    """Accuracy (y) vs speedup at SoL (x), one polyline per series, 1.0 reference line."""
    points = [point for series in series_set.series for point in series.points]
    if not points:
        raise EmitError(Errors.EMPTY_SVG)

    tops = [point.top1 for point in points] + [s.dense_top1 for s in series_set.series if s.dense_top1 is not None]
    x_low = min(1.0, min(point.speedup for point in points))
    x_high = max(1.0, max(point.speedup for point in points))
    x_pad = (x_high - x_low) * 0.05 or 0.1
    y_pad = (max(tops) - min(tops)) * 0.1 or 0.05
    x_range, y_range = _frame(width, height)
    x = LinearScale(domain=(x_low, x_high + x_pad), range=x_range)
    y = LinearScale(domain=(max(0.0, min(tops) - y_pad), min(1.0, max(tops) + y_pad)), range=y_range)

    lines, baselines = [], []
    for index, series in enumerate(series_set.series):
        color = PALETTE[index % len(PALETTE)]
        lines.append({
            "label": f"{series.model} {series.pattern}",
            "color": color,
            "points": _polyline([(p.speedup, p.top1) for p in series.points], x, y),
            "markers": [{"x": _px(x(p.speedup)), "y": _px(y(p.top1)), "label": p.label} for p in series.points],
        })
        if series.dense_top1 is not None and series.model not in {b["model"] for b in baselines}:
            baselines.append({"model": series.model, "x": _px(x(1.0)), "y": _px(y(series.dense_top1))})

    return {
        "width": width,
        "height": height,
        "title": title,
        "x_label": "Speedup at SoL (x)",
        "y_label": "Top-1 accuracy",
        "plot": {"left": x_range[0], "right": x_range[1], "top": y_range[1], "bottom": y_range[0]},
        "reference_x": _px(x(1.0)),
        "x_ticks": [{"at": _px(x(t)), "label": fmt(round(t, 3))} for t in x.ticks()],
        "y_ticks": [{"at": _px(y(t)), "label": fmt(round(t, 3))} for t in y.ticks()],
        "lines": lines,
        "baselines": baselines,
    }


def roofline_scales(
    profile: HardwareProfile, engines: List[EngineClass], points: List[RooflinePoint], width: int, height: int
) -> Tuple[LogScale, LogScale]:
    knees = [knee_ai(profile, engine) for engine in engines]
    ais = [point.ai for point in points if point.ai > 0] + knees
    x_low = 10.0 ** math.floor(math.log10(min(ais) / 10))
    x_high = 10.0 ** math.ceil(math.log10(max(ais) * 10))
    peaks = [peak(profile, engine) for engine in engines]
    ys = [point.achieved_flops_s for point in points if point.achieved_flops_s > 0]
    ys += [min(p, x_low * profile.peak_mem_bw) for p in peaks]
    y_low = 10.0 ** math.floor(math.log10(min(ys)))
    y_high = 10.0 ** math.ceil(math.log10(max(peaks + ys)))
    x_range, y_range = _frame(width, height)
    return LogScale(domain=(x_low, x_high), range=x_range), LogScale(domain=(y_low, y_high), range=y_range)


def roofline_chart(
    profile: HardwareProfile,
    engines: List[EngineClass],
    points: List[RooflinePoint],
    width: int,
    height: int,
    title: str = "",
) -> dict:
    """Classic log-log Roofline: one roof polyline per engine plus measured or SoL points."""
    engines = sorted(set(engines), key=lambda engine: engine.value)
    if not engines:
        raise EmitError(Errors.EMPTY_SVG)
    x, y = roofline_scales(profile, engines, points, width, height)

    roofs = []
    for index, engine in enumerate(engines):
        roofs.append({
            "engine": engine.value,
            "knee": fmt(knee_ai(profile, engine)),
            "color": PALETTE[index % len(PALETTE)],
            "points": _polyline(roof_segments(profile, engine, *x.domain), x, y),
        })

    # Zero-AI points have no place on a log axis.
    placed = [point for point in points if point.ai > 0 and point.achieved_flops_s > 0]
    return {
        "width": width,
        "height": height,
        "title": title or profile.name,
        "x_label": "Arithmetic intensity (FLOP/byte)",
        "y_label": "Throughput (FLOP/s)",
        "plot": {"left": x.range[0], "right": x.range[1], "top": y.range[1], "bottom": y.range[0]},
        "x_ticks": [{"at": _px(x(t)), "label": f"{t:.0e}"} for t in x.ticks()],
        "y_ticks": [{"at": _px(y(t)), "label": f"{t:.0e}"} for t in y.ticks()],
        "roofs": roofs,
        "points": [{"x": _px(x(p.ai)), "y": _px(y(p.achieved_flops_s)), "label": p.label} for p in placed],
    }
