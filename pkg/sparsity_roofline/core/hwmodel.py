"""
Roofline geometry of one device: per-engine peaks, knee and roof height.
"""
from typing import List, Tuple

from sparsity_roofline.models.hardware_model import EngineClass, HardwareProfile
from sparsity_roofline.utils.constants import Errors
from sparsity_roofline.utils.exceptions import DataError, MissingEnginePeakError


def peak(profile: HardwareProfile, engine: EngineClass) -> float:
    value = profile.peak_flops.get(engine)
    if value is None:
        raise MissingEnginePeakError(Errors.MISSING_ENGINE_PEAK.format(profile=profile.name, engine=engine.value))
    return value


def knee_ai(profile: HardwareProfile, engine: EngineClass) -> float:
    """AI (FLOP/byte) at which the roof stops being memory-bound."""
    return peak(profile, engine) / profile.peak_mem_bw


def roof_throughput(profile: HardwareProfile, engine: EngineClass, ai: float) -> float:
    if ai < 0:
        raise DataError(Errors.NEGATIVE_AI.format(ai=ai))

    engine_peak = peak(profile, engine)
    if ai >= knee_ai(profile, engine):
        return engine_peak
    return min(engine_peak, ai * profile.peak_mem_bw)


def roof_segments(
    profile: HardwareProfile, engine: EngineClass, ai_min: float, ai_max: float
) -> List[Tuple[float, float]]:
    """Vertices of the roof polyline over [ai_min, ai_max]; the knee is kept when inside the range."""
    knee = knee_ai(profile, engine)
    vertices = [ai_min]
    if ai_min < knee < ai_max:
        vertices.append(knee)
    vertices.append(ai_max)
    return [(ai, roof_throughput(profile, engine, ai)) for ai in vertices]
