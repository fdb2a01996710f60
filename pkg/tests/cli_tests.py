import csv
import json
from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from sparsity_roofline.core.roofline import layer_sol
from sparsity_roofline.crud.hardware_crud import load_profile
from sparsity_roofline.crud.network_crud import bundled_model_path, load_model_spec
from sparsity_roofline.main import app
from sparsity_roofline.models.sparsity_model import DTypeWidths, SparsityConfig
from sparsity_roofline.utils.constants import DATA_DIR, DEFAULT_PROFILE, ExitCode, Messages
from sparsity_roofline.utils.exceptions import CostOverflowError

runner = CliRunner()

accuracy_csv = DATA_DIR / "accuracy" / "synthetic_accuracy.csv"
sweep = ["0.5", "0.75", "0.875", "0.9375", "0.96875"]
block_vit_mlp = SparsityConfig.block(32, 32, 0.1736)
unstructured_vit_mlp = SparsityConfig.unstructured(0.478658)


def read_rows(path):
    with open(path, newline="") as file:
        return list(csv.DictReader(file))


def write_file(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def vit_mlp_sol_ms(config):
    vit_mlp = load_model_spec(bundled_model_path("vit_mlp_fc"))
    return layer_sol(vit_mlp, "fc", config, load_profile(DEFAULT_PROFILE), DTypeWidths()).sol.latency_s * 1e3


def validate(tmp_path, measurements, *extra):
    path = write_file(tmp_path / "measurements.csv", "scope,pattern,level,latency_ms\n" + "\n".join(measurements) + "\n")
    return runner.invoke(app, [
        "validate", "--measurements", str(path), "--model", "vit_mlp_fc", "--out", str(tmp_path / "out"), *extra,
    ])


def test_sol_writes_tables_and_charts(tmp_path):
    result = runner.invoke(app, [
        "sol", "--model", "vit_mlp_fc", "--sparsity", "unstructured:0.875", "--sparsity", "nm:2:4",
        "--batch", "1", "--out", str(tmp_path), "--format", "csv,json,svg",
    ])

    assert result.exit_code == ExitCode.OK, result.output
    assert "Speedup at speed-of-light" in result.output
    speedups = read_rows(tmp_path / "speedups.csv")
    assert [row["config"] for row in speedups] == ["unstructured:0.875", "nm:2:4"]
    assert [row["layer_config"] for row in read_rows(tmp_path / "sol_layers.csv")] == [
        "dense", "unstructured:0.875", "nm:2:4",
    ]
    assert (tmp_path / "speedups.json").exists()
    assert "<polyline class=\"roof\"" in (tmp_path / "roofline_vit_mlp_fc_b1.svg").read_text()


def test_sol_json_only_still_writes_the_layer_table(tmp_path):
    result = runner.invoke(app, [
        "sol", "--model", "vit_mlp_fc", "--sparsity", "unstructured:0.875", "--format", "json", "--out", str(tmp_path),
    ])

    assert result.exit_code == ExitCode.OK, result.output
    assert sorted(path.name for path in tmp_path.iterdir()) == ["sol_layers.json", "speedups.json"]
    layers = json.loads((tmp_path / "sol_layers.json").read_text())
    assert [row["layer_config"] for row in layers] == ["dense", "unstructured:0.875"]
    assert layers[1]["engine"] == "scalar"
    assert layers[0]["flops"] == 2 * 3072 * 768 * 6272


def test_sol_svg_only_keeps_csv_tables(tmp_path):
    result = runner.invoke(app, [
        "sol", "--model", "vit_mlp_fc", "--sparsity", "nm:2:4", "--batch", "1",
        "--format", "svg", "--out", str(tmp_path),
    ])

    assert result.exit_code == ExitCode.OK, result.output
    assert sorted(path.name for path in tmp_path.iterdir()) == [
        "roofline_vit_mlp_fc_b1.svg", "sol_layers.csv", "speedups.csv",
    ]


def test_sol_block_sizes_never_slow_down(tmp_path):
    sizes = [2, 4, 8, 16, 32]
    args = ["sol", "--model", "vit_mlp_fc", "--batch", "32", "--out", str(tmp_path)]
    for size in sizes:
        args += ["--sparsity", f"block:{size}x{size}:0.875"]

    assert runner.invoke(app, args).exit_code == ExitCode.OK
    speedups = [float(row["speedup"]) for row in read_rows(tmp_path / "speedups.csv")]
    assert all(b >= a for a, b in zip(speedups, speedups[1:]))


def test_sol_nofm_ordering(tmp_path):
    args = ["sol", "--model", "vit_mlp_fc", "--batch", "32", "--out", str(tmp_path)]
    for config in ("nm:2:4", "nm:1:4", "nm:2:8", "nm:2:16"):
        args += ["--sparsity", config]

    assert runner.invoke(app, args).exit_code == ExitCode.OK
    speedups = {row["config"]: float(row["speedup"]) for row in read_rows(tmp_path / "speedups.csv")}
    assert max(speedups, key=speedups.get) == "nm:2:16"


def test_sol_from_a_scenario_file(tmp_path):
    result = runner.invoke(app, [
        "sol", "--config", str(DATA_DIR / "scenarios" / "block_size_sweep.yaml"),
        "--batch", "1", "--format", "csv", "--out", str(tmp_path),
    ])

    assert result.exit_code == ExitCode.OK
    assert len(read_rows(tmp_path / "speedups.csv")) == 6
    assert not (tmp_path / "speedups.json").exists()


def test_incompatible_layer_without_fallback_is_a_config_error(tmp_path):
    result = runner.invoke(app, [
        "sol", "--model", "resnet50", "--sparsity", "block:32x32:0.5", "--batch", "1", "--out", str(tmp_path),
    ])

    assert result.exit_code == ExitCode.CONFIG_ERROR


@pytest.mark.parametrize("args", [
    ["--sparsity", "diagonal:0.5"],
    ["--sparsity", "dense", "--hw", "missing_profile.toml"],
    ["--sparsity", "dense", "--engine-map", "dense=gpu"],
    ["--sparsity", "dense", "--on-incompatible", "skip"],
])
def test_sol_config_errors(tmp_path, args):
    result = runner.invoke(app, ["sol", "--model", "vit_mlp_fc", "--out", str(tmp_path), *args])

    assert result.exit_code == ExitCode.CONFIG_ERROR


def test_sol_rejects_invalid_widths_in_the_run_config(tmp_path):
    config = write_file(tmp_path / "run.yaml", "models: [vit_mlp_fc]\nconfigs: [dense]\nwidths: {value_bytes: 0}\n")
    result = runner.invoke(app, ["sol", "--config", str(config), "--out", str(tmp_path / "out")])

    assert result.exit_code == ExitCode.CONFIG_ERROR
    assert not (tmp_path / "out").exists()


def test_sol_data_error_exit_code(tmp_path):
    with patch("sparsity_roofline.commands.sol_command.evaluate_grid", side_effect=CostOverflowError("too big")):
        result = runner.invoke(app, ["sol", "--model", "vit_mlp_fc", "--sparsity", "dense", "--out", str(tmp_path)])

    assert result.exit_code == ExitCode.DATA_ERROR


def test_sparsity_roofline_outputs_are_byte_identical_across_runs(tmp_path):
    args = ["sparsity-roofline", "--accuracy", str(accuracy_csv), "--model", "convnext_tiny", "--batch", "1",
            "--format", "csv", "--format", "json", "--format", "svg"]
    for level in sweep:
        args += ["--sparsity", f"unstructured:{level}", "--sparsity", f"block:4x4:{level}"]

    first = runner.invoke(app, [*args, "--out", str(tmp_path / "first")])
    second = runner.invoke(app, [*args, "--out", str(tmp_path / "second")])

    assert first.exit_code == second.exit_code == ExitCode.OK
    for name in ("series_b1.csv", "series_b1.json", "series_b1.svg"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()
    rows = read_rows(tmp_path / "first" / "series_b1.csv")
    assert {row["pattern"] for row in rows} == {"unstructured", "block:4x4"}
    assert len(rows) == 10
    assert (tmp_path / "first" / "series_b1.svg").read_text().count("<polyline") == 2
    assert not (tmp_path / "first" / "unjoined_b1.csv").exists()


def test_sparsity_roofline_reports_unjoined_speedups(tmp_path):
    result = runner.invoke(app, [
        "sparsity-roofline", "--accuracy", str(accuracy_csv), "--model", "convnext_tiny", "--batch", "1",
        "--sparsity", "unstructured:0.875", "--sparsity", "unstructured:0.6", "--out", str(tmp_path),
    ])

    assert result.exit_code == ExitCode.OK
    assert [row["config"] for row in read_rows(tmp_path / "unjoined_b1.csv")] == ["unstructured:0.6"]


def test_sparsity_roofline_with_empty_accuracy(tmp_path):
    accuracy = write_file(tmp_path / "accuracy.csv", "model,pattern,level,top1\n")
    result = runner.invoke(app, [
        "sparsity-roofline", "--accuracy", str(accuracy), "--model", "convnext_tiny",
        "--sparsity", "unstructured:0.875", "--out", str(tmp_path / "out"),
    ])

    assert result.exit_code == ExitCode.DATA_ERROR


def test_validate_vit_mlp_measurements(tmp_path):
    result = validate(tmp_path, ["fc,block:32x32,0.1736,0.613", "fc,unstructured,0.478658,3.526"])

    assert result.exit_code == ExitCode.OK, result.output
    rows = read_rows(tmp_path / "out" / "validation.csv")
    assert float(rows[0]["achieved_flops_s"]) == pytest.approx(39.9e12, rel=0.02)
    assert float(rows[1]["achieved_flops_s"]) == pytest.approx(4.4e12, rel=0.02)
    assert all(row["under_roof"] == "true" and row["verdict"] == "" for row in rows)


def test_validate_measurement_at_speed_of_light(tmp_path):
    result = validate(tmp_path, [f"fc,dense,,{vit_mlp_sol_ms(SparsityConfig.dense())!r}"])

    assert result.exit_code == ExitCode.OK
    assert float(read_rows(tmp_path / "out" / "validation.csv")[0]["percent_of_sol"]) == pytest.approx(1.0)


def test_validate_equal_percent_of_sol_means_equal_speedups(tmp_path):
    dense_ms = vit_mlp_sol_ms(SparsityConfig.dense()) * 2
    sparse_ms = vit_mlp_sol_ms(block_vit_mlp) * 2
    result = validate(tmp_path, [f"fc,dense,,{dense_ms!r}", f"fc,block:32x32,0.1736,{sparse_ms!r}"])

    assert result.exit_code == ExitCode.OK
    sparse_row = read_rows(tmp_path / "out" / "validation.csv")[1]
    assert sparse_row["verdict"] == Messages.SPEEDUP_MATCH
    assert float(sparse_row["predicted_speedup"]) == pytest.approx(float(sparse_row["measured_speedup"]))
    assert float(sparse_row["percent_gap"]) == pytest.approx(0.0, abs=1e-6)


def test_validate_unequal_percent_of_sol(tmp_path):
    dense_ms = vit_mlp_sol_ms(SparsityConfig.dense()) * 1.25
    sparse_ms = vit_mlp_sol_ms(block_vit_mlp) * 4
    result = validate(tmp_path, [f"fc,dense,,{dense_ms!r}", f"fc,block:32x32,0.1736,{sparse_ms!r}"])

    assert result.exit_code == ExitCode.OK
    sparse_row = read_rows(tmp_path / "out" / "validation.csv")[1]
    assert sparse_row["verdict"] == Messages.SPEEDUP_MISMATCH
    assert float(sparse_row["percent_gap"]) == pytest.approx(0.25 - 0.8)


def test_validate_faster_than_light_exits_after_writing(tmp_path):
    result = validate(tmp_path, ["fc,dense,,0.000001", "model,dense,,100"], "--format", "csv,svg")

    assert result.exit_code == ExitCode.PHYSICAL_INCONSISTENCY
    rows = read_rows(tmp_path / "out" / "validation.csv")
    assert "faster than speed-of-light" in rows[0]["verdict"]
    assert rows[1]["verdict"] == ""
    assert (tmp_path / "out" / "roofline_validation.svg").exists()


def test_validate_needs_one_model_and_batch(tmp_path):
    result = validate(tmp_path, ["fc,dense,,1"], "--batch", "1", "--batch", "32")

    assert result.exit_code == ExitCode.CONFIG_ERROR


def test_validate_unknown_layer(tmp_path):
    result = validate(tmp_path, ["proj,dense,,1"])

    assert result.exit_code == ExitCode.CONFIG_ERROR


def test_profile_matrices_identity(tmp_path):
    write_file(tmp_path / "mats" / "identity.mtx", "\n".join(
        ["%%MatrixMarket matrix coordinate pattern general", "4 4 4"] + [f"{i} {i}" for i in range(1, 5)]
    ) + "\n")
    result = runner.invoke(app, ["profile-matrices", str(tmp_path / "mats"), "--block", "2x2", "--out", str(tmp_path)])

    assert result.exit_code == ExitCode.OK
    [row] = read_rows(tmp_path / "matrix_stats.csv")
    assert (row["name"], row["nnz"], row["level"], row["nonzero_blocks"], row["fill_ratio"]) == (
        "identity.mtx", "4", "0.75", "2", "0.5",
    )


def test_profile_matrices_empty_directory(tmp_path):
    (tmp_path / "mats").mkdir()
    result = runner.invoke(app, ["profile-matrices", str(tmp_path / "mats"), "--out", str(tmp_path)])

    assert result.exit_code == ExitCode.DATA_ERROR


def test_profile_matrices_keeps_readable_files(tmp_path):
    write_file(tmp_path / "mats" / "good.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 3.0\n")
    write_file(tmp_path / "mats" / "sub" / "bad.mtx", "not a matrix\n")
    result = runner.invoke(app, ["profile-matrices", str(tmp_path / "mats"), "--out", str(tmp_path)])

    assert result.exit_code == ExitCode.DATA_ERROR
    rows = read_rows(tmp_path / "matrix_stats.csv")
    assert {row["name"] for row in rows} == {"good.mtx"}
    assert [row["b_h"] for row in rows] == ["2"]


def test_profile_matrices_bad_block_size(tmp_path):
    result = runner.invoke(app, ["profile-matrices", str(tmp_path), "--block", "2by2"])

    assert result.exit_code == ExitCode.CONFIG_ERROR


def test_sweep_levels():
    result = runner.invoke(app, ["sweep-levels", "--start", "0.5", "--steps", "5"])

    assert result.exit_code == ExitCode.OK
    assert result.output.split() == sweep


def test_sweep_levels_with_pattern():
    result = runner.invoke(app, ["--verbose", "sweep-levels", "--steps", "2", "--pattern", "block:4x4"])

    assert result.exit_code == ExitCode.OK
    assert result.output.split() == ["block:4x4:0.5", "block:4x4:0.75"]


def test_sweep_levels_rejects_start(tmp_path):
    assert runner.invoke(app, ["sweep-levels", "--start", "1.0"]).exit_code == ExitCode.CONFIG_ERROR


def test_traffic_feature_share_grows_with_batch(tmp_path):
    result = runner.invoke(app, [
        "traffic", "--model", "convnext_tiny", "--sparsity", "unstructured:0.875", "--out", str(tmp_path),
    ])

    assert result.exit_code == ExitCode.OK
    totals = {row["batch"]: float(row["feature_share"]) for row in read_rows(tmp_path / "traffic.csv") if row["layer_id"] == "model"}
    assert set(totals) == {"1", "32"}
    assert totals["32"] > totals["1"]
