import json
import math
import subprocess
import sys

import numpy as np
import pytest

from soundfield.cli import main as cli_main
from soundfield.harness import (
    ConfigError,
    ScenarioConfig,
    ball_grid,
    dump_field,
    nmse,
    plane_grid,
    run_sweep,
    sweep_csv,
)


def _base_config(**over):
    cfg = {
        "estimator": "DM-infinite",
        "frequencies": [200.0],
        "array": {"type": "spherical", "t": 5, "radius": 0.5, "kind": "omni"},
        "field": {"type": "plane_wave", "direction": [1, 0, 0]},
        "trials": 2,
        "seed": 7,
        "eval_grid": {"radius": 0.5, "spacing": 0.25},
    }
    cfg.update(over)
    return cfg


# ---------------------------------------------------------------------------
# NMSE
# ---------------------------------------------------------------------------

def test_nmse_perfect_estimate_floors():
    truth = np.array([1 + 1j, 2.0, -3j])
    assert nmse(truth, truth) == -300.0


def test_nmse_simple_value():
    truth = np.array([1.0 + 0j, 1.0])
    est = np.array([1.1 + 0j, 1.0])
    assert nmse(est, truth) == pytest.approx(10 * math.log10(0.01 / 2))


def test_nmse_zero_truth_raises():
    with pytest.raises(ValueError):
        nmse(np.array([1.0 + 0j]), np.zeros(1, dtype=complex))


def test_nmse_scale_invariant(rng):
    truth = rng.normal(size=50) + 1j * rng.normal(size=50)
    est = truth + 0.1 * (rng.normal(size=50) + 1j * rng.normal(size=50))
    assert nmse(3.7 * est, 3.7 * truth) == pytest.approx(nmse(est, truth))


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

def test_ball_grid_default_size():
    # 0.1 m spacing inside the unit ball
    assert len(ball_grid(1.0, 0.1)) == 4169


def test_ball_grid_within_radius():
    pts = ball_grid(0.7, 0.2)
    assert np.all(np.linalg.norm(pts, axis=1) <= 0.7 + 1e-12)


def test_plane_grid_size_and_plane():
    pts = plane_grid("xz", extent=2.0, spacing=0.5, offset=0.3)
    n = math.ceil(2.0 / 0.5) + 1
    assert len(pts) == n * n
    assert np.allclose(pts[:, 1], 0.3)


# ---------------------------------------------------------------------------
# Config validation
# ---------------------------------------------------------------------------

def test_config_missing_estimator():
    cfg = _base_config()
    del cfg["estimator"]
    with pytest.raises(ConfigError, match="estimator"):
        ScenarioConfig.from_dict(cfg)


def test_config_bad_estimator():
    with pytest.raises(ConfigError, match="estimator"):
        ScenarioConfig.from_dict(_base_config(estimator="nope"))


def test_config_empty_frequencies():
    with pytest.raises(ConfigError, match="frequencies"):
        ScenarioConfig.from_dict(_base_config(frequencies=[]))


def test_config_negative_frequency():
    with pytest.raises(ConfigError, match=r"frequencies\[1\]"):
        ScenarioConfig.from_dict(_base_config(frequencies=[100.0, -5.0]))


def test_config_bad_field_type():
    with pytest.raises(ConfigError, match="field.type"):
        ScenarioConfig.from_dict(_base_config(field={"type": "wibble"}))


def test_config_point_source_needs_position():
    with pytest.raises(ConfigError, match="field.position"):
        ScenarioConfig.from_dict(_base_config(field={"type": "point_source"}))


def test_config_invalid_json_text():
    with pytest.raises(ConfigError, match="JSON"):
        ScenarioConfig.from_json("{not json")


def test_config_defaults():
    cfg = ScenarioConfig.from_dict(_base_config())
    assert cfg.c == 340.65
    assert cfg.snr_db == 30.0
    assert cfg.trials == 2
    assert cfg.reg == 1e-3
    assert cfg.order == 7 and cfg.order_n0 == 7


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def test_run_sweep_records_sorted_and_seeded():
    cfg = ScenarioConfig.from_dict(
        _base_config(frequencies=[300.0, 100.0], trials=3)
    )
    records = run_sweep(cfg)
    assert len(records) == 6
    keys = [(r.frequency, r.trial) for r in records]
    assert keys == sorted(keys)
    for r in records:
        assert r.seed == cfg.seed + r.trial
        assert r.nmse_db <= 0.0
    # per-frequency mean is consistent
    for f in (100.0, 300.0):
        group = [r for r in records if r.frequency == f]
        assert group[0].nmse_mean_db == pytest.approx(
            np.mean([r.nmse_db for r in group])
        )


def test_sweep_deterministic_csv():
    cfg_dict = _base_config()
    a = sweep_csv(run_sweep(ScenarioConfig.from_dict(cfg_dict)))
    b = sweep_csv(run_sweep(ScenarioConfig.from_dict(json.loads(json.dumps(cfg_dict)))))
    assert a == b


def test_sweep_high_snr_beats_low_snr():
    # Accuracy at 120 dB SNR must be far better than at 0 dB SNR
    hi = run_sweep(
        ScenarioConfig.from_dict(_base_config(snr_db=120.0, frequencies=[50.0], trials=1))
    )[0]
    lo = run_sweep(
        ScenarioConfig.from_dict(_base_config(snr_db=0.0, frequencies=[50.0], trials=1))
    )[0]
    assert hi.nmse_db < -40.0
    assert hi.nmse_db < lo.nmse_db - 20.0


# ---------------------------------------------------------------------------
# Field dumps
# ---------------------------------------------------------------------------

def test_dump_field_columns_and_norm_err():
    cfg = ScenarioConfig.from_dict(_base_config())
    text = dump_field(cfg, 200.0, plane="xy", extent=1.0, spacing=0.5)
    lines = text.strip().split("\n")
    assert lines[0] == "x,y,z,re_true,im_true,re_est,im_est,norm_err"
    rows = [ln.split(",") for ln in lines[1:]]
    assert len(rows) == 9
    truth = np.array([float(r[3]) + 1j * float(r[4]) for r in rows])
    est = np.array([float(r[5]) + 1j * float(r[6]) for r in rows])
    mean_pow = np.mean(np.abs(truth) ** 2)
    for i, r in enumerate(rows):
        assert float(r[7]) == pytest.approx(
            abs(est[i] - truth[i]) ** 2 / mean_pow, rel=1e-12
        )


def test_dump_field_truth_only_empty_est_columns():
    cfg = ScenarioConfig.from_dict(_base_config())
    text = dump_field(cfg, 200.0, include_estimate=False, extent=1.0, spacing=0.5)
    for ln in text.strip().split("\n")[1:]:
        parts = ln.split(",")
        assert parts[5] == "" and parts[6] == "" and parts[7] == ""


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_sweep_and_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(_base_config()))
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert cli_main(["sweep", str(cfg), "-o", str(out1)]) == 0
    assert cli_main(["sweep", str(cfg), "-o", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    header = out1.read_text().splitlines()[0]
    assert header.startswith("frequency_hz,estimator,trial,seed,nmse_db")


def test_cli_invalid_config_exit_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(_base_config(estimator="bogus")))
    assert cli_main(["sweep", str(cfg)]) == 2


def test_cli_missing_file_exit_2(tmp_path):
    assert cli_main(["sweep", str(tmp_path / "none.json")]) == 2


def test_cli_field_subcommand(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(_base_config()))
    out = tmp_path / "field.csv"
    rc = cli_main(
        ["field", str(cfg), "--freq", "200", "--plane", "xy",
         "--extent", "1.0", "--spacing", "0.5", "-o", str(out)]
    )
    assert rc == 0
    assert out.read_text().startswith("x,y,z,re_true,im_true")


def test_cli_forbidden_subcommand(capsys):
    rc = cli_main(
        ["forbidden", "--radius", "1", "--c", "340.65", "--numax", "7",
         "--fmax", "350"]
    )
    assert rc == 0
    out = capsys.readouterr().out.strip().split("\n")
    assert out[0] == "frequency_hz,degree"
    freqs = [float(ln.split(",")[0]) for ln in out[1:]]
    assert freqs == sorted(freqs)
    assert len(freqs) == 4


def test_cli_forbidden_bad_args_exit_2():
    assert (
        cli_main(["forbidden", "--radius", "-1", "--numax", "3", "--fmax", "100"])
        == 2
    )


def test_cli_entry_point_subprocess(tmp_path):
    # the installed console script exists and validates configs
    cfg = tmp_path / "bad.json"
    cfg.write_text("{}")
    proc = subprocess.run(
        [sys.executable, "-m", "soundfield.cli", "sweep", str(cfg)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "config error" in proc.stderr
