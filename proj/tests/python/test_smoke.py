"""Smoke tests for the Python bindings.

The build exports the extension location via PMN_CORE_DIR (directory holding
the compiled module) and PMN_PKG_DIR (the pure-python package root), so the
tests run straight from the build tree without installing the wheel.
"""

import json
import os
import sys

import pytest

core_dir = os.environ.get("PMN_CORE_DIR")
pkg_dir = os.environ.get("PMN_PKG_DIR")
if pkg_dir:
    sys.path.insert(0, pkg_dir)
if core_dir:
    sys.path.insert(0, core_dir)

try:
    import _core as core
except ImportError:  # installed-wheel layout
    from pmnkit import _core as core


def test_steering_is_unit_modulus():
    v = core.steering(core.UlaConfig(4), 0.5)
    assert len(v) == 4
    assert all(abs(abs(x) - 1.0) < 1e-12 for x in v)
    assert v[0] == pytest.approx(1.0 + 0.0j)


def test_grid_quantities():
    grid = core.OfdmGrid()
    assert grid.block_period_s() == pytest.approx(6.4e-6)
    assert grid.delay_resolution_s() == pytest.approx(1e-8)


def test_pathloss_anchor():
    assert core.pathloss(1.0, 2.0) == pytest.approx(1.0)
    assert core.pathloss(10.0, 2.0) == pytest.approx(0.01)


def test_thermal_noise_floor():
    grid = core.OfdmGrid()
    assert core.watts_to_dbm(core.thermal_noise_power(grid)) == pytest.approx(
        -94.0, abs=0.1
    )


def test_clutter_recursion_and_closed_form():
    rho = core.rho_closed_form(0.99, 0.0, 1.7e-3, 100)
    assert rho.real == pytest.approx(1.0 - 0.99**100)
    assert rho.imag == pytest.approx(0.0)
    assert core.residual_noise_var(1.0, 0.99, 10**6) == pytest.approx(
        0.005, rel=0.01
    )


def test_freq_channel_single_path():
    p = core.PathParams()
    p.amp = 1.0 + 0.0j
    grid = core.OfdmGrid()
    h = core.freq_channel([p], 0, 0.0, grid, 2, 1)
    assert h[0][0] == pytest.approx(1.0 + 0.0j)


def test_scene_sampling_is_deterministic():
    a = core.sample_scene_json("{}", 7)
    b = core.sample_scene_json("{}", 7)
    c = core.sample_scene_json("{}", 8)
    assert a == b
    assert a != c
    parsed = json.loads(a)
    assert parsed["links"]


def test_end_to_end_experiment(tmp_path):
    config = {
        "scheme": "indirect",
        "seed": 3,
        "runs": 1,
        "grid": {"n_subcarriers": 64},
        "array": {"k_sources": 1, "m_rx": 4, "m_tx": 1},
        "eta_db": 25.0,
        "scene": {
            "clusters": [
                {
                    "path_count": [2, 2],
                    "direction_span_deg": [-40.0, 40.0],
                    "distance_span_m": [30.0, 60.0],
                    "doppler_span_hz": [-100.0, 100.0],
                    "source": 0,
                }
            ]
        },
        "out": str(tmp_path / "run"),
    }
    summary = core.run_experiment_json(json.dumps(config))
    assert summary["runs"] == 1
    assert summary["truth_count"] >= 2
    assert 0.0 <= summary["detection_rate"] <= 1.0
    results = tmp_path / "run" / "results.csv"
    header = results.read_text().splitlines()[0]
    assert header == (
        "run_id,kind,path_id,source,delay_s,aoa_rad,aod_rad,doppler_hz,"
        "power_db,matched,match_id"
    )
