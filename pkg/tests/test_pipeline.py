import math
from dataclasses import replace

import numpy as np
import pytest

from subsql.config import DEFAULT_SWEEPS, ConfigError, RunConfig, SweepSpec
from subsql.metrics import NoSubSqlRegion, SubSqlMetrics
from subsql.modal import Mode
from subsql.model import pad_mass
from subsql.pipeline import SweepError, mode_q, run_point, run_sweep


@pytest.fixture(scope="module")
def default_point():
    return run_point(RunConfig())


def test_default_point(default_point):
    res = default_point
    assert 100 <= res.modes[0].frequency <= 1000
    assert isinstance(res.metrics, SubSqlMetrics)
    assert res.metrics.r_max > 1
    assert res.sql_mass == pytest.approx(res.coupling.m_eff[0])
    # retained: coupled modes below the top of the grid, and nothing else
    f = np.array([m.frequency for m in res.modes])
    assert np.array_equal(res.retained, res.coupling.coupled & (f < 1e7))
    assert res.modes[-1].frequency > 1e7


def test_tn_is_quadrature_of_retained_modes(default_point):
    from subsql.noise import thermal_asd_mode

    res = default_point
    psd = np.zeros(len(res.tn.grid))
    for k in np.flatnonzero(res.retained):
        m = res.modes[k]
        psd += thermal_asd_mode(res.tn.grid, 2 * math.pi * m.frequency, res.coupling.m_eff[k], 1e4, 10.0).asd ** 2
    assert np.allclose(res.tn.asd, np.sqrt(psd), rtol=1e-12, atol=0)


def test_hot_resonator_has_no_sub_sql_region():
    res = run_point(replace(RunConfig(), temperature_k=1e6))
    assert isinstance(res.metrics, NoSubSqlRegion)


def test_sql_mass_options():
    cfg = replace(RunConfig(), sql_mass="pad")
    res = run_point(cfg)
    assert res.sql_mass == pytest.approx(pad_mass(cfg.stack(), cfg.radius_um))


def test_viscous_damping_changes_spectrum(default_point):
    visc = run_point(replace(RunConfig(), damping="viscous"))
    assert not np.allclose(visc.tn.asd, default_point.tn.asd, rtol=1e-3, atol=0)
    assert [m.frequency for m in visc.modes] == [m.frequency for m in default_point.modes]


def test_q_overrides():
    cfg = replace(RunConfig(), q_default=1e4, q_overrides={"pitch": 50.0, "mode3": 7.0})
    modes = [Mode(1, 1, 1, 0, "fundamental"), Mode(2, 2, 1, 0, "pitch"), Mode(3, 3, 1, 0, "higher")]
    assert [mode_q(cfg, m) for m in modes] == [1e4, 50.0, 7.0]
    base, low_q = run_point(RunConfig()), run_point(cfg)
    f = base.tn.frequencies
    near_pitch = np.abs(np.log10(f / base.modes[1].frequency)) < 1e-3
    assert np.all(low_q.tn.asd[near_pitch] < base.tn.asd[near_pitch])


def test_no_retained_modes_is_config_error():
    cfg = replace(RunConfig(), grid=replace(RunConfig().grid, f_min=1.0, f_max=50.0))
    with pytest.raises(ConfigError):
        run_point(cfg)


def test_identical_runs_identical_arrays(default_point):
    again = run_point(RunConfig())
    assert np.array_equal(again.tn.asd, default_point.tn.asd)
    assert again.metrics == default_point.metrics


def test_sweep_rows_in_input_order():
    spec = SweepSpec("width_um", DEFAULT_SWEEPS["width_um"])
    serial = run_sweep(spec, threads=1)
    parallel = run_sweep(spec, threads=4)
    assert serial == parallel
    assert [r.value for r in serial] == list(DEFAULT_SWEEPS["width_um"])
    f1 = [r.f1_hz for r in serial]
    assert all(b > a for a, b in zip(f1, f1[1:]))


def test_radius_and_support_pair_sweeps():
    rows = run_sweep(SweepSpec("radius_um", DEFAULT_SWEEPS["radius_um"]))
    f1 = [r.f1_hz for r in rows]
    assert all(b < a for a, b in zip(f1, f1[1:]))
    rows = run_sweep(SweepSpec("support_pair_nm", DEFAULT_SWEEPS["support_pair_nm"]))
    assert [r.value for r in rows] == pytest.approx([70.5, 82.1, 102.8])
    assert all(100 <= r.f1_hz <= 1000 for r in rows)


def test_sweep_failure_names_the_value():
    cfg = replace(RunConfig(), grid=replace(RunConfig().grid, f_min=1.0, f_max=300.0))
    spec = SweepSpec("length_um", (25.0, 100.0), cfg)
    with pytest.raises(SweepError) as info:
        run_sweep(spec)
    assert info.value.value == 25.0 and info.value.parameter == "length_um"


def test_no_sub_sql_rows_are_nan():
    spec = SweepSpec("length_um", (55.0,), replace(RunConfig(), temperature_k=1e6))
    (row,) = run_sweep(spec)
    assert math.isnan(row.f_l_hz) and row.dip_count == 0 and row.r_max < 1
