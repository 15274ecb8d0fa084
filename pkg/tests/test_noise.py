import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subsql.model import CONSTANTS, InvalidArgument
from subsql.noise import (
    FrequencyGrid,
    NoiseSpectrum,
    ThermalParams,
    sql_asd,
    thermal_asd_mode,
    total_thermal_asd,
    viscous_asd_mode,
)

KB = CONSTANTS.k_B


def peak(T, q, m, wm):
    return math.sqrt(4 * KB * T * q / (m * wm**3))


def fitted_slope(spec, f_lo, f_hi):
    f = spec.frequencies
    sel = (f >= f_lo) & (f <= f_hi)
    return np.polyfit(np.log10(f[sel]), np.log10(spec.asd[sel]), 1)[0]


def test_grid_layout():
    g = FrequencyGrid()
    f = g.frequencies
    assert len(f) == 6 * 200 + 1
    assert f[0] == pytest.approx(10.0, rel=1e-15) and f[-1] == pytest.approx(1e7, rel=1e-15)
    assert np.all(np.diff(f) > 0)
    assert np.allclose(np.diff(np.log10(f)), 1 / 200)
    with pytest.raises(ValueError):
        f[0] = 1.0


@pytest.mark.parametrize("args", [(0, 10, 10), (10, 10, 10), (10, 100, 0), (-1, 10, 5)])
def test_grid_rejects_bad_ranges(args):
    with pytest.raises(InvalidArgument):
        FrequencyGrid(*args)


def test_spectrum_shape_checked():
    with pytest.raises(InvalidArgument):
        NoiseSpectrum(FrequencyGrid(1, 10, 10), np.ones(3))


def test_structural_peak_value():
    g = FrequencyGrid(1e3, 1e6, 200)
    wm = 2 * math.pi * 1e3
    x = thermal_asd_mode(g, wm, 5e-11, 1e4, 10.0).asd[0]
    assert x == pytest.approx(6.67e-10, rel=2e-3)
    assert x == pytest.approx(peak(10.0, 1e4, 5e-11, wm), rel=1e-12)


@given(st.floats(1.0, 1e6), st.floats(1e-15, 1e-6), st.floats(1.0, 1e7), st.floats(1e-3, 1e4))
def test_peak_identity_both_models(f_m, m, q, T):
    g = FrequencyGrid(f_m, 10 * f_m, 10)
    wm = 2 * math.pi * f_m
    expected = peak(T, q, m, wm)
    assert thermal_asd_mode(g, wm, m, q, T).asd[0] == pytest.approx(expected, rel=1e-9)
    assert viscous_asd_mode(g, wm, m, q, T).asd[0] == pytest.approx(expected, rel=1e-9)


def test_high_frequency_slopes():
    g = FrequencyGrid(10, 1e7, 200)
    wm = 2 * math.pi * 1e3
    assert fitted_slope(thermal_asd_mode(g, wm, 5e-11, 1e4, 10), 1e4, 1e5) == pytest.approx(-2.5, abs=0.01)
    assert fitted_slope(viscous_asd_mode(g, wm, 5e-11, 1e4, 10), 1e4, 1e5) == pytest.approx(-2.0, abs=0.01)


def test_low_frequency_structural_slope():
    g = FrequencyGrid(1e-2, 1e4, 200)
    s = thermal_asd_mode(g, 2 * math.pi * 1e3, 5e-11, 1e4, 10)
    assert fitted_slope(s, 1e-2, 1e-1) == pytest.approx(-0.5, abs=1e-3)


@given(st.floats(1e-3, 1e4))
def test_temperature_scaling(T):
    g = FrequencyGrid(10, 1e5, 20)
    wm = 2 * math.pi * 700
    for fn in (thermal_asd_mode, viscous_asd_mode):
        a, b = fn(g, wm, 3e-11, 5e3, T).asd, fn(g, wm, 3e-11, 5e3, 2 * T).asd
        assert np.allclose(b / a, math.sqrt(2), rtol=1e-13, atol=0)


@pytest.mark.parametrize("bad", [(0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0), (1, -1, 1, 1)])
def test_non_positive_parameters(bad):
    g = FrequencyGrid(1, 10, 5)
    with pytest.raises(InvalidArgument):
        thermal_asd_mode(g, *bad)
    with pytest.raises(InvalidArgument):
        viscous_asd_mode(g, *bad)
    with pytest.raises(InvalidArgument):
        ThermalParams(bad[3], bad[2] - 1)


def test_quadrature_sum():
    g = FrequencyGrid(10, 1e7, 50)
    parts = [thermal_asd_mode(g, 2 * math.pi * f, m, 1e4, 10) for f, m in ((200, 5e-11), (3e3, 2e-9), (1e5, 3e-8))]
    total = total_thermal_asd(parts)
    lhs = total.asd**2
    rhs = sum(p.asd**2 for p in parts)
    assert np.max(np.abs(lhs / rhs - 1)) < 1e-12
    assert np.all(total.asd >= np.max([p.asd for p in parts], axis=0))
    assert np.array_equal(total_thermal_asd(parts[:1]).asd, parts[0].asd)
    assert np.allclose(total_thermal_asd([parts[0], parts[0]]).asd, math.sqrt(2) * parts[0].asd, rtol=1e-15)


def test_quadrature_rejects_mixed_grids():
    a = thermal_asd_mode(FrequencyGrid(10, 1e3, 10), 1e3, 1e-11, 1e3, 1)
    b = thermal_asd_mode(FrequencyGrid(10, 1e3, 20), 1e3, 1e-11, 1e3, 1)
    with pytest.raises(InvalidArgument):
        total_thermal_asd([a, b])
    with pytest.raises(InvalidArgument):
        total_thermal_asd([])


def test_sql_value_and_slope():
    g = FrequencyGrid(1e5, 1e6, 10)
    assert sql_asd(5e-11, g).asd[0] == pytest.approx(1.634e-18, rel=5e-4)
    g = FrequencyGrid()
    s = sql_asd(5e-11, g)
    wx = g.omega * s.asd
    assert np.max(np.abs(wx / wx[0] - 1)) < 1e-12
    assert np.allclose(sql_asd(2e-10, g).asd, s.asd / 2, rtol=1e-14)
    with pytest.raises(InvalidArgument):
        sql_asd(0.0, g)


@given(st.floats(1.0, 1e6), st.floats(1e-15, 1e-6), st.floats(1.0, 1e7))
def test_spectra_positive_and_finite(f_m, m, q):
    g = FrequencyGrid(1.0, 1e7, 20)
    for fn in (thermal_asd_mode, viscous_asd_mode):
        asd = fn(g, 2 * math.pi * f_m, m, q, 10.0).asd
        assert np.all(np.isfinite(asd)) and np.all(asd > 0)
