import numpy as np
import pytest

from ehbt import closed_form as cf
from ehbt.coulomb import dip_width, fringe_count
from ehbt.geometry import Geometry, screen_to_phase, x_for_phase
from ehbt.pattern import (
    ScreenGrid,
    compose_pattern,
    count_dip_maxima,
    dip_envelope,
    spatial_wavelength,
    spread_averaged_envelope,
)

GEOM_4B = Geometry(d=1.0e-8, D=1.0, k=1.0e11)   # two-tip case
GEOM_4A = Geometry(d=1.0e-11, D=1.0, k=1.0e11)  # quasi single-tip case
SFE = cf.SourceStatistics(0.9, 0.05, 0.0)


def aligned_grid(geom, periods=4, per_period=24):
    """Uniform grid whose points include x(delta = m*pi) for small m."""
    x_pi = x_for_phase(geom, np.pi)
    step = x_pi / per_period
    n = 2 * periods * per_period + 1
    return ScreenGrid(-periods * x_pi, periods * x_pi, n), step


def test_spatial_wavelength_value_and_scaling():
    lam = spatial_wavelength(GEOM_4B)
    assert lam == pytest.approx(0.006283185307179587, rel=1e-13)
    assert lam == pytest.approx(6.28e-3, rel=1e-3)
    half = spatial_wavelength(Geometry(d=2.0e-8, D=1.0, k=1.0e11))
    assert half == pytest.approx(lam / 2, rel=1e-13)


def test_spatial_wavelength_consistent_with_phase_map():
    lam = spatial_wavelength(GEOM_4B)
    step = screen_to_phase(GEOM_4B, lam) - screen_to_phase(GEOM_4B, 0.0)
    assert step == pytest.approx(2 * np.pi, rel=1e-3)


def test_dip_envelope_shape():
    z = 0.02
    assert dip_envelope(0.0, z, depth=1.0) == 0.0
    assert dip_envelope(z / 2, z, depth=1.0) == pytest.approx(0.5, rel=1e-12)
    assert dip_envelope(-z / 2, z, depth=1.0) == pytest.approx(0.5, rel=1e-12)
    assert dip_envelope(100 * z, z, depth=1.0) == pytest.approx(1.0, rel=1e-12)
    assert dip_envelope(0.0, z, depth=0.25) == pytest.approx(0.75, rel=1e-12)


def test_dip_envelope_validation():
    with pytest.raises(ValueError):
        dip_envelope(0.0, -1.0)
    with pytest.raises(ValueError):
        dip_envelope(0.0, 1.0, depth=1.5)


def test_screen_grid_validation():
    with pytest.raises(ValueError):
        ScreenGrid(1.0, -1.0, 100)
    with pytest.raises(ValueError):
        ScreenGrid(-1.0, 1.0, 1)


def test_compose_metadata_fig4b():
    grid = ScreenGrid(-0.05, 0.05, 1001)
    series = compose_pattern(GEOM_4B, SFE, cf.SpinMode.POLARIZED_EQUAL, grid)
    assert series.fringe_n == pytest.approx(4.37, rel=2e-3)
    assert series.z_dip == pytest.approx(dip_width(1e-8, 1e11, 1.0), rel=1e-14)
    assert series.lambda_sp == pytest.approx(spatial_wavelength(GEOM_4B), rel=1e-14)
    assert series.visibility == 1.0


def test_compose_pointwise_product_and_bound():
    grid = ScreenGrid(-0.05, 0.05, 801)
    series = compose_pattern(GEOM_4B, SFE, cf.SpinMode.POLARIZED_EQUAL, grid)
    np.testing.assert_array_equal(series.g2_total, series.g2_fermi * series.envelope)
    assert np.all(series.g2_total <= series.g2_fermi + 1e-15)
    assert np.all(series.envelope >= 0.0) and np.all(series.envelope <= 1.0)
    assert np.all(series.g2_total >= 0.0)


def test_compose_symmetric_under_reflection():
    grid = ScreenGrid(-0.04, 0.04, 801)  # symmetric, odd point count
    series = compose_pattern(GEOM_4B, SFE, cf.SpinMode.POLARIZED_EQUAL, grid)
    np.testing.assert_allclose(series.g2_total, series.g2_total[::-1], rtol=1e-12)


def test_compose_coulomb_off_matches_closed_form():
    grid, _ = aligned_grid(GEOM_4B)
    series = compose_pattern(GEOM_4B, SFE, cf.SpinMode.POLARIZED_EQUAL, grid,
                             coulomb_on=False)
    assert np.all(series.envelope == 1.0)
    env = cf.EnvelopeWeights.normalized_prefactor(SFE)
    ref = cf.g2_total(series.delta, SFE, env, cf.SpinMode.POLARIZED_EQUAL)
    np.testing.assert_array_equal(series.g2_total, ref)
    # on-axis antibunching zero
    assert series.g2_total[series.x == 0.0][0] == 0.0


@pytest.mark.parametrize("mode,stats", [
    (cf.SpinMode.POLARIZED_EQUAL, SFE),
    (cf.SpinMode.UNPOLARIZED, SFE),
    (cf.SpinMode.UNPOLARIZED, cf.poissonian_stats(0.2)),
])
def test_compose_contrast_reproduces_visibility(mode, stats):
    # grid points land exactly on the fringe extremes, so the sampled
    # contrast equals the analytic visibility
    grid, _ = aligned_grid(GEOM_4B)
    series = compose_pattern(GEOM_4B, stats, mode, grid, coulomb_on=False)
    hi, lo = series.g2_total.max(), series.g2_total.min()
    contrast = (hi - lo) / (hi + lo)
    assert contrast == pytest.approx(cf.visibility(stats, mode), abs=1e-9)


def test_fringe_count_inside_dip_fig4b():
    series = compose_pattern(GEOM_4B, SFE, cf.SpinMode.POLARIZED_EQUAL,
                             ScreenGrid(-0.05, 0.05, 4001))
    n_expected = int(np.floor(fringe_count(1.0e-8)))
    assert abs(count_dip_maxima(series) - n_expected) <= 1


def test_fringe_count_inside_dip_fig4a():
    series = compose_pattern(GEOM_4A, SFE, cf.SpinMode.POLARIZED_EQUAL,
                             ScreenGrid(-1.0, 1.0, 4001))
    assert count_dip_maxima(series) == 0
    assert series.fringe_n == pytest.approx(0.138, rel=3e-3)


def test_spread_averaged_envelope_properties():
    xs = np.linspace(-0.05, 0.05, 101)
    a = spread_averaged_envelope(xs, GEOM_4B, 0.005, 1.0, 256, seed=3)
    b = spread_averaged_envelope(xs, GEOM_4B, 0.005, 1.0, 256, seed=3)
    np.testing.assert_array_equal(a, b)
    assert np.all(a >= 0.0) and np.all(a <= 1.0)
    # tiny spread converges to the single-width envelope
    tight = spread_averaged_envelope(xs, GEOM_4B, 1e-9, 1.0, 256, seed=3)
    single = dip_envelope(xs, dip_width(GEOM_4B.d, GEOM_4B.k, GEOM_4B.D), 1.0)
    np.testing.assert_allclose(tight, single, atol=1e-8)
