import numpy as np
import pytest

from ehbt import closed_form as cf

# Fig-2 convention: overall prefactor 4 p1^2 c1 c2 scaled to 2.
POISSON = cf.poissonian_stats(0.2)
ENV2 = cf.EnvelopeWeights.normalized_prefactor(POISSON)


def test_poisson_limits_and_frozen_values():
    zero = cf.poissonian_stats(0.0)
    assert (zero.p0, zero.p1, zero.p2) == (1.0, 0.0, 0.0)
    # analytic Poisson law at mu = 0.2, split per spin branch / spin pair
    assert POISSON.p0 == pytest.approx(0.8187307530779818, rel=1e-14)
    assert POISSON.p1 == pytest.approx(0.0818730753077982, rel=1e-14)
    assert POISSON.p2 == pytest.approx(0.0040936537653899095, rel=1e-14)


@pytest.mark.parametrize("mu", [1e-4, 0.05, 0.2, 0.7, 1.5, 3.0])
def test_poisson_offset_ratio_is_half(mu):
    assert cf.poissonian_stats(mu).offset_ratio == pytest.approx(0.5, abs=1e-14)


def test_statistics_validation():
    with pytest.raises(ValueError):
        cf.poissonian_stats(-0.1)
    with pytest.raises(ValueError):
        cf.SourceStatistics(0.5, -0.01, 0.0)
    with pytest.raises(ValueError):
        cf.SourceStatistics(0.9, 0.2, 0.1)  # budget p0 + 2p1 + 4p2 > 1


def test_equal_spin_fringe():
    assert cf.g2_equal_spin_p1sq(0.0, POISSON, ENV2) == 0.0
    assert cf.g2_equal_spin_p1sq(np.pi, POISSON, ENV2) == pytest.approx(4.0, rel=1e-12)
    assert cf.g2_equal_spin_p1sq(np.pi / 2, POISSON, ENV2) == pytest.approx(2.0, rel=1e-12)


def test_unequal_spin_offset():
    vals = cf.g2_unequal_spin_p1sq(np.array([0.0, 1.0, np.pi]), POISSON, ENV2)
    assert np.all(vals == vals[0])
    assert vals[0] == pytest.approx(2.0, rel=1e-12)
    none = cf.SourceStatistics(1.0, 0.0, 0.0)
    assert cf.g2_unequal_spin_p1sq(0.3, none, ENV2) == 0.0


def test_same_source_contributions():
    equal, unequal = cf.g2_same_source(0.7, POISSON, ENV2)
    assert equal == 0.0
    assert unequal == pytest.approx(4.0 * POISSON.p0 * POISSON.p2 * ENV2.product, rel=1e-14)
    # delta-independent
    e2, u2 = cf.g2_same_source(2.9, POISSON, ENV2)
    assert (e2, u2) == (equal, unequal)
    # no two-electron emissions, no contribution
    sfe = cf.SourceStatistics(0.9, 0.05, 0.0)
    assert cf.g2_same_source(1.0, sfe, ENV2) == (0.0, 0.0)
    # linear in p0*p2
    half = cf.SourceStatistics(POISSON.p0 / 2, POISSON.p1, POISSON.p2)
    assert cf.g2_same_source(0.0, half, ENV2)[1] == pytest.approx(unequal / 2, rel=1e-14)
    # orthogonal-envelope reference: equal-spin part strictly positive
    e3, u3 = cf.g2_same_source(0.0, POISSON, ENV2, equal_envelopes=False)
    assert e3 > 0 and e3 == pytest.approx(u3, rel=1e-14)


def test_total_poisson_values():
    assert cf.g2_total(0.0, POISSON, ENV2, cf.SpinMode.UNPOLARIZED) == pytest.approx(3.0, rel=1e-12)
    assert cf.g2_total(np.pi, POISSON, ENV2, cf.SpinMode.UNPOLARIZED) == pytest.approx(7.0, rel=1e-12)


def test_total_sfe_value():
    sfe = cf.SourceStatistics(0.9, 0.05, 0.0)
    env = cf.EnvelopeWeights.normalized_prefactor(sfe)
    assert cf.g2_total(0.0, sfe, env, cf.SpinMode.UNPOLARIZED) == pytest.approx(2.0, rel=1e-12)


def test_total_p1_zero_limit_is_offset_only():
    stats = cf.SourceStatistics(0.8, 0.0, 0.05)
    env = cf.EnvelopeWeights(1.0, 1.0)
    vals = cf.g2_total(np.linspace(-3, 3, 9), stats, env, cf.SpinMode.UNPOLARIZED)
    assert np.all(vals == vals[0])
    assert vals[0] == pytest.approx(4.0 * 0.8 * 0.05, rel=1e-14)


def test_total_sector_decomposition():
    deltas = np.linspace(-2 * np.pi, 2 * np.pi, 33)
    for stats in (POISSON, cf.SourceStatistics(0.7, 0.1, 0.02)):
        env = cf.EnvelopeWeights(0.9, 1.7)
        total = cf.g2_total(deltas, stats, env, cf.SpinMode.UNPOLARIZED)
        sectors = (cf.g2_equal_spin_p1sq(deltas, stats, env)
                   + cf.g2_unequal_spin_p1sq(deltas, stats, env)
                   + cf.g2_same_source(deltas, stats, env)[1])
        np.testing.assert_allclose(total, sectors, rtol=0, atol=1e-15 * total.max())


def test_spin_modes_select_sectors():
    deltas = np.linspace(0, 2 * np.pi, 17)
    env = cf.EnvelopeWeights(0.4, 0.8)
    pol = cf.g2_total(deltas, POISSON, env, cf.SpinMode.POLARIZED_EQUAL)
    np.testing.assert_allclose(pol, cf.g2_equal_spin_p1sq(deltas, POISSON, env), atol=0)
    orth = cf.g2_total(deltas, POISSON, env, cf.SpinMode.ORTHOGONAL_ONLY)
    expected = cf.g2_unequal_spin_p1sq(deltas, POISSON, env) + cf.g2_same_source(
        deltas, POISSON, env)[1]
    np.testing.assert_allclose(orth, expected, rtol=1e-15)


def test_visibility_triple():
    sfe = cf.SourceStatistics(0.9, 0.05, 0.0)
    assert cf.visibility(sfe, cf.SpinMode.POLARIZED_EQUAL) == 1.0
    assert abs(cf.visibility(sfe, cf.SpinMode.UNPOLARIZED) - 0.5) < 1e-12
    assert abs(cf.visibility(POISSON, cf.SpinMode.UNPOLARIZED) - 0.4) < 1e-12
    assert cf.visibility(POISSON, cf.SpinMode.ORTHOGONAL_ONLY) == 0.0


def test_visibility_requires_p1():
    stats = cf.SourceStatistics(0.9, 0.0, 0.02)
    with pytest.raises(ValueError):
        cf.visibility(stats, cf.SpinMode.UNPOLARIZED)
    assert cf.visibility(stats, cf.SpinMode.POLARIZED_EQUAL) == 1.0


def test_contrast_matches_visibility():
    # cos extremes sit exactly at delta = 0 and pi
    for stats, mode in ((POISSON, cf.SpinMode.UNPOLARIZED),
                        (cf.SourceStatistics(0.9, 0.05, 0.0), cf.SpinMode.UNPOLARIZED),
                        (POISSON, cf.SpinMode.POLARIZED_EQUAL)):
        env = cf.EnvelopeWeights(1.3, 0.2)
        hi = cf.g2_total(np.pi, stats, env, mode)
        lo = cf.g2_total(0.0, stats, env, mode)
        assert (hi - lo) / (hi + lo) == pytest.approx(cf.visibility(stats, mode), abs=1e-12)


def test_bosonic_reference():
    assert cf.g2_bosonic_reference(0.0, 2.0) == pytest.approx(4.0, rel=1e-14)
    assert cf.g2_bosonic_reference(np.pi, 2.0) == pytest.approx(0.0, abs=1e-12)
    deltas = np.linspace(-7, 7, 41)
    ferm = cf.g2_total(deltas + np.pi, POISSON, ENV2, cf.SpinMode.POLARIZED_EQUAL)
    np.testing.assert_allclose(cf.g2_bosonic_reference(deltas, 2.0), ferm, atol=1e-12)


def test_outputs_non_negative():
    rng = np.random.default_rng(3)
    for _ in range(300):
        p1 = rng.uniform(0, 0.3)
        p2 = rng.uniform(0, 0.05)
        stats = cf.SourceStatistics(rng.uniform(0, 1 - 2 * p1 - 4 * p2), p1, p2)
        env = cf.EnvelopeWeights(rng.uniform(0, 3), rng.uniform(0, 3))
        deltas = rng.uniform(-20, 20, 5)
        for mode in cf.SpinMode:
            assert np.all(cf.g2_total(deltas, stats, env, mode) >= 0)
