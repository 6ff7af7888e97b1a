"""Self-check suites: algebraic identities, oracle cross-checks, numerics.

Each check returns a :class:`CheckResult`; the CLI renders one line per
check and exits nonzero if any fails.  The fock suite doubles as a
mutation tripwire: a sign error in the anticommutation bookkeeping fails
the very first check.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import closed_form as cf
from . import coulomb as cl
from .constants import CODATA
from .fock import (
    DirectionGrid,
    Ensemble,
    FockEngine,
    FockState,
    StatisticsKind,
    apply_annihilation,
    apply_creation,
    tensor_product,
)
from .geometry import DetectorPosition, Geometry, phase_delta

#: Frozen constants evaluation of e^2/(4 pi eps0) [N m^2], used as an
#: independent anchor for the force check.
_COULOMB_CONST_REF = 2.3070775523417355e-28

#: m_e/hbar [s/m^2], for time-of-flight D*m_e/(hbar*k) in the scaling checks.
_M_E_OVER_HBAR = CODATA.m_e / CODATA.hbar


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail}"


def _result(name, passed, value, detail) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), value=float(value), detail=detail)


# ---------------------------------------------------------------------------
# closed-form suite


def verify_closed_form() -> list:
    checks = []

    sfe = cf.SourceStatistics(p0=0.9, p1=0.05, p2=0.0)
    pol = cf.visibility(sfe, cf.SpinMode.POLARIZED_EQUAL)
    unp = cf.visibility(sfe, cf.SpinMode.UNPOLARIZED)
    poi = cf.visibility(cf.poissonian_stats(0.2), cf.SpinMode.UNPOLARIZED)
    err = max(abs(pol - 1.0), abs(unp - 0.5), abs(poi - 0.4))
    checks.append(_result("visibility_triple", err < 1e-12, err,
                          f"polarized={pol}, sfe={unp}, poisson={poi} (max err {err:.1e})"))

    worst = 0.0
    for mu in (0.01, 0.1, 0.5, 1.0, 2.0):
        worst = max(worst, abs(cf.poissonian_stats(mu).offset_ratio - 0.5))
    checks.append(_result("poisson_offset_ratio", worst < 1e-12, worst,
                          f"max |p0 p2/p1^2 - 1/2| = {worst:.1e} over mu grid"))

    deltas = np.linspace(-2 * np.pi, 2 * np.pi, 41)
    worst = 0.0
    for stats in (sfe, cf.poissonian_stats(0.3), cf.SourceStatistics(0.7, 0.1, 0.02)):
        env = cf.EnvelopeWeights(0.37, 1.21)
        total = cf.g2_total(deltas, stats, env, cf.SpinMode.UNPOLARIZED)
        parts = (cf.g2_equal_spin_p1sq(deltas, stats, env)
                 + cf.g2_unequal_spin_p1sq(deltas, stats, env)
                 + cf.g2_same_source(deltas, stats, env)[1])
        worst = max(worst, float(np.max(np.abs(total - parts))))
    checks.append(_result("sector_decomposition", worst < 1e-12, worst,
                          f"max |total - sum of sectors| = {worst:.1e}"))

    worst = 0.0
    for stats in (sfe, cf.poissonian_stats(0.4)):
        for mode in (cf.SpinMode.POLARIZED_EQUAL, cf.SpinMode.UNPOLARIZED):
            env = cf.EnvelopeWeights(1.0, 1.0)
            hi = cf.g2_total(np.pi, stats, env, mode)
            lo = cf.g2_total(0.0, stats, env, mode)
            contrast = (hi - lo) / (hi + lo)
            worst = max(worst, abs(contrast - cf.visibility(stats, mode)))
    checks.append(_result("contrast_equals_visibility", worst < 1e-12, worst,
                          f"max |contrast - visibility| = {worst:.1e}"))

    ferm = cf.g2_total(deltas + np.pi, sfe, cf.EnvelopeWeights.normalized_prefactor(sfe),
                       cf.SpinMode.POLARIZED_EQUAL)
    bos = cf.g2_bosonic_reference(deltas, 2.0)
    err = float(np.max(np.abs(ferm - bos)))
    checks.append(_result("boson_is_pi_shifted_fermion", err < 1e-12, err,
                          f"max |boson(d) - fermion(d+pi)| = {err:.1e}"))

    rng = np.random.default_rng(7)
    worst = np.inf
    for _ in range(200):
        p1 = rng.uniform(0, 0.3)
        p2 = rng.uniform(0, 0.05)
        p0 = rng.uniform(0, 1 - 2 * p1 - 4 * p2)
        stats = cf.SourceStatistics(p0, p1, p2)
        vals = cf.g2_total(rng.uniform(-10, 10, 8), stats,
                           cf.EnvelopeWeights(rng.uniform(0, 2), rng.uniform(0, 2)),
                           cf.SpinMode.UNPOLARIZED)
        worst = min(worst, float(np.min(vals)))
    checks.append(_result("non_negative", worst >= 0.0, worst,
                          f"min sampled value = {worst:.3e}"))
    return checks


# ---------------------------------------------------------------------------
# fock suite


def _basis_states(n_modes):
    for key in range(1 << n_modes):
        yield FockState(StatisticsKind.FERMION, n_modes, {key: 1.0 + 0.0j})


def _op_diff(state_a: FockState, state_b: FockState) -> float:
    keys = set(state_a.amp) | set(state_b.amp)
    if not keys:
        return 0.0
    return max(abs(state_a.amp.get(k, 0.0j) - state_b.amp.get(k, 0.0j)) for k in keys)


def check_anticommutation(n_modes: int = 8) -> CheckResult:
    """{a_i, a_j} = 0 and {a_i, a^dag_j} = delta_ij on every basis state."""
    worst = 0.0
    for i in range(n_modes):
        for j in range(n_modes):
            for ket in _basis_states(n_modes):
                aa = apply_annihilation(apply_annihilation(ket, j), i)
                aa2 = apply_annihilation(apply_annihilation(ket, i), j)
                s = FockState(ket.kind, n_modes,
                              {k: aa.amp.get(k, 0j) + aa2.amp.get(k, 0j)
                               for k in set(aa.amp) | set(aa2.amp)})
                worst = max(worst, s._prune().norm())
                ad = apply_annihilation(apply_creation(ket, j), i)
                da = apply_creation(apply_annihilation(ket, i), j)
                s = FockState(ket.kind, n_modes,
                              {k: ad.amp.get(k, 0j) + da.amp.get(k, 0j)
                               for k in set(ad.amp) | set(da.amp)})
                expect = ket if i == j else FockState(ket.kind, n_modes)
                worst = max(worst, _op_diff(s._prune(), expect))
    return _result("anticommutation", worst < 1e-12, worst,
                   f"max violation over {n_modes} modes = {worst:.1e}")


def check_adjoint(n_modes: int = 6, n_trials: int = 50, seed: int = 11) -> CheckResult:
    """<psi| a^dag phi> = <a psi | phi> on random states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    dim = 1 << n_modes
    for _ in range(n_trials):
        psi = FockState(StatisticsKind.FERMION, n_modes,
                        {int(k): complex(rng.normal(), rng.normal())
                         for k in rng.integers(0, dim, 5)})
        phi = FockState(StatisticsKind.FERMION, n_modes,
                        {int(k): complex(rng.normal(), rng.normal())
                         for k in rng.integers(0, dim, 5)})
        mode = int(rng.integers(0, n_modes))
        lhs = psi.inner(apply_creation(phi, mode))
        rhs = apply_annihilation(psi, mode).inner(phi)
        worst = max(worst, abs(lhs - rhs))
    return _result("adjoint_pair", worst < 1e-12, worst,
                   f"max |<psi|a^dag phi> - <a psi|phi>| = {worst:.1e}")


def _demo_engine(kind=StatisticsKind.FERMION, n_bins: int = 9):
    geom = Geometry(d=1.0e-8, D=1.0, k=1.0e11)
    thetas = np.linspace(-4.0e-3, 4.0e-3, n_bins)
    return FockEngine(geom, DirectionGrid.uniform(thetas), kind)


def _single_spin_pair(engine, p1: float = 0.1):
    """Two polarized single emitters (spin 1 only), vacuum remainder."""
    branches = []
    for source in (1, 2):
        vac = engine.vacuum()
        branches.append(Ensemble(
            kind=engine.kind, n_modes=engine.n_modes, sources=frozenset({source}),
            branches=[(1.0 - p1, vac), (p1, engine.single_emission(source, 1))]))
    return tensor_product(branches[0], branches[1], max_electrons=2)


def _cos_fit_residual(deltas, values, sign: float) -> float:
    """Residual of a least-squares fit to c*(1 + sign*cos(delta))."""
    basis = 1.0 + sign * np.cos(deltas)
    c = float(np.dot(basis, values) / np.dot(basis, basis))
    return float(np.max(np.abs(values - c * basis)))


def check_statistics_patterns() -> list:
    out = []
    for kind, sign, name in ((StatisticsKind.FERMION, -1.0, "fermion_one_minus_cos"),
                             (StatisticsKind.BOSON, +1.0, "boson_one_plus_cos")):
        eng = _demo_engine(kind)
        rho = _single_spin_pair(eng)
        det1 = DetectorPosition.from_angle(eng.geom, 0.0)
        deltas, vals = [], []
        for theta in np.linspace(-3.5e-3, 3.5e-3, 64):
            det2 = DetectorPosition.from_angle(eng.geom, float(theta))
            blocks = eng.g2_spin_blocks(rho, det1, det2)
            deltas.append(phase_delta(eng.geom, det2))
            vals.append(blocks[(1, 1)])
        resid = _cos_fit_residual(np.array(deltas), np.array(vals), sign)
        out.append(_result(name, resid < 1e-10, resid, f"fit residual {resid:.1e}"))
    return out


def check_same_source_suppression() -> list:
    out = []
    geom = Geometry(d=1.0e-8, D=1.0, k=1.0e11)
    grid = DirectionGrid.uniform(np.array([-1.0e-3, 1.0e-3]))
    eng = FockEngine(geom, grid)
    det1 = DetectorPosition.from_angle(geom, float(grid.thetas[0]))
    det2 = DetectorPosition.from_angle(geom, float(grid.thetas[1]))

    equal = eng.double_emission(1, (1, 1))
    rho = Ensemble(kind=eng.kind, n_modes=eng.n_modes, sources=frozenset({1}),
                   branches=[(1.0, equal)])
    val = eng.g2_equal_spin(rho, det1, det2)
    out.append(_result("same_source_equal_env_zero",
                       equal.is_zero and val < 1e-12, val,
                       f"equal-envelope equal-spin pair state norm {equal.norm():.1e}"))

    c_a = np.array([1.0, 1.0]) / np.sqrt(2.0)
    c_b = np.array([1.0, -1.0]) / np.sqrt(2.0)
    ortho = eng.double_emission(1, (1, 1), (c_a, c_b))
    rho = Ensemble(kind=eng.kind, n_modes=eng.n_modes, sources=frozenset({1}),
                   branches=[(1.0, ortho)])
    val = eng.g2_equal_spin(rho, det1, det2)
    out.append(_result("same_source_orthogonal_env_positive", val > 1e-6, val,
                       f"orthogonal-envelope equal-spin correlation {val:.3e}"))
    return out


def check_path_decomposition() -> list:
    out = []
    eng = _demo_engine()
    stats = cf.poissonian_stats(0.3)
    rho = eng.pair_ensemble(stats)
    det1 = DetectorPosition.from_angle(eng.geom, 0.0)
    det2 = DetectorPosition.from_angle(eng.geom, float(eng.grid.thetas[2]))
    blocks = eng.g2_spin_blocks(rho, det1, det2)

    worst_sum = 0.0
    worst_conj = 0.0
    cross_leak = 0.0
    for spins in ((1, 1), (2, 2), (1, 2), (2, 1)):
        terms = eng.g2_term_decomposition(rho, det1, det2, spins)
        worst_sum = max(worst_sum, abs(sum(terms) - blocks[spins]))
        worst_conj = max(worst_conj, abs(terms[4] - np.conj(terms[5])))
        if spins[0] != spins[1]:
            cross_leak = max(cross_leak, abs(terms[4]), abs(terms[5]))
    out.append(_result("six_terms_sum_to_block", worst_sum < 1e-10, worst_sum,
                       f"max |sum - block| = {worst_sum:.1e}"))
    out.append(_result("interference_terms_conjugate", worst_conj < 1e-12, worst_conj,
                       f"max |t5 - conj(t6)| = {worst_conj:.1e}"))
    out.append(_result("no_oscillation_for_orthogonal_spins", cross_leak < 1e-12,
                       cross_leak, f"max |t5|,|t6| for s != s' = {cross_leak:.1e}"))

    single = _single_spin_pair(eng)
    same_source_leak = 0.0
    for spins in ((1, 1), (1, 2)):
        terms = eng.g2_term_decomposition(single, det1, det2, spins)
        same_source_leak = max(same_source_leak, abs(terms[0]), abs(terms[1]))
    out.append(_result("single_emitters_same_source_terms_zero",
                       same_source_leak < 1e-12, same_source_leak,
                       f"max |t1|,|t2| = {same_source_leak:.1e}"))
    return out


def check_oracle_equivalence(n_deltas: int = 8, tol: float = 1e-10) -> CheckResult:
    """Brute-force correlator against the closed form on a probability grid."""
    eng = _demo_engine(n_bins=2 * n_deltas + 1)
    geom = eng.geom
    m = eng.grid.n_bins
    env = cf.EnvelopeWeights(c1sq=1.0 / m, c2sq=1.0 / m)
    det1 = DetectorPosition.from_angle(geom, 0.0)
    dets = [DetectorPosition.from_angle(geom, float(t))
            for t in eng.grid.thetas[1::2][:n_deltas]]
    worst = 0.0
    for p1 in (0.02, 0.1, 0.25):
        for p2 in (0.0, 5.0e-4, 1.0e-3):
            stats = cf.SourceStatistics(p0=1.0 - 2 * p1 - 4 * p2, p1=p1, p2=p2)
            rho = eng.pair_ensemble(stats, max_electrons=2)
            for det2 in dets:
                bf = eng.g2_numeric(rho, det1, det2)
                ref = cf.g2_total(phase_delta(geom, det2), stats, env,
                                  cf.SpinMode.UNPOLARIZED)
                worst = max(worst, abs(bf - ref) / ref)
    return _result("oracle_equivalence", worst < tol, worst,
                   f"max rel diff fock vs closed form = {worst:.2e}")


def check_detector_symmetry() -> CheckResult:
    eng = _demo_engine()
    rho = eng.pair_ensemble(cf.poissonian_stats(0.25))
    det_a = DetectorPosition.from_angle(eng.geom, float(eng.grid.thetas[1]))
    det_b = DetectorPosition.from_angle(eng.geom, float(eng.grid.thetas[6]))
    g_ab = eng.g2_numeric(rho, det_a, det_b)
    g_ba = eng.g2_numeric(rho, det_b, det_a)
    worst = abs(g_ab - g_ba) / g_ab
    return _result("detector_exchange_symmetry", worst < 1e-12, worst,
                   f"|G(r1,r2) - G(r2,r1)|/G = {worst:.1e}")


def verify_fock() -> list:
    checks = [check_anticommutation(), check_adjoint()]
    checks.extend(check_statistics_patterns())
    checks.extend(check_same_source_suppression())
    checks.extend(check_path_decomposition())
    checks.append(check_oracle_equivalence())
    checks.append(check_detector_symmetry())
    return checks


# ---------------------------------------------------------------------------
# coulomb suite


def verify_coulomb() -> list:
    checks = []

    f = float(np.linalg.norm(cl.coulomb_force([0.0, 0.0, 1.0], [0.0, 0.0, 0.0])))
    err = abs(f - _COULOMB_CONST_REF) / _COULOMB_CONST_REF
    checks.append(_result("coulomb_force_constant", err < 1e-9, err,
                          f"|F(1 m)| = {f:.6e} N (rel err {err:.1e})"))

    tight = cl.IntegratorConfig(v_tol=1.0e-9)
    worst_v = 0.0
    worst_drift = 0.0
    worst_ratio = 0.0
    for d0 in (1.0e-9, 1.0e-8, 1.0e-7):
        traj = cl.integrate_relative(d0, tight)
        v_ref = cl.end_velocity_closed_form(d0)
        worst_v = max(worst_v, abs(traj.v_end - v_ref) / v_ref)
        worst_drift = max(worst_drift, traj.max_energy_drift)
        worst_ratio = max(worst_ratio, abs(traj.v_end / v_ref - 1.0))
    checks.append(_result("end_velocity_vs_energy_oracle", worst_v < 1e-3, worst_v,
                          f"max rel deviation = {worst_v:.2e} over d = 1, 10, 100 nm"))
    checks.append(_result("energy_drift", worst_drift < 1e-6, worst_drift,
                          f"max relative drift = {worst_drift:.2e}"))
    checks.append(_result("dip_width_numeric_vs_analytic",
                          worst_ratio < 0.01, worst_ratio,
                          f"max |numeric/analytic - 1| = {worst_ratio:.2e} (converged settings)"))

    study = cl.convergence_study(1.0e-8)
    ok = 1.9 <= study["slope"] <= 2.1
    checks.append(_result("verlet_convergence_order", ok, study["slope"],
                          f"log-log slope = {study['slope']:.3f}"))

    res = cl.dip_width_numeric(1.0e-8, 1.0e11, 1.0)
    ana = cl.dip_width(1.0e-8, 1.0e11, 1.0)
    checks.append(_result("fast_acceleration_timescale",
                          res.t_99 / res.t_f < 1e-2, res.t_99 / res.t_f,
                          f"t_99/t_f = {res.t_99 / res.t_f:.2e}"))
    checks.append(_result("dip_width_value", abs(ana - 0.0275) / 0.0275 < 0.01, ana,
                          f"z_dip(10 nm, 1e11, 1 m) = {ana:.5e} m"))
    n10 = cl.fringe_count(1.0e-8)
    n001 = cl.fringe_count(1.0e-11)
    ok = abs(n10 - 4.37) / 4.37 < 0.01 and abs(n001 - 0.138) / 0.138 < 0.01
    checks.append(_result("fringe_count_values", ok, n10,
                          f"N(10 nm) = {n10:.4f}, N(0.01 nm) = {n001:.5f}"))

    ds = np.logspace(-11, -7, 9)
    slope_cf = float(np.polyfit(np.log(ds), np.log(cl.fringe_count(ds)), 1)[0])
    checks.append(_result("fringe_scaling_closed_form",
                          abs(slope_cf - 0.5) < 1e-12, slope_cf,
                          f"closed-form log-log slope = {slope_cf:.12f}"))
    t_f = 1.0 * _M_E_OVER_HBAR / 1.0e11
    lam = 2.0 * np.pi * 1.0 / (1.0e11 * ds)
    n_num = np.array([cl.integrate_relative(float(d0)).v_end for d0 in ds]) * t_f / lam
    slope_num = float(np.polyfit(np.log(ds), np.log(n_num), 1)[0])
    checks.append(_result("fringe_scaling_numeric",
                          abs(slope_num - 0.5) < 1e-3, slope_num,
                          f"numeric log-log slope = {slope_num:.5f}"))

    v10 = cl.integrate_relative(1.0e-8).v_end
    vals = []
    for k in (5.0e10, 1.0e11, 2.0e11):
        for dd in (0.5, 1.0, 2.0):
            t_f = dd * _M_E_OVER_HBAR / k
            vals.append(v10 * t_f / (2.0 * np.pi * dd / (k * 1.0e-8)))
    spread = (max(vals) - min(vals)) / min(vals)
    checks.append(_result("fringe_count_k_D_invariance", spread < 1e-12, spread,
                          f"numeric N spread over 3x3 (k, D) grid = {spread:.1e}"))
    return checks


def run(subset: str) -> list:
    suites = {
        "closed-form": verify_closed_form,
        "fock": verify_fock,
        "coulomb": verify_coulomb,
    }
    if subset == "all":
        names = ("closed-form", "fock", "coulomb")
    elif subset in suites:
        names = (subset,)
    else:
        raise ValueError(f"unknown verify subset {subset!r}")
    checks = []
    for name in names:
        t0 = time.perf_counter()
        results = suites[name]()
        dt = time.perf_counter() - t0
        for r in results:
            r.name = f"{name}.{r.name}"
        checks.extend(results)
        checks.append(_result(f"{name}.suite_runtime", True, dt,
                              f"{len(results)} checks in {dt:.2f} s"))
    return checks
