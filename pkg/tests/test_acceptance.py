"""Acceptance suite: one test per release criterion, at its stated tolerance.

Each test prints a single PASS line (visible with ``pytest -s`` or in the
captured output) including the measured figure of merit and runtime.
"""

import json
import time

import numpy as np
import pytest

from ehbt import cli
from ehbt import closed_form as cf
from ehbt import coulomb as cl
from ehbt.fock import DirectionGrid, Ensemble, FockEngine, StatisticsKind, tensor_product
from ehbt.geometry import DetectorPosition, Geometry, phase_delta, x_for_phase
from ehbt.pattern import ScreenGrid, compose_pattern, count_dip_maxima, spatial_wavelength

GEOM = Geometry(d=1.0e-8, D=1.0, k=1.0e11)
CONFIG_DIR = __import__("pathlib").Path(__file__).resolve().parent.parent / "configs"


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def report(criterion, detail, watch=None):
    runtime = f" [{watch.elapsed:.2f} s]" if watch else ""
    print(f"PASS criterion {criterion}: {detail}{runtime}")


def test_criterion_01_visibility_triple():
    with Stopwatch() as w:
        sfe = cf.SourceStatistics(0.9, 0.05, 0.0)
        pol = cf.visibility(sfe, cf.SpinMode.POLARIZED_EQUAL)
        unp = cf.visibility(sfe, cf.SpinMode.UNPOLARIZED)
        poi = cf.visibility(cf.poissonian_stats(0.37), cf.SpinMode.UNPOLARIZED)
    assert abs(pol - 1.0) < 1e-12
    assert abs(unp - 0.5) < 1e-12
    assert abs(poi - 0.4) < 1e-12
    report(1, f"visibility = ({pol}, {unp}, {poi}) vs (1, 0.5, 0.4) at 1e-12", w)


def test_criterion_02_oracle_equivalence():
    with Stopwatch() as w:
        n_bins = 33
        thetas = np.linspace(-4.0e-3, 4.0e-3, n_bins)
        engine = FockEngine(GEOM, DirectionGrid.uniform(thetas))
        env = cf.EnvelopeWeights(1.0 / n_bins, 1.0 / n_bins)
        det1 = DetectorPosition.from_angle(GEOM, 0.0)
        det2s = [DetectorPosition.from_angle(GEOM, float(t))
                 for t in thetas[1::2]]  # 16 detector positions
        assert len(det2s) == 16
        worst = 0.0
        n_triples = 0
        for p1 in (0.02, 0.05, 0.1, 0.2, 0.3):
            for p2 in (0.0, 2.5e-4, 5.0e-4, 7.5e-4, 1.0e-3):
                stats = cf.SourceStatistics(1.0 - 2 * p1 - 4 * p2, p1, p2)
                n_triples += 1
                rho = engine.pair_ensemble(stats, max_electrons=2)
                for det2 in det2s:
                    got = engine.g2_numeric(rho, det1, det2)
                    ref = cf.g2_total(phase_delta(GEOM, det2), stats, env,
                                      cf.SpinMode.UNPOLARIZED)
                    worst = max(worst, abs(got - ref) / ref)
    assert n_triples == 25
    assert worst < 1e-10
    assert w.elapsed < 10.0
    report(2, f"max rel diff {worst:.2e} over 16 deltas x 25 triples (tol 1e-10)", w)


def _fock_fixture(n_bins=9, kind=StatisticsKind.FERMION):
    thetas = np.linspace(-4.0e-3, 4.0e-3, n_bins)
    return FockEngine(GEOM, DirectionGrid.uniform(thetas), kind)


def _polarized_singles(engine, p1=0.1):
    parts = []
    for source in (1, 2):
        parts.append(Ensemble(
            kind=engine.kind, n_modes=engine.n_modes, sources=frozenset({source}),
            branches=[(1.0 - p1, engine.vacuum()),
                      (p1, engine.single_emission(source, 1))]))
    return tensor_product(parts[0], parts[1], max_electrons=2)


def test_criterion_03_path_decomposition():
    with Stopwatch() as w:
        engine = _fock_fixture()
        rho = engine.pair_ensemble(cf.poissonian_stats(0.3))
        det1 = DetectorPosition.from_angle(GEOM, 0.0)
        worst_sum = 0.0
        cross_leak = 0.0
        for theta in engine.grid.thetas[[1, 4, 7]]:
            det2 = DetectorPosition.from_angle(GEOM, float(theta))
            blocks = engine.g2_spin_blocks(rho, det1, det2)
            for spins in ((1, 1), (2, 2), (1, 2), (2, 1)):
                terms = engine.g2_term_decomposition(rho, det1, det2, spins)
                scale = max(abs(blocks[spins]), 1e-30)
                worst_sum = max(worst_sum, abs(sum(terms) - blocks[spins]) / scale)
                if spins[0] != spins[1]:
                    cross_leak = max(cross_leak, abs(terms[4]), abs(terms[5]))
        singles = _polarized_singles(engine)
        det2 = DetectorPosition.from_angle(GEOM, float(engine.grid.thetas[2]))
        same_source = engine.g2_term_decomposition(singles, det1, det2, (1, 1))
        single_leak = max(abs(same_source[0]), abs(same_source[1]))
    assert worst_sum < 1e-10
    assert single_leak == 0.0
    assert cross_leak == 0.0
    assert w.elapsed < 5.0
    report(3, f"six-term sum error {worst_sum:.1e}; same-source terms for single "
              f"emitters {single_leak:.1e}; interference for s!=s' {cross_leak:.1e}", w)


def test_criterion_04_fermion_boson_duality():
    with Stopwatch() as w:
        curves = {}
        for kind in (StatisticsKind.FERMION, StatisticsKind.BOSON):
            engine = _fock_fixture(kind=kind)
            rho = _polarized_singles(engine)
            det1 = DetectorPosition.from_angle(GEOM, 0.0)
            deltas, vals = [], []
            for theta in np.linspace(-3.5e-3, 3.5e-3, 64):
                det2 = DetectorPosition.from_angle(GEOM, float(theta))
                deltas.append(phase_delta(GEOM, det2))
                vals.append(engine.g2_spin_blocks(rho, det1, det2)[(1, 1)])
            curves[kind] = (np.asarray(deltas), np.asarray(vals))

        resid = {}
        coeff = {}
        for kind, sign in ((StatisticsKind.FERMION, -1.0), (StatisticsKind.BOSON, 1.0)):
            deltas, vals = curves[kind]
            basis = 1.0 + sign * np.cos(deltas)
            c = np.dot(basis, vals) / np.dot(basis, basis)
            resid[kind] = np.max(np.abs(vals - c * basis)) / c
            coeff[kind] = c
        shift = np.max(np.abs(curves[StatisticsKind.FERMION][1]
                              + curves[StatisticsKind.BOSON][1]
                              - 2 * coeff[StatisticsKind.FERMION]))
        shift /= coeff[StatisticsKind.FERMION]
    assert resid[StatisticsKind.FERMION] < 1e-10
    assert resid[StatisticsKind.BOSON] < 1e-10
    assert shift < 1e-10
    assert w.elapsed < 5.0
    report(4, f"fit residuals fermion {resid[StatisticsKind.FERMION]:.1e}, boson "
              f"{resid[StatisticsKind.BOSON]:.1e}; pi-shift identity {shift:.1e}", w)


def test_criterion_05_same_source_suppression():
    with Stopwatch() as w:
        thetas = np.array([-1.0e-3, 1.0e-3])
        engine = FockEngine(GEOM, DirectionGrid.uniform(thetas))
        det1 = DetectorPosition.from_angle(GEOM, float(thetas[0]))
        det2 = DetectorPosition.from_angle(GEOM, float(thetas[1]))
        wrap = lambda st: Ensemble(kind=engine.kind, n_modes=engine.n_modes,
                                   sources=frozenset({1}), branches=[(1.0, st)])
        equal = engine.g2_equal_spin(wrap(engine.double_emission(1, (1, 1))), det1, det2)
        c_a = np.array([1.0, 1.0]) / np.sqrt(2)
        c_b = np.array([1.0, -1.0]) / np.sqrt(2)
        ortho = engine.g2_equal_spin(
            wrap(engine.double_emission(1, (1, 1), (c_a, c_b))), det1, det2)
    assert equal < 1e-12
    assert ortho > 1e-6
    assert w.elapsed < 1.0
    report(5, f"equal envelopes {equal:.1e} (tol 1e-12); orthogonal envelopes "
              f"{ortho:.3e} > 0", w)


def test_criterion_06_coulomb_numerics():
    with Stopwatch() as w:
        cfg = cl.IntegratorConfig(v_tol=1.0e-9)
        worst_v = 0.0
        worst_drift = 0.0
        for d0 in (1.0e-9, 1.0e-8, 1.0e-7):
            traj = cl.integrate_relative(d0, cfg)
            v_ref = cl.end_velocity_closed_form(d0)
            worst_v = max(worst_v, abs(traj.v_end - v_ref) / v_ref)
            worst_drift = max(worst_drift, traj.max_energy_drift)
        study = cl.convergence_study(1.0e-8)
    assert worst_v < 1e-3
    assert worst_drift < 1e-6
    assert 1.9 <= study["slope"] <= 2.1
    assert w.elapsed < 60.0
    report(6, f"end-velocity rel err {worst_v:.2e} (tol 1e-3); drift "
              f"{worst_drift:.1e} (tol 1e-6); order {study['slope']:.3f}", w)


def test_criterion_07_dip_width_and_fringe_numbers():
    with Stopwatch() as w:
        z_ana = cl.dip_width(1.0e-8, 1.0e11, 1.0)
        res = cl.dip_width_numeric(1.0e-8, 1.0e11, 1.0)
        lam = spatial_wavelength(GEOM)
        n_ana = cl.fringe_count(1.0e-8)
        n_num = res.z_dip / lam
        n_small_ana = cl.fringe_count(1.0e-11)
        n_small_num = cl.dip_width_numeric(1.0e-11, 1.0e11, 1.0).z_dip / \
            spatial_wavelength(Geometry(d=1.0e-11, D=1.0, k=1.0e11))
    for value, ref in ((z_ana, 2.75e-2), (res.z_dip, 2.75e-2),
                       (n_ana, 4.37), (n_num, 4.37),
                       (n_small_ana, 0.138), (n_small_num, 0.138)):
        assert abs(value - ref) / ref < 0.01
    assert w.elapsed < 60.0
    report(7, f"z_dip analytic {z_ana:.4e} / numeric {res.z_dip:.4e} m vs 2.75e-2; "
              f"N {n_ana:.3f}/{n_num:.3f} vs 4.37; N(0.01 nm) {n_small_ana:.4f}"
              f"/{n_small_num:.4f} vs 0.138 (all within 1%)", w)


def test_criterion_08_scaling_laws():
    with Stopwatch() as w:
        ds = np.logspace(-11, -7, 9)  # four decades
        slope_cf = float(np.polyfit(np.log(ds), np.log(cl.fringe_count(ds)), 1)[0])
        n_num = []
        for d0 in ds:
            v_end = cl.integrate_relative(float(d0)).v_end
            t_f = 1.0 * 9.1093837015e-31 / (1.054571817e-34 * 1.0e11)
            n_num.append(v_end * t_f / (2.0 * np.pi * 1.0 / (1.0e11 * d0)))
        slope_num = float(np.polyfit(np.log(ds), np.log(n_num), 1)[0])

        spreads = []
        v10 = cl.integrate_relative(1.0e-8).v_end
        for paths in ("closed", "numeric"):
            vals = []
            for k in (5.0e10, 1.0e11, 2.0e11):
                for D in (0.5, 1.0, 2.0):
                    if paths == "closed":
                        vals.append(cl.dip_width(1.0e-8, k, D)
                                    / (2 * np.pi * D / (k * 1.0e-8)))
                    else:
                        t_f = D * 9.1093837015e-31 / (1.054571817e-34 * k)
                        vals.append(v10 * t_f / (2 * np.pi * D / (k * 1.0e-8)))
            vals = np.asarray(vals)
            spreads.append(float((vals.max() - vals.min()) / vals.min()))
    assert abs(slope_cf - 0.5) < 1e-12
    assert abs(slope_num - 0.5) < 1e-3
    assert spreads[0] < 1e-12 and spreads[1] < 1e-12
    assert w.elapsed < 120.0
    report(8, f"slope closed {slope_cf:.14f}, numeric {slope_num:.5f}; N spread over "
              f"3x3 (k, D): closed {spreads[0]:.1e}, numeric {spreads[1]:.1e}", w)


def test_criterion_09_pattern_composition():
    with Stopwatch() as w:
        sfe = cf.SourceStatistics(0.9, 0.05, 0.0)
        fig4b = compose_pattern(GEOM, sfe, cf.SpinMode.POLARIZED_EQUAL,
                                ScreenGrid(-0.05, 0.05, 4001))
        n_4b = count_dip_maxima(fig4b)
        geom_a = Geometry(d=1.0e-11, D=1.0, k=1.0e11)
        fig4a = compose_pattern(geom_a, sfe, cf.SpinMode.POLARIZED_EQUAL,
                                ScreenGrid(-1.0, 1.0, 4001))
        n_4a = count_dip_maxima(fig4a)

        # coulomb-off contrast on a grid aligned with the fringe extremes
        x_pi = x_for_phase(GEOM, np.pi)
        worst = 0.0
        for stats, mode in ((sfe, cf.SpinMode.POLARIZED_EQUAL),
                            (sfe, cf.SpinMode.UNPOLARIZED),
                            (cf.poissonian_stats(0.2), cf.SpinMode.UNPOLARIZED)):
            grid = ScreenGrid(-4 * x_pi, 4 * x_pi, 8 * 24 + 1)
            series = compose_pattern(GEOM, stats, mode, grid, coulomb_on=False)
            hi, lo = series.g2_total.max(), series.g2_total.min()
            contrast = (hi - lo) / (hi + lo)
            worst = max(worst, abs(contrast - cf.visibility(stats, mode)))
        floor_n = int(np.floor(fig4b.fringe_n))
    assert abs(n_4b - floor_n) <= 1
    assert n_4a == 0
    assert worst < 1e-9
    assert w.elapsed < 10.0
    report(9, f"fig4b maxima {n_4b} vs floor(N) = {floor_n} +/- 1; fig4a maxima "
              f"{n_4a}; contrast error {worst:.1e} (tol 1e-9)", w)


def test_criterion_10_monte_carlo_spread():
    with Stopwatch() as w:
        z_ana = cl.dip_width(1.0e-8, 1.0e11, 1.0)
        zs = cl.sample_dip_widths(1.0e-8, 1.0e11, 0.005, 1.0, n=10_000, seed=2024)
        se = zs.std(ddof=1) / np.sqrt(zs.size)
        mean_dev = abs(zs.mean() - z_ana)
        rel_std = zs.std(ddof=1) / zs.mean()
    assert mean_dev < 3 * se
    assert abs(rel_std - 0.005) / 0.005 < 0.10
    assert w.elapsed < 30.0
    report(10, f"mean deviation {mean_dev:.2e} m < 3 SE = {3 * se:.2e} m; rel std "
               f"{rel_std:.5f} vs 0.005 (within 10%)", w)


def test_criterion_11_determinism(tmp_path):
    with Stopwatch() as w:
        outputs = []
        for threads in ("1", "8"):
            out = tmp_path / f"t{threads}"
            code = cli.main(["compose", "--config", str(CONFIG_DIR / "fig4b.json"),
                             "--out", str(out), "--seed", "7", "--threads", threads])
            assert code == 0
            outputs.append(out)
        csv_a = outputs[0].with_suffix(".csv").read_bytes()
        csv_b = outputs[1].with_suffix(".csv").read_bytes()
        man_a = json.loads(outputs[0].with_suffix(".manifest.json").read_text())
        man_b = json.loads(outputs[1].with_suffix(".manifest.json").read_text())
    assert csv_a == csv_b
    assert list(man_a["outputs"].values()) == list(man_b["outputs"].values())
    assert man_a["config"] == man_b["config"]
    assert man_a["derived"]["z_dip_m"] == man_b["derived"]["z_dip_m"]
    report(11, f"byte-identical CSV ({len(csv_a)} bytes) for --threads 1 vs 8, "
               f"sha256 {man_a['outputs'][outputs[0].with_suffix('.csv').name][:12]}...", w)
