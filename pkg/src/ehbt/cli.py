"""Command-line frontend: config-driven runs emitting CSV/JSON artifacts.

Subcommands: ``closed-form``, ``coulomb``, ``compose``, ``sweep``,
``oracle``, ``verify``.  Every data file is written with 17 significant
digits and accompanied by a manifest (resolved config, derived
quantities, output hashes), so identical config + seed reproduces the
data files byte for byte.

Exit codes: 0 success, 1 validation error, 2 numerical non-convergence,
3 verification failure.
"""

import argparse
import concurrent.futures
import hashlib
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import closed_form as cf
from . import coulomb as cl
from . import verify as verify_mod
from .config import ConfigError, RunConfig, SweepParameter, build_manifest, write_manifest
from .geometry import Geometry, screen_to_phase
from .pattern import dip_envelope, spatial_wavelength, spread_averaged_envelope

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NONCONVERGED = 2
EXIT_VERIFY_FAILED = 3

#: Oracle-equivalence tolerance enforced by the `oracle` subcommand.
ORACLE_TOL = 1.0e-10


class _CliError(Exception):
    """Usage/validation error destined for exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def _fmt(x: float) -> str:
    return f"{x:.17e}"


def _write_csv(path: Path, header: list, columns: list):
    rows = zip(*columns)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _out_stem(out: str) -> Path:
    path = Path(out)
    if path.suffix == ".csv":
        path = path.with_suffix("")
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _emit(stem: Path, config: RunConfig, columns: dict, extra_derived: dict | None = None,
          extra_files: dict | None = None) -> Path:
    csv_path = stem.with_suffix(".csv")
    _write_csv(csv_path, list(columns), list(columns.values()))
    outputs = {csv_path.name: _sha256(csv_path)}
    for name, payload in (extra_files or {}).items():
        path = stem.parent / name
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        outputs[name] = _sha256(path)
    manifest = build_manifest(config, outputs=outputs, extra_derived=extra_derived)
    write_manifest(stem.with_suffix(".manifest.json"), manifest)
    return csv_path


# ---------------------------------------------------------------------------
# subcommands


def cmd_closed_form(config: RunConfig, out: str) -> int:
    if config.stats.p1 <= 0:
        raise _CliError("closed-form curves need p1 > 0 for the fringe normalization")
    geom = config.geometry
    deltas = screen_to_phase(geom, config.screen.xs())
    env = cf.EnvelopeWeights.normalized_prefactor(config.stats)
    sfe = cf.SourceStatistics(config.stats.p0, config.stats.p1, 0.0)
    columns = {
        "delta_rad": deltas,
        "g2_fermi_polarized": cf.g2_total(deltas, config.stats, env,
                                          cf.SpinMode.POLARIZED_EQUAL),
        "g2_fermi_unpolarized_sfe": cf.g2_total(
            deltas, sfe, cf.EnvelopeWeights.normalized_prefactor(sfe),
            cf.SpinMode.UNPOLARIZED),
        "g2_fermi_unpolarized_mfe": cf.g2_total(deltas, config.stats, env,
                                                cf.SpinMode.UNPOLARIZED),
        "g2_boson_reference": cf.g2_bosonic_reference(deltas, 2.0),
    }
    _emit(_out_stem(out), config, columns,
          extra_derived={"offset_ratio": config.stats.offset_ratio})
    return EXIT_OK


def cmd_coulomb(config: RunConfig, out: str) -> int:
    geom = config.geometry
    stem = _out_stem(out)
    z_ana = cl.dip_width(geom.d, geom.k, geom.D)
    try:
        traj = cl.integrate_relative(geom.d, config.integrator)
        code = EXIT_OK
    except cl.NonConvergedError as exc:
        traj = exc.trajectory
        code = EXIT_NONCONVERGED
        print(f"error: {exc}", file=sys.stderr)
    columns = {
        "t_s": traj.times,
        "z_m": traj.z,
        "zdot_m_per_s": traj.v,
        "energy_drift_rel": traj.energy_drift(),
    }
    v_cms = geom.v_cms
    t_f = geom.time_of_flight
    idx = int(np.searchsorted(traj.v, 0.99 * traj.v_end))
    dip = {
        "converged": traj.converged,
        "status": traj.status,
        "n_steps": traj.n_steps,
        "dt_s": traj.dt,
        "max_energy_drift_rel": traj.max_energy_drift,
        "v_rel_end_m_per_s": traj.v_end,
        "v_rel_end_analytic_m_per_s": cl.end_velocity_closed_form(geom.d),
        "v_cms_m_per_s": v_cms,
        "t_f_s": t_f,
        "t_99_s": float(traj.times[min(idx, traj.times.size - 1)]),
        "z_dip_numeric_m": traj.v_end * t_f,
        "z_dip_analytic_m": z_ana,
        "z_dip_rel_difference": abs(traj.v_end * t_f - z_ana) / z_ana,
    }
    _emit(stem, config, columns,
          extra_derived={"z_dip_numeric_m": dip["z_dip_numeric_m"],
                         "converged": traj.converged},
          extra_files={stem.name + ".dip.json": dip})
    return code


def _compose_chunk(geom, stats, spin_mode, env, xs, coulomb_on, depth, z_dip,
                   spread, sigma_k_rel, spread_samples, seed):
    delta = screen_to_phase(geom, xs)
    g2_fermi = cf.g2_total(delta, stats, env, spin_mode)
    if not coulomb_on:
        envelope = np.ones_like(xs)
    elif spread:
        envelope = spread_averaged_envelope(xs, geom, sigma_k_rel, depth,
                                            spread_samples, seed)
    else:
        envelope = dip_envelope(xs, z_dip, depth)
    return delta, g2_fermi, envelope


def cmd_compose(config: RunConfig, out: str, threads: int = 1) -> int:
    geom = config.geometry
    stats = config.stats
    if stats.p1 > 0:
        env = cf.EnvelopeWeights.normalized_prefactor(stats)
    else:
        env = cf.EnvelopeWeights(1.0, 1.0)
    xs = config.screen.xs()
    z_dip = cl.dip_width(geom.d, geom.k, geom.D)
    chunks = np.array_split(xs, max(1, min(threads, xs.size)))
    args = [(geom, stats, config.spin_mode, env, chunk, config.coulomb_enabled,
             config.depth, z_dip, config.spread_average, config.sigma_k_rel,
             config.spread_samples, config.seed) for chunk in chunks]
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda a: _compose_chunk(*a), args))
    else:
        parts = [_compose_chunk(*a) for a in args]
    delta = np.concatenate([p[0] for p in parts])
    g2_fermi = np.concatenate([p[1] for p in parts])
    envelope = np.concatenate([p[2] for p in parts])
    columns = {
        "x_m": xs,
        "theta_rad": np.arctan2(xs, geom.D),
        "delta_rad": delta,
        "g2_fermi": g2_fermi,
        "envelope": envelope,
        "g2_total": g2_fermi * envelope,
    }
    _emit(_out_stem(out), config, columns,
          extra_derived={"coulomb_on": config.coulomb_enabled, "depth": config.depth,
                         "threads": threads})
    return EXIT_OK


def cmd_sweep(config: RunConfig, out: str, parameter: str | None,
              values: list | None) -> int:
    if parameter is None:
        if config.sweep_parameter is None:
            raise _CliError("no sweep parameter: pass --param/--values or a 'sweep' config block")
        param = config.sweep_parameter
        vals = list(config.sweep_values)
    else:
        try:
            param = SweepParameter(parameter)
        except ValueError:
            raise _CliError(f"unknown sweep parameter {parameter!r}") from None
        if not values:
            raise _CliError("--param requires --values")
        vals = values
    if not vals:
        raise _CliError("empty sweep value list")

    geom = config.geometry
    rows = {"value": [], "lambda_sp_m": [], "z_dip_m": [], "fringe_count": [],
            "visibility": []}
    for v in vals:
        try:
            if param is SweepParameter.D_TIP:
                g = Geometry(d=v, D=geom.D, k=geom.k)
                stats = config.stats
            elif param is SweepParameter.K:
                g = Geometry(d=geom.d, D=geom.D, k=v)
                stats = config.stats
            elif param is SweepParameter.D_SCREEN:
                g = Geometry(d=geom.d, D=v, k=geom.k)
                stats = config.stats
            else:
                g = geom
                stats = cf.poissonian_stats(v)
        except ValueError as exc:
            raise _CliError(f"sweep value {v!r}: {exc}") from exc
        rows["value"].append(v)
        rows["lambda_sp_m"].append(spatial_wavelength(g))
        rows["z_dip_m"].append(cl.dip_width(g.d, g.k, g.D))
        rows["fringe_count"].append(cl.fringe_count(g.d))
        rows["visibility"].append(cf.visibility(stats, config.spin_mode)
                                  if (config.spin_mode is cf.SpinMode.POLARIZED_EQUAL
                                      or stats.p1 > 0) else np.nan)

    extra = {"sweep_parameter": param.value, "n_values": len(vals)}
    n = np.asarray(rows["fringe_count"])
    if param is SweepParameter.D_TIP and len(vals) >= 2:
        extra["loglog_slope_fringe_count_vs_d"] = float(
            np.polyfit(np.log(vals), np.log(n), 1)[0])
    if param in (SweepParameter.K, SweepParameter.D_SCREEN):
        extra["fringe_count_rel_spread"] = float((n.max() - n.min()) / n.min())
    if param is SweepParameter.MU:
        vis = np.asarray(rows["visibility"])
        extra["visibility_rel_spread"] = float((vis.max() - vis.min()) / vis.min())
    _emit(_out_stem(out), config, {k: np.asarray(v, dtype=float) for k, v in rows.items()},
          extra_derived=extra)
    return EXIT_OK


def cmd_oracle(config: RunConfig, out: str, points: int = 17) -> int:
    from .fock import DirectionGrid, FockEngine
    from .geometry import DetectorPosition, phase_delta

    if points < 3:
        raise _CliError("oracle needs at least 3 grid points")
    if points % 2 == 0:
        points += 1  # keep an on-axis bin for detector 1
    geom = config.geometry
    kd = geom.k * geom.d
    delta_max = min(3.0 * np.pi, 0.45 * kd)
    theta_max = float(np.arcsin(delta_max / kd))
    grid = DirectionGrid.uniform(np.linspace(-theta_max, theta_max, points))
    engine = FockEngine(geom, grid)
    rho = engine.pair_ensemble(config.stats, max_electrons=2)
    env = cf.EnvelopeWeights(1.0 / points, 1.0 / points)
    det1 = DetectorPosition.from_angle(geom, 0.0)
    deltas, bf_vals, ref_vals = [], [], []
    for theta in grid.thetas:
        if theta == 0.0:
            continue
        det2 = DetectorPosition.from_angle(geom, float(theta))
        deltas.append(phase_delta(geom, det2))
        bf_vals.append(engine.g2_numeric(rho, det1, det2))
        ref_vals.append(cf.g2_total(deltas[-1], config.stats, env,
                                    cf.SpinMode.UNPOLARIZED))
    deltas = np.asarray(deltas)
    bf_vals = np.asarray(bf_vals)
    ref_vals = np.asarray(ref_vals)
    rel = np.abs(bf_vals - ref_vals) / ref_vals
    columns = {"delta_rad": deltas, "g2_fock": bf_vals,
               "g2_closed_form": ref_vals, "rel_diff": rel}
    worst = float(rel.max())
    _emit(_out_stem(out), config, columns,
          extra_derived={"max_rel_diff": worst, "tolerance": ORACLE_TOL,
                         "oracle_agrees": worst < ORACLE_TOL})
    if worst >= ORACLE_TOL:
        print(f"error: oracle disagreement {worst:.3e} >= {ORACLE_TOL:.1e}",
              file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_verify(subset: str, out: str | None) -> int:
    checks = verify_mod.run(subset)
    for check in checks:
        print(check.line())
    failed = [c for c in checks if not c.passed]
    if out is not None:
        stem = _out_stem(out)
        report = {"subset": subset, "passed": not failed,
                  "checks": [asdict(c) for c in checks]}
        with open(stem.with_suffix(".json"), "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing


def _add_run_args(sub):
    sub.add_argument("--config", required=True, help="run config (JSON)")
    sub.add_argument("--out", required=True, help="output stem or .csv path")
    sub.add_argument("--seed", type=int, default=None, help="override the config seed")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker threads for grid evaluation (outputs are "
                          "identical for any value)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="ehbt", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    _add_run_args(subs.add_parser("closed-form", help="fringe curves vs phase"))
    _add_run_args(subs.add_parser("coulomb", help="relative-motion trajectory and dip width"))
    _add_run_args(subs.add_parser("compose", help="fringes times Coulomb envelope"))
    sweep = subs.add_parser("sweep", help="derived quantities over a parameter range")
    _add_run_args(sweep)
    sweep.add_argument("--param", choices=[p.value for p in SweepParameter], default=None)
    sweep.add_argument("--values", default=None,
                       help="comma-separated numbers (with --param)")
    oracle = subs.add_parser("oracle", help="brute-force Fock check of the closed form")
    _add_run_args(oracle)
    oracle.add_argument("--points", type=int, default=17,
                        help="direction bins (odd; one per phase sample)")
    verify = subs.add_parser("verify", help="run the self-check suites")
    verify.add_argument("subset", choices=["fock", "closed-form", "coulomb", "all"])
    verify.add_argument("--out", default=None, help="also write a JSON report")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            return cmd_verify(args.subset, args.out)
        config = RunConfig.load(args.config)
        if args.seed is not None:
            config = config.with_seed(args.seed)
        if args.command == "closed-form":
            return cmd_closed_form(config, args.out)
        if args.command == "coulomb":
            return cmd_coulomb(config, args.out)
        if args.threads < 1:
            raise _CliError("--threads must be at least 1")
        if args.command == "compose":
            return cmd_compose(config, args.out, threads=args.threads)
        if args.command == "sweep":
            values = None
            if args.values is not None:
                try:
                    values = [float(v) for v in args.values.split(",") if v.strip()]
                except ValueError:
                    raise _CliError(f"bad --values list: {args.values!r}") from None
            return cmd_sweep(config, args.out, args.param, values)
        if args.command == "oracle":
            return cmd_oracle(config, args.out, points=args.points)
        raise AssertionError(args.command)
    except (_CliError, ConfigError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
