"""Run configuration files and reproducibility manifests.

A run is described by one JSON file with nested blocks (geometry,
source, spin, coulomb, integrator, screen, optional sweep).  Parsing is
strict: unknown keys anywhere are errors, exactly one of ``mu`` or the
explicit probability triple must be present, and every value is pushed
through the owning module's validation on load, so a config that loads
is a config that runs.

Every output file is accompanied by a manifest recording the resolved
config, the derived physical quantities, the tool version and a
timestamp.  Re-running a manifest's config with its seed reproduces the
data files byte for byte (the timestamp is the one manifest field that
differs between runs).
"""

import enum
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from . import closed_form as cf
from .coulomb import IntegratorConfig, dip_width, fringe_count
from .geometry import Geometry, screen_to_phase
from .pattern import ScreenGrid, spatial_wavelength

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class SweepParameter(enum.Enum):
    D_TIP = "d"
    K = "k"
    D_SCREEN = "D"
    MU = "mu"


def _check_keys(block: dict, allowed: set, where: str):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _get(block: dict, key: str, where: str, kind, required: bool = True, default=None):
    if key not in block:
        if required:
            raise ConfigError(f"missing key '{key}' in {where}")
        return default
    value = block[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}.{key} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}.{key} must be an integer")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}.{key} must be a boolean")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}.{key} must be a string")
        return value
    raise AssertionError(kind)


def _optional_float(block, key, where):
    if key not in block or block[key] is None:
        return None
    return _get(block, key, where, float)


@dataclass(frozen=True)
class RunConfig:
    """Validated, fully resolved run description."""

    seed: int
    geometry: Geometry
    stats: cf.SourceStatistics
    mu: float | None
    spin_mode: cf.SpinMode
    coulomb_enabled: bool
    depth: float
    sigma_k_rel: float
    spread_average: bool
    spread_samples: int
    integrator: IntegratorConfig
    screen: ScreenGrid
    sweep_parameter: SweepParameter | None = None
    sweep_values: tuple = ()
    extras: dict = field(default_factory=dict)

    # -- parsing -----------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        _check_keys(data, {"schema_version", "seed", "geometry", "source", "spin",
                           "coulomb", "integrator", "screen", "sweep"}, "config")
        version = _get(data, "schema_version", "config", int)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})")
        seed = _get(data, "seed", "config", int)
        if not -(2**63) <= seed < 2**63:
            raise ConfigError("seed must fit a 64-bit integer")

        geo = data.get("geometry")
        if not isinstance(geo, dict):
            raise ConfigError("missing 'geometry' block")
        _check_keys(geo, {"d_m", "D_m", "k_per_m"}, "geometry")
        try:
            geometry = Geometry(d=_get(geo, "d_m", "geometry", float),
                                D=_get(geo, "D_m", "geometry", float),
                                k=_get(geo, "k_per_m", "geometry", float))
        except ValueError as exc:
            raise ConfigError(f"geometry: {exc}") from exc

        src = data.get("source")
        if not isinstance(src, dict):
            raise ConfigError("missing 'source' block")
        _check_keys(src, {"mu", "p0", "p1", "p2"}, "source")
        has_mu = "mu" in src
        has_p = any(k in src for k in ("p0", "p1", "p2"))
        if has_mu == has_p:
            raise ConfigError("source must contain exactly one of 'mu' or 'p0'/'p1'/'p2'")
        try:
            if has_mu:
                mu = _get(src, "mu", "source", float)
                stats = cf.poissonian_stats(mu)
            else:
                mu = None
                stats = cf.SourceStatistics(p0=_get(src, "p0", "source", float),
                                            p1=_get(src, "p1", "source", float),
                                            p2=_get(src, "p2", "source", float))
        except ValueError as exc:
            raise ConfigError(f"source: {exc}") from exc

        spin = data.get("spin")
        if not isinstance(spin, dict):
            raise ConfigError("missing 'spin' block")
        _check_keys(spin, {"mode"}, "spin")
        mode_name = _get(spin, "mode", "spin", str)
        try:
            spin_mode = cf.SpinMode(mode_name)
        except ValueError:
            valid = ", ".join(m.value for m in cf.SpinMode)
            raise ConfigError(f"spin.mode must be one of: {valid}") from None

        cou = data.get("coulomb", {})
        if not isinstance(cou, dict):
            raise ConfigError("'coulomb' must be a block")
        _check_keys(cou, {"enabled", "depth", "sigma_k_rel", "spread_average",
                          "spread_samples"}, "coulomb")
        coulomb_enabled = _get(cou, "enabled", "coulomb", bool, required=False, default=True)
        depth = _get(cou, "depth", "coulomb", float, required=False, default=1.0)
        if not 0.0 <= depth <= 1.0:
            raise ConfigError("coulomb.depth must lie in [0, 1]")
        sigma_k_rel = _get(cou, "sigma_k_rel", "coulomb", float, required=False, default=0.005)
        if not 0.0 < sigma_k_rel < 0.2:
            raise ConfigError("coulomb.sigma_k_rel must lie in (0, 0.2)")
        spread_average = _get(cou, "spread_average", "coulomb", bool,
                              required=False, default=False)
        spread_samples = _get(cou, "spread_samples", "coulomb", int,
                              required=False, default=256)
        if spread_samples < 100:
            raise ConfigError("coulomb.spread_samples must be at least 100")

        integ = data.get("integrator", {})
        if not isinstance(integ, dict):
            raise ConfigError("'integrator' must be a block")
        _check_keys(integ, {"dt_s", "t_max_s", "v_tol", "z_stop_m", "window"}, "integrator")
        try:
            integrator = IntegratorConfig(
                dt=_optional_float(integ, "dt_s", "integrator"),
                t_max=_optional_float(integ, "t_max_s", "integrator"),
                v_tol=_get(integ, "v_tol", "integrator", float, required=False, default=1.0e-6),
                z_stop=_optional_float(integ, "z_stop_m", "integrator"),
                window=_get(integ, "window", "integrator", int, required=False, default=1000),
            )
        except ValueError as exc:
            raise ConfigError(f"integrator: {exc}") from exc

        scr = data.get("screen")
        if not isinstance(scr, dict):
            raise ConfigError("missing 'screen' block")
        _check_keys(scr, {"x_min_m", "x_max_m", "n_points"}, "screen")
        try:
            screen = ScreenGrid(x_min=_get(scr, "x_min_m", "screen", float),
                                x_max=_get(scr, "x_max_m", "screen", float),
                                n_points=_get(scr, "n_points", "screen", int))
        except ValueError as exc:
            raise ConfigError(f"screen: {exc}") from exc

        sweep_parameter = None
        sweep_values: tuple = ()
        if "sweep" in data:
            sw = data["sweep"]
            if not isinstance(sw, dict):
                raise ConfigError("'sweep' must be a block")
            _check_keys(sw, {"parameter", "values"}, "sweep")
            try:
                sweep_parameter = SweepParameter(_get(sw, "parameter", "sweep", str))
            except ValueError:
                valid = ", ".join(p.value for p in SweepParameter)
                raise ConfigError(f"sweep.parameter must be one of: {valid}") from None
            values = sw.get("values")
            if (not isinstance(values, list) or not values
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                               for v in values)):
                raise ConfigError("sweep.values must be a non-empty list of numbers")
            sweep_values = tuple(float(v) for v in values)

        return cls(seed=seed, geometry=geometry, stats=stats, mu=mu,
                   spin_mode=spin_mode, coulomb_enabled=coulomb_enabled, depth=depth,
                   sigma_k_rel=sigma_k_rel, spread_average=spread_average,
                   spread_samples=spread_samples, integrator=integrator, screen=screen,
                   sweep_parameter=sweep_parameter, sweep_values=sweep_values)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(data)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        source = ({"mu": self.mu} if self.mu is not None
                  else {"p0": self.stats.p0, "p1": self.stats.p1, "p2": self.stats.p2})
        out = {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "geometry": {"d_m": self.geometry.d, "D_m": self.geometry.D,
                         "k_per_m": self.geometry.k},
            "source": source,
            "spin": {"mode": self.spin_mode.value},
            "coulomb": {"enabled": self.coulomb_enabled, "depth": self.depth,
                        "sigma_k_rel": self.sigma_k_rel,
                        "spread_average": self.spread_average,
                        "spread_samples": self.spread_samples},
            "integrator": {"dt_s": self.integrator.dt, "t_max_s": self.integrator.t_max,
                           "v_tol": self.integrator.v_tol,
                           "z_stop_m": self.integrator.z_stop,
                           "window": self.integrator.window},
            "screen": {"x_min_m": self.screen.x_min, "x_max_m": self.screen.x_max,
                       "n_points": self.screen.n_points},
        }
        if self.sweep_parameter is not None:
            out["sweep"] = {"parameter": self.sweep_parameter.value,
                            "values": list(self.sweep_values)}
        return out

    def with_seed(self, seed: int) -> "RunConfig":
        return RunConfig.from_dict({**self.to_dict(), "seed": seed})

    # -- derived quantities ----------------------------------------------------

    def derived(self) -> dict:
        """Physical quantities implied by the config, for the manifest."""
        geom = self.geometry
        xs = np.array([self.screen.x_min, self.screen.x_max])
        deltas = screen_to_phase(geom, xs)
        vis = None
        if self.spin_mode is cf.SpinMode.POLARIZED_EQUAL or self.stats.p1 > 0:
            vis = cf.visibility(self.stats, self.spin_mode)
        return {
            "wavelength_m": geom.wavelength,
            "v_cms_m_per_s": geom.v_cms,
            "t_f_s": geom.time_of_flight,
            "lambda_sp_m": spatial_wavelength(geom),
            "z_dip_m": dip_width(geom.d, geom.k, geom.D),
            "fringe_count": fringe_count(geom.d),
            "visibility": vis,
            "delta_min_rad": float(deltas[0]),
            "delta_max_rad": float(deltas[1]),
        }


def build_manifest(config: RunConfig, outputs: dict | None = None,
                   extra_derived: dict | None = None) -> dict:
    """Assemble the manifest dict written alongside every output file."""
    derived = config.derived()
    if extra_derived:
        derived.update(extra_derived)
    return {
        "tool": "ehbt",
        "tool_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": config.to_dict(),
        "derived": derived,
        "outputs": outputs or {},
    }


def write_manifest(path, manifest: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
