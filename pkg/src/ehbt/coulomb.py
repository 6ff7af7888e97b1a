"""Semiclassical estimate of the mutual Coulomb repulsion.

Two electrons leave the two tips simultaneously with parallel momenta, so
in the relative frame the problem is one-dimensional: a single coordinate
``z`` (their separation) starting at the tip distance ``d0`` with zero
relative velocity.  Subtracting the two Newton equations gives

    z_dd = e^2 / (2 pi eps0 m_e z^2),

i.e. the relative motion carries the reduced mass m_e/2.  Energy
conservation then fixes the asymptotic relative speed

    v_end = sqrt(e^2 / (pi eps0 m_e d0)),

which is the independent oracle every numerical result here is checked
against.  The equation of motion is integrated with velocity Verlet; the
acceleration happens on the scale d0/v_end, orders of magnitude shorter
than the time of flight to the screen, so the detector-plane separation
is simply v_end times the time of flight.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .constants import CODATA

#: Coulomb constant e^2/(4 pi eps0) [N m^2].
_KAPPA = CODATA.coulomb_prefactor
#: Reduced mass of the two-electron relative coordinate [kg].
_MU = CODATA.m_e / 2.0
#: Acceleration constant in z_dd = A / z^2 [m^3/s^2].
_ACCEL = _KAPPA / _MU

#: The trailing-window convergence test only counts once z > 100 * d0.
Z_FLOOR_RATIO = 100.0


class NonConvergedError(RuntimeError):
    """Integration budget exhausted; carries the partial trajectory."""

    def __init__(self, message: str, trajectory: "Trajectory"):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class IntegratorConfig:
    """Velocity-Verlet driver controls.

    ``None`` fields are resolved per run: dt defaults to
    d0/(1e4 * v_end) so the fast initial acceleration is resolved by
    ~1e4 steps, z_stop to 1e4 * d0, and t_max to a generous multiple of
    the expected crossing time.
    """

    dt: float | None = None
    t_max: float | None = None
    v_tol: float = 1.0e-6
    z_stop: float | None = None
    window: int = 1000

    def __post_init__(self):
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_max is not None and self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if not 0.0 < self.v_tol < 1.0:
            raise ValueError("v_tol must lie in (0, 1)")
        if self.z_stop is not None and self.z_stop <= 0:
            raise ValueError("z_stop must be positive")
        if self.window < 1:
            raise ValueError("window must be at least one step")


@dataclass
class Trajectory:
    """Sampled relative-coordinate trajectory and integration diagnostics."""

    d0: float
    dt: float
    times: np.ndarray
    z: np.ndarray
    v: np.ndarray
    status: str            # "window", "z_stop" or "budget"
    converged: bool
    n_steps: int
    max_energy_drift: float

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def z_end(self) -> float:
        return float(self.z[-1])

    @property
    def v_end(self) -> float:
        return float(self.v[-1])

    def energy_drift(self) -> np.ndarray:
        """Relative total-energy drift at each stored sample."""
        e0 = _KAPPA / self.d0
        e = 0.5 * _MU * self.v**2 + _KAPPA / self.z
        return np.abs(e - e0) / e0


@dataclass(frozen=True)
class DipResult:
    """Asymptotic velocity and derived detector-plane dip width."""

    v_rel_end: float
    t_f: float
    v_cms: float
    z_dip: float
    t_99: float

    def __post_init__(self):
        for name in ("v_rel_end", "t_f", "v_cms", "z_dip", "t_99"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def coulomb_force(r1, r2) -> np.ndarray:
    """Force on the electron at ``r1`` due to the one at ``r2`` [N].

    e^2/(4 pi eps0) * (r1 - r2)/|r1 - r2|^3; antisymmetric under particle
    exchange.  Coincident positions are rejected.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    sep = r1 - r2
    dist = np.linalg.norm(sep)
    if dist == 0.0:
        raise ValueError("coincident electron positions")
    return _KAPPA * sep / dist**3


def end_velocity_closed_form(d0):
    """Asymptotic relative speed sqrt(e^2/(pi eps0 m_e d0)) [m/s]."""
    d0 = np.asarray(d0, dtype=float)
    if np.any(d0 <= 0):
        raise ValueError("initial separation must be positive")
    out = np.sqrt(CODATA.e**2 / (np.pi * CODATA.eps0 * CODATA.m_e * d0))
    return out if out.ndim else float(out)


def energy_velocity(d0: float, z) -> float:
    """Exact relative speed at separation ``z`` from energy conservation."""
    z = np.asarray(z, dtype=float)
    out = np.sqrt(2.0 * _ACCEL * (1.0 / d0 - 1.0 / z))
    return out if out.ndim else float(out)


@njit(cache=True)
def _verlet_kernel(z0, dt, max_steps, stride, v_tol, window, z_floor, z_stop,
                   ts, zs, vs):
    kappa = _KAPPA
    mu = _MU
    accel = _ACCEL
    e0 = kappa / z0
    inv_e0 = 1.0 / e0
    z = z0
    v = 0.0
    a = accel / (z * z)
    max_drift = 0.0
    ts[0] = 0.0
    zs[0] = z0
    vs[0] = 0.0
    n_samp = 1
    last_recorded = 0
    v_window_prev = 0.0
    status = 2
    step = 0
    while step < max_steps:
        vh = v + 0.5 * dt * a
        z = z + dt * vh
        a = accel / (z * z)
        v = vh + 0.5 * dt * a
        step += 1
        drift = abs(0.5 * mu * v * v + kappa / z - e0) * inv_e0
        if drift > max_drift:
            max_drift = drift
        if step % stride == 0 and n_samp < ts.size:
            ts[n_samp] = dt * step
            zs[n_samp] = z
            vs[n_samp] = v
            n_samp += 1
            last_recorded = step
        if z >= z_stop:
            status = 1
            break
        if step % window == 0:
            if z > z_floor and (v - v_window_prev) < v_tol * v:
                status = 0
                break
            v_window_prev = v
    if last_recorded != step and n_samp < ts.size:
        ts[n_samp] = dt * step
        zs[n_samp] = z
        vs[n_samp] = v
        n_samp += 1
    return status, step, max_drift, n_samp


def integrate_relative(d0: float, cfg: IntegratorConfig | None = None,
                       n_samples: int = 4096) -> Trajectory:
    """Integrate the relative coordinate from rest at separation ``d0``.

    Runs velocity Verlet until the relative-velocity change over a
    trailing window falls below ``v_tol`` (counted only once
    z > 100 * d0) or the separation exceeds ``z_stop``, whichever comes
    first.  Exhausting the time budget raises :class:`NonConvergedError`
    with the partial trajectory attached.
    """
    if d0 <= 0:
        raise ValueError("initial separation must be positive")
    cfg = cfg or IntegratorConfig()
    v_est = end_velocity_closed_form(d0)
    dt = cfg.dt if cfg.dt is not None else d0 / (1.0e4 * v_est)
    z_stop = cfg.z_stop if cfg.z_stop is not None else 1.0e4 * d0
    if z_stop <= d0:
        raise ValueError("z_stop must exceed the initial separation")
    t_max = cfg.t_max if cfg.t_max is not None else (4.0 * z_stop + 100.0 * d0) / v_est
    max_steps = int(np.ceil(t_max / dt))
    expected = int(np.ceil(1.5 * (z_stop / v_est) / dt)) + 8 * cfg.window
    stride = max(1, expected // n_samples)
    cap = expected // stride + 64
    ts = np.empty(cap)
    zs = np.empty(cap)
    vs = np.empty(cap)
    status_code, n_steps, max_drift, n_samp = _verlet_kernel(
        d0, dt, max_steps, stride, cfg.v_tol, cfg.window,
        Z_FLOOR_RATIO * d0, z_stop, ts, zs, vs,
    )
    status = {0: "window", 1: "z_stop", 2: "budget"}[status_code]
    traj = Trajectory(
        d0=d0, dt=dt, times=ts[:n_samp].copy(), z=zs[:n_samp].copy(),
        v=vs[:n_samp].copy(), status=status, converged=status != "budget",
        n_steps=n_steps, max_energy_drift=max_drift,
    )
    if not traj.converged:
        raise NonConvergedError(
            f"no asymptotic velocity within t_max = {t_max:.3e} s "
            f"(reached z = {traj.z_end:.3e} m, v = {traj.v_end:.3e} m/s)",
            traj,
        )
    return traj


def dip_width(d, k, D):
    """Detector-plane dip width v_end * t_f = sqrt(m_e e^2/(hbar^2 pi eps0)) * D/(k sqrt(d))."""
    d = np.asarray(d, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(d <= 0) or np.any(k <= 0) or D <= 0:
        raise ValueError("d, k and D must be positive")
    t_f = D * CODATA.m_e / (CODATA.hbar * k)
    out = end_velocity_closed_form(d) * t_f
    return out if out.ndim else float(out)


def dip_width_numeric(d: float, k: float, D: float,
                      cfg: IntegratorConfig | None = None) -> DipResult:
    """Dip width from the integrated asymptotic velocity.

    Also reports t_99, the time at which the relative speed first
    reaches 99% of its final value; t_99 << t_f validates treating the
    acceleration as instantaneous on the time-of-flight scale.
    """
    traj = integrate_relative(d, cfg)
    v_cms = CODATA.hbar * k / CODATA.m_e
    t_f = D / v_cms
    idx = int(np.searchsorted(traj.v, 0.99 * traj.v_end))
    t_99 = float(traj.times[min(idx, traj.times.size - 1)])
    return DipResult(v_rel_end=traj.v_end, t_f=t_f, v_cms=v_cms,
                     z_dip=traj.v_end * t_f, t_99=t_99)


def fringe_count(d):
    """Number of fringes inside the dip: sqrt(e^2 m_e/(pi eps0 h^2)) * sqrt(d).

    Independent of the wave vector and the screen distance.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("tip separation must be positive")
    out = np.sqrt(CODATA.e**2 * CODATA.m_e / (np.pi * CODATA.eps0 * CODATA.h**2) * d)
    return out if out.ndim else float(out)


def sample_dip_widths(d: float, k0: float, sigma_k_rel: float, D: float,
                      n: int, seed: int) -> np.ndarray:
    """Monte Carlo dip widths for a normal momentum spread around ``k0``.

    Draws k_i ~ Normal(k0, sigma_k_rel * k0), clamped positive by
    redrawing, and maps each through the analytic dip width.
    Deterministic under a fixed seed.
    """
    if not 0.0 < sigma_k_rel < 0.2:
        raise ValueError("sigma_k_rel must lie in (0, 0.2)")
    if n < 100:
        raise ValueError("need at least 100 samples")
    if k0 <= 0:
        raise ValueError("central wave vector must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    ks = rng.normal(k0, sigma_k_rel * k0, size=n)
    bad = ks <= 0
    while np.any(bad):
        ks[bad] = rng.normal(k0, sigma_k_rel * k0, size=int(bad.sum()))
        bad = ks <= 0
    return dip_width(d, ks, D)


def convergence_study(d0: float, dt0: float | None = None, n_halvings: int = 3,
                      z_stop_ratio: float = 500.0) -> dict:
    """End-velocity error versus time step for the Verlet integrator.

    Integrates to a fixed separation z_stop_ratio * d0 (trailing-window
    test disabled) and measures |v_end - v_energy(z_end)|, the deviation
    from the energy-conservation speed at the separation actually
    reached.  That isolates the integration error from the finite-z
    truncation of the asymptote; the log-log slope is ~2 for velocity
    Verlet.
    """
    if dt0 is None:
        dt0 = 8.0 * d0 / (1.0e4 * end_velocity_closed_form(d0))
    dts, errors = [], []
    for i in range(n_halvings + 1):
        dt = dt0 / 2.0**i
        cfg = IntegratorConfig(dt=dt, v_tol=1.0e-15, z_stop=z_stop_ratio * d0)
        traj = integrate_relative(d0, cfg)
        dts.append(dt)
        errors.append(abs(traj.v_end - energy_velocity(d0, traj.z_end)))
    slope = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
    return {"dts": np.array(dts), "errors": np.array(errors), "slope": slope}
