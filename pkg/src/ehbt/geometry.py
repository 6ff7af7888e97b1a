"""Experiment geometry and phase bookkeeping.

Two pulsed point sources a distance ``d`` apart face a detection screen a
distance ``D`` away (far field, ``D >> d``).  A detector at polar angle
``theta`` from the optical axis sees a path difference ``d*sin(theta)``
between the two sources, i.e. a phase difference ``k*d*sin(theta)``.

The wave-vector magnitude ``k`` is the canonical spectral parameter; the
de Broglie wavelength is always derived as ``2*pi/k``.  The exact mapping
``sin(theta) = x/sqrt(x^2 + D^2)`` is used everywhere; the small-angle
form ``delta ~ k*d*x/D`` appears only in documentation.
"""

from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, CODATA

#: Minimum screen-distance to tip-separation ratio for the far-field model.
FAR_FIELD_MIN_RATIO = 1.0e4

#: Non-relativistic guard: centre-of-mass speed must stay below c/10.
MAX_CMS_SPEED = 0.1 * C_LIGHT


@dataclass(frozen=True)
class Geometry:
    """Source separation, screen distance and wave vector, all in SI units.

    Parameters
    ----------
    d : float
        Tip separation [m].
    D : float
        Distance from the source plane to the detection screen [m].
    k : float
        Wave-vector magnitude of the emitted matter wave [1/m].
    """

    d: float
    D: float
    k: float

    def __post_init__(self):
        if self.d <= 0 or self.D <= 0 or self.k <= 0:
            raise ValueError("d, D and k must all be positive")
        if self.D / self.d < FAR_FIELD_MIN_RATIO:
            raise ValueError(
                f"far-field assumption violated: D/d = {self.D / self.d:.3g} "
                f"< {FAR_FIELD_MIN_RATIO:.0e}"
            )
        if self.v_cms >= MAX_CMS_SPEED:
            raise ValueError(
                f"non-relativistic regime violated: v_cms = {self.v_cms:.3g} m/s "
                f">= c/10"
            )

    @property
    def wavelength(self) -> float:
        """de Broglie wavelength 2*pi/k [m]."""
        return 2.0 * np.pi / self.k

    @property
    def v_cms(self) -> float:
        """Centre-of-mass speed hbar*k/m_e towards the screen [m/s]."""
        return CODATA.hbar * self.k / CODATA.m_e

    @property
    def time_of_flight(self) -> float:
        """Time of flight D/v_cms from sources to screen [s]."""
        return self.D / self.v_cms


@dataclass(frozen=True)
class DetectorPosition:
    """A detector on the screen, kept consistent in both parametrisations.

    ``theta`` is the polar angle from the optical axis and ``x`` the
    transverse screen coordinate; they satisfy
    ``sin(theta) = x / sqrt(x^2 + D^2)`` for the owning geometry.
    Use :meth:`from_angle` or :meth:`from_x` instead of the bare
    constructor.
    """

    theta: float
    x: float

    def __post_init__(self):
        if not abs(self.theta) < np.pi / 2:
            raise ValueError("|theta| must be below pi/2")

    @classmethod
    def from_angle(cls, geom: Geometry, theta: float) -> "DetectorPosition":
        if not abs(theta) < np.pi / 2:
            raise ValueError("|theta| must be below pi/2")
        return cls(theta=float(theta), x=geom.D * np.tan(theta))

    @classmethod
    def from_x(cls, geom: Geometry, x: float) -> "DetectorPosition":
        if not np.isfinite(x):
            raise ValueError("x must be finite")
        return cls(theta=float(np.arctan2(x, geom.D)), x=float(x))


def phase_delta(geom: Geometry, det: DetectorPosition) -> float:
    """Phase difference k*d*sin(theta) between the two sources at ``det``.

    Zero on axis, odd in theta, strictly monotone on (-pi/2, pi/2).
    """
    return geom.k * geom.d * np.sin(det.theta)


def screen_to_phase(geom: Geometry, x):
    """Phase difference for a detector at screen coordinate ``x``.

    Uses the exact relation sin(theta) = x/sqrt(x^2 + D^2); equals
    ``phase_delta`` for the detector constructed from the same ``x``.
    Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    out = geom.k * geom.d * x / np.sqrt(x * x + geom.D * geom.D)
    return out if out.ndim else float(out)


def x_for_phase(geom: Geometry, delta: float) -> float:
    """Screen coordinate at which the phase difference equals ``delta``.

    Inverse of :func:`screen_to_phase`; only phases with
    ``|delta| < k*d`` are reachable on a finite screen.
    """
    kd = geom.k * geom.d
    if abs(delta) >= kd:
        raise ValueError(f"|delta| = {abs(delta):.3g} is not reachable (k*d = {kd:.3g})")
    return float(delta * geom.D / np.sqrt(kd * kd - delta * delta))
