"""Composition of the fermionic fringe pattern with the Coulomb dip.

Detector 1 sits on the optical axis; the pattern is sampled over detector
2's screen coordinate ``x``, which is therefore also the detector
separation entering the dip envelope.  The repulsion dip is modelled as
an inverted normal distribution in screen space with FWHM equal to the
dip width; phase-space plots convert the axis, never the envelope.
"""

from dataclasses import dataclass, field

import numpy as np

from . import closed_form as cf
from .coulomb import dip_width, fringe_count, sample_dip_widths
from .geometry import Geometry, screen_to_phase

#: FWHM = _FWHM_SIGMA * sigma for a normal profile.
_FWHM_SIGMA = 2.0 * np.sqrt(2.0 * np.log(2.0))


@dataclass(frozen=True)
class ScreenGrid:
    """Uniform sampling of detector 2's screen coordinate."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.x_min >= self.x_max:
            raise ValueError("x_min must be below x_max")
        if self.n_points < 2:
            raise ValueError("need at least two grid points")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


def spatial_wavelength(geom: Geometry) -> float:
    """Fringe period on the screen: 2 pi D / (k d) [m]."""
    return 2.0 * np.pi * geom.D / (geom.k * geom.d)


def dip_envelope(x_rel, z_dip: float, depth: float = 1.0):
    """Suppression factor 1 - depth * exp(-x_rel^2 / (2 sigma^2)).

    ``z_dip`` is the FWHM of the inverted-normal dip, so
    sigma = z_dip / (2 sqrt(2 ln 2)).
    """
    if z_dip <= 0:
        raise ValueError("z_dip must be positive")
    if not 0.0 <= depth <= 1.0:
        raise ValueError("depth must lie in [0, 1]")
    x_rel = np.asarray(x_rel, dtype=float)
    sigma = z_dip / _FWHM_SIGMA
    out = 1.0 - depth * np.exp(-(x_rel**2) / (2.0 * sigma**2))
    return out if out.ndim else float(out)


def spread_averaged_envelope(x_rel, geom: Geometry, sigma_k_rel: float,
                             depth: float, n_samples: int, seed: int):
    """Dip envelope averaged over a normal wave-vector spread.

    Monte Carlo average of the single-k envelope over dip widths drawn
    for k ~ Normal(k, sigma_k_rel * k); deterministic under a fixed seed.
    """
    widths = sample_dip_widths(geom.d, geom.k, sigma_k_rel, geom.D,
                               max(100, n_samples), seed)
    x_rel = np.atleast_1d(np.asarray(x_rel, dtype=float))
    sigmas = widths / _FWHM_SIGMA
    acc = np.zeros_like(x_rel)
    for s in sigmas:
        acc += np.exp(-(x_rel**2) / (2.0 * s * s))
    return 1.0 - depth * acc / sigmas.size


@dataclass
class PatternSeries:
    """Sampled correlation pattern plus the derived metadata of the run."""

    x: np.ndarray
    theta: np.ndarray
    delta: np.ndarray
    g2_fermi: np.ndarray
    envelope: np.ndarray
    g2_total: np.ndarray
    geom: Geometry
    stats: cf.SourceStatistics
    spin_mode: cf.SpinMode
    coulomb_on: bool
    depth: float
    z_dip: float
    lambda_sp: float
    fringe_n: float
    visibility: float | None
    extras: dict = field(default_factory=dict)


def _g2_curve(geom, stats, spin_mode, xs, env):
    delta = screen_to_phase(geom, xs)
    return delta, cf.g2_total(delta, stats, env, spin_mode)


def compose_pattern(geom: Geometry, stats: cf.SourceStatistics,
                    spin_mode: cf.SpinMode, grid: ScreenGrid,
                    coulomb_on: bool = True, depth: float = 1.0,
                    env: cf.EnvelopeWeights | None = None) -> PatternSeries:
    """Fringe pattern times Coulomb envelope over the screen grid.

    ``g2_fermi`` uses the standard plotting normalization (overall
    prefactor 2) unless explicit envelope weights are given; with
    ``coulomb_on=False`` the envelope column is identically one and the
    series is the bare closed-form curve.
    """
    if env is None:
        if stats.p1 > 0:
            env = cf.EnvelopeWeights.normalized_prefactor(stats)
        else:
            env = cf.EnvelopeWeights(1.0, 1.0)
    xs = grid.xs()
    delta, g2_fermi = _g2_curve(geom, stats, spin_mode, xs, env)
    z_dip = dip_width(geom.d, geom.k, geom.D)
    if coulomb_on:
        envelope = dip_envelope(xs, z_dip, depth)
    else:
        envelope = np.ones_like(xs)
    vis = None
    if spin_mode is cf.SpinMode.POLARIZED_EQUAL or stats.p1 > 0:
        vis = cf.visibility(stats, spin_mode)
    return PatternSeries(
        x=xs,
        theta=np.arctan2(xs, geom.D),
        delta=delta,
        g2_fermi=g2_fermi,
        envelope=envelope,
        g2_total=g2_fermi * envelope,
        geom=geom,
        stats=stats,
        spin_mode=spin_mode,
        coulomb_on=coulomb_on,
        depth=depth,
        z_dip=z_dip,
        lambda_sp=spatial_wavelength(geom),
        fringe_n=fringe_count(geom.d),
        visibility=vis,
    )


def count_dip_maxima(series: PatternSeries) -> int:
    """Strict local maxima of g2_total inside the dip FWHM |x| < z_dip/2."""
    y = series.g2_total
    interior = (np.abs(series.x) < series.z_dip / 2.0)[1:-1]
    peaks = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]) & interior
    return int(np.count_nonzero(peaks))
