"""Closed-form two-electron correlation functions.

Direct evaluators for the analytic second-order correlation of two
independent two-level-spin electron sources:

* one electron from each source, equal spins: an oscillating
  ``1 - cos(delta)`` term (Pauli antibunching),
* one electron from each source, opposite spins: a flat offset,
* two electrons from one source: a flat offset proportional to ``p0*p2``
  that vanishes for equal spins when both emission envelopes coincide,
* the grand total ``4 p1^2 c1 c2 [2 + p0 p2 / p1^2 - cos(delta)]`` with
  fringe visibility ``1 / (2 + p0 p2 / p1^2)``.

Probability convention (shared with :mod:`ehbt.fock`): ``p1`` is the
probability of a single emission in one specific spin state, ``p2`` the
probability of a double emission in one specific unordered spin pair.
For a Poissonian source this gives ``p0*p2/p1^2 = 1/2`` identically and
hence a fringe visibility of 40%.
"""

import enum
from dataclasses import dataclass

import numpy as np

#: Slack allowed on the probability budget p0 + 2*p1 + 4*p2 <= 1.
_BUDGET_TOL = 1.0e-9


class SpinMode(enum.Enum):
    """Which spin channels of the total correlation are observed."""

    POLARIZED_EQUAL = "polarized_equal"
    UNPOLARIZED = "unpolarized"
    ORTHOGONAL_ONLY = "orthogonal_only"


@dataclass(frozen=True)
class SourceStatistics:
    """Per-branch emission probabilities of one source.

    ``p0``: no emission; ``p1``: one electron in a given spin state (two
    such branches); ``p2``: two electrons in a given unordered spin pair
    (four ordered labelings, two of which are Pauli-suppressed for equal
    envelopes).
    """

    p0: float
    p1: float
    p2: float

    def __post_init__(self):
        if self.p0 < 0 or self.p1 < 0 or self.p2 < 0:
            raise ValueError("emission probabilities must be non-negative")
        budget = self.p0 + 2.0 * self.p1 + 4.0 * self.p2
        if budget > 1.0 + _BUDGET_TOL:
            raise ValueError(f"probability budget exceeded: p0 + 2 p1 + 4 p2 = {budget}")

    @property
    def offset_ratio(self) -> float:
        """p0*p2/p1^2, the flat-offset to fringe-amplitude ratio."""
        if self.p1 == 0:
            raise ZeroDivisionError("offset_ratio undefined for p1 = 0")
        return self.p0 * self.p2 / self.p1**2


def poissonian_stats(mu: float) -> SourceStatistics:
    """Per-branch statistics of a Poissonian source with mean ``mu``.

    The Poisson weights exp(-mu) * mu^n / n! are split uniformly over the
    two spin branches (n=1) and four ordered spin pairs (n=2), giving
    p0*p2/p1^2 = 1/2 for every mu > 0.
    """
    if mu < 0:
        raise ValueError("mu must be non-negative")
    w = np.exp(-mu)
    return SourceStatistics(p0=w, p1=mu * w / 2.0, p2=mu**2 * w / 8.0)


@dataclass(frozen=True)
class EnvelopeWeights:
    """Detected emission-envelope weights |C(k1)|^2, |C(k2)|^2."""

    c1sq: float
    c2sq: float

    def __post_init__(self):
        if self.c1sq < 0 or self.c2sq < 0:
            raise ValueError("envelope weights must be non-negative")

    @classmethod
    def normalized_prefactor(cls, stats: SourceStatistics, target: float = 2.0) -> "EnvelopeWeights":
        """Weights chosen so the overall prefactor 4*p1^2*c1sq*c2sq equals ``target``.

        This is the plotting convention used for all shipped pattern
        outputs.  Requires p1 > 0.
        """
        if stats.p1 <= 0:
            raise ValueError("prefactor normalization requires p1 > 0")
        c = np.sqrt(target / (4.0 * stats.p1**2))
        return cls(c1sq=c, c2sq=c)

    @property
    def product(self) -> float:
        return self.c1sq * self.c2sq


def g2_equal_spin_p1sq(delta, stats: SourceStatistics, env: EnvelopeWeights):
    """One electron from each source, equal spins: 4 p1^2 c1 c2 [1 - cos(delta)]."""
    delta = np.asarray(delta, dtype=float)
    out = 4.0 * stats.p1**2 * env.product * (1.0 - np.cos(delta))
    return out if out.ndim else float(out)


def g2_unequal_spin_p1sq(delta, stats: SourceStatistics, env: EnvelopeWeights):
    """One electron from each source, opposite spins: flat 4 p1^2 c1 c2."""
    delta = np.asarray(delta, dtype=float)
    out = np.full_like(delta, 4.0 * stats.p1**2 * env.product)
    return out if out.ndim else float(out)


def g2_same_source(
    delta,
    stats: SourceStatistics,
    env: EnvelopeWeights,
    equal_envelopes: bool = True,
) -> tuple:
    """Both electrons from one source, split by spin configuration.

    Returns ``(equal_spin, unequal_spin)``, both independent of delta.
    For identical emission envelopes the equal-spin part is exactly zero
    (a source cannot emit two identical electrons); the unequal-spin part
    is 4 p0 p2 c1 c2.  With ``equal_envelopes=False`` the equal-spin part
    is evaluated for orthogonal envelopes with equal detector weights and
    no phase cross-term, where it equals the unequal-spin offset.
    """
    delta = np.asarray(delta, dtype=float)
    offset = 4.0 * stats.p0 * stats.p2 * env.product
    unequal = np.full_like(delta, offset)
    if equal_envelopes:
        equal = np.zeros_like(delta)
    else:
        equal = np.full_like(delta, offset)
    if delta.ndim:
        return equal, unequal
    return float(equal), float(unequal)


def g2_total(delta, stats: SourceStatistics, env: EnvelopeWeights, spin_mode: SpinMode):
    """Total correlation for the requested spin observation mode.

    unpolarized:      4 c1 c2 [p1^2 (2 - cos(delta)) + p0 p2]
    polarized_equal:  4 p1^2 c1 c2 [1 - cos(delta)]
    orthogonal_only:  4 (p1^2 + p0 p2) c1 c2

    The unpolarized form is evaluated without dividing by p1^2, so the
    p1 = 0 limit returns the p0*p2 offset alone.
    """
    delta = np.asarray(delta, dtype=float)
    if spin_mode is SpinMode.POLARIZED_EQUAL:
        out = 4.0 * stats.p1**2 * env.product * (1.0 - np.cos(delta))
    elif spin_mode is SpinMode.ORTHOGONAL_ONLY:
        out = np.full_like(delta, 4.0 * (stats.p1**2 + stats.p0 * stats.p2) * env.product)
    elif spin_mode is SpinMode.UNPOLARIZED:
        out = 4.0 * env.product * (
            stats.p1**2 * (2.0 - np.cos(delta)) + stats.p0 * stats.p2
        )
    else:
        raise ValueError(f"unknown spin mode {spin_mode!r}")
    return out if out.ndim else float(out)


def visibility(stats: SourceStatistics, spin_mode: SpinMode) -> float:
    """Fringe contrast (max - min)/(max + min) of the total correlation.

    1 for polarized single-spin detection, 1/(2 + p0 p2/p1^2) for
    unpolarized detection, 0 for orthogonal-spin detection (no fringes).
    """
    if spin_mode is SpinMode.POLARIZED_EQUAL:
        return 1.0
    if stats.p1 <= 0:
        raise ValueError(f"visibility in mode {spin_mode.value} requires p1 > 0")
    if spin_mode is SpinMode.UNPOLARIZED:
        return 1.0 / (2.0 + stats.offset_ratio)
    if spin_mode is SpinMode.ORTHOGONAL_ONLY:
        return 0.0
    raise ValueError(f"unknown spin mode {spin_mode!r}")


def g2_bosonic_reference(delta, prefactor: float = 2.0):
    """Single-boson-emitter pattern prefactor*[1 + cos(delta)].

    The bosonic counterpart of the polarized fermionic fringe: maximal at
    delta = 0 (bunching) and equal to the fermionic curve shifted by pi.
    """
    delta = np.asarray(delta, dtype=float)
    out = prefactor * (1.0 + np.cos(delta))
    return out if out.ndim else float(out)
