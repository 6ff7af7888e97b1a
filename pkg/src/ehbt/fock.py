"""Brute-force second-quantization engine over discrete emission modes.

The continuum of emission directions is discretized into ``M`` bins, so a
mode is the triple (source, spin, bin) with source and spin in {1, 2}.
The canonical mode order is lexicographic in (source, spin, bin),

    flat = ((source - 1) * 2 + (spin - 1)) * M + bin,

and every fermionic sign in the package derives from this one ordering:
applying a creation or annihilation operator to an occupation-number
basis ket multiplies the amplitude by (-1)^(number of occupied modes
preceding the target mode).

States are sparse maps from occupation keys to complex amplitudes; the
key is an occupation bitmask for fermions and a tuple of small integers
for bosons.  Everything downstream (correlators, the six-path
decomposition) is evaluated by literally applying operators and taking
inner products, which is what makes this module usable as an oracle for
the closed-form results.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import DetectorPosition, Geometry, phase_delta

#: Tolerance on ensemble weight sums and state norms.
_NORM_TOL = 1.0e-12


class StatisticsKind(enum.Enum):
    FERMION = "fermion"
    BOSON = "boson"


@dataclass(frozen=True)
class ModeIndex:
    """One discrete emission mode: which source, which spin, which bin."""

    source: int
    spin: int
    bin: int

    def __post_init__(self):
        if self.source not in (1, 2):
            raise ValueError("source must be 1 or 2")
        if self.spin not in (1, 2):
            raise ValueError("spin must be 1 or 2")
        if self.bin < 0:
            raise ValueError("bin must be non-negative")

    def flat(self, n_bins: int) -> int:
        """Position in the canonical (source, spin, bin) order."""
        if self.bin >= n_bins:
            raise ValueError(f"bin {self.bin} out of range for {n_bins} bins")
        return ((self.source - 1) * 2 + (self.spin - 1)) * n_bins + self.bin


@dataclass(frozen=True)
class DirectionGrid:
    """Discretized emission directions with a normalized complex envelope."""

    thetas: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "amplitudes", amps)
        if thetas.ndim != 1 or thetas.size < 2:
            raise ValueError("need at least two direction bins")
        if amps.shape != thetas.shape:
            raise ValueError("envelope and angle arrays must have the same length")
        if np.any(np.diff(thetas) <= 0):
            raise ValueError("bin angles must be strictly increasing")
        norm = np.sum(np.abs(amps) ** 2)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"emission envelope not normalized: sum |C|^2 = {norm}")

    @classmethod
    def uniform(cls, thetas) -> "DirectionGrid":
        """Flat envelope C_m = 1/sqrt(M) over the given angles."""
        thetas = np.asarray(thetas, dtype=float)
        amps = np.full(thetas.shape, 1.0 / np.sqrt(thetas.size), dtype=complex)
        return cls(thetas=thetas, amplitudes=amps)

    @property
    def n_bins(self) -> int:
        return self.thetas.size


class FockState:
    """Sparse occupation-number state with complex amplitudes.

    ``amp`` maps a bitmask (fermions) or an occupation tuple (bosons) to
    a complex amplitude.  The zero state is the empty map.
    """

    __slots__ = ("kind", "n_modes", "amp")

    def __init__(self, kind: StatisticsKind, n_modes: int, amp=None):
        self.kind = kind
        self.n_modes = n_modes
        self.amp = dict(amp) if amp else {}

    @classmethod
    def vacuum(cls, kind: StatisticsKind, n_modes: int) -> "FockState":
        key = 0 if kind is StatisticsKind.FERMION else (0,) * n_modes
        return cls(kind, n_modes, {key: 1.0 + 0.0j})

    @property
    def is_zero(self) -> bool:
        return not self.amp

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amp.values())))

    def normalized(self) -> "FockState":
        """Unit-norm copy; the zero state is returned unchanged."""
        n = self.norm()
        if n == 0.0:
            return FockState(self.kind, self.n_modes)
        return FockState(self.kind, self.n_modes, {k: a / n for k, a in self.amp.items()})

    def inner(self, other: "FockState") -> complex:
        """<self|other> over the shared basis."""
        if len(self.amp) > len(other.amp):
            return complex(np.conj(other.inner(self)))
        return sum(np.conj(a) * other.amp[k] for k, a in self.amp.items() if k in other.amp)

    def particle_number(self) -> int:
        """Total occupation; defined for definite-number states (max over kets)."""
        if not self.amp:
            return 0
        if self.kind is StatisticsKind.FERMION:
            return max(k.bit_count() for k in self.amp)
        return max(sum(k) for k in self.amp)

    def _prune(self) -> "FockState":
        self.amp = {k: a for k, a in self.amp.items() if a != 0.0}
        return self


def _ferm_sign(key: int, mode: int) -> float:
    """(-1)^(occupied modes preceding `mode` in the canonical order)."""
    return -1.0 if (key & ((1 << mode) - 1)).bit_count() & 1 else 1.0


def apply_creation(state: FockState, mode: int) -> FockState:
    """Apply a creation operator on ``mode``; the zero state is a valid result."""
    out = FockState(state.kind, state.n_modes)
    acc = out.amp
    if state.kind is StatisticsKind.FERMION:
        bit = 1 << mode
        for key, a in state.amp.items():
            if not key & bit:
                nk = key | bit
                acc[nk] = acc.get(nk, 0.0j) + _ferm_sign(key, mode) * a
    else:
        for key, a in state.amp.items():
            n = key[mode]
            nk = key[:mode] + (n + 1,) + key[mode + 1:]
            acc[nk] = acc.get(nk, 0.0j) + np.sqrt(n + 1.0) * a
    return out._prune()


def apply_annihilation(state: FockState, mode: int) -> FockState:
    """Apply an annihilation operator on ``mode`` (adjoint of apply_creation)."""
    out = FockState(state.kind, state.n_modes)
    acc = out.amp
    if state.kind is StatisticsKind.FERMION:
        bit = 1 << mode
        for key, a in state.amp.items():
            if key & bit:
                nk = key & ~bit
                acc[nk] = acc.get(nk, 0.0j) + _ferm_sign(nk, mode) * a
    else:
        for key, a in state.amp.items():
            n = key[mode]
            if n:
                nk = key[:mode] + (n - 1,) + key[mode + 1:]
                acc[nk] = acc.get(nk, 0.0j) + np.sqrt(float(n)) * a
    return out._prune()


@dataclass(frozen=True)
class DetectorOperator:
    """Field operator at one detector: sum_l coeff_l * a_(l, spin, bin)."""

    spin: int
    bin: int
    snap_distance: float
    terms: tuple  # ((flat_mode, complex coefficient), ...)


def apply_detector(state: FockState, op: DetectorOperator) -> FockState:
    out = FockState(state.kind, state.n_modes)
    acc = out.amp
    for mode, coeff in op.terms:
        for k, a in apply_annihilation(state, mode).amp.items():
            acc[k] = acc.get(k, 0.0j) + coeff * a
    return out._prune()


@dataclass
class Ensemble:
    """Probabilistic mixture of Fock states over a fixed set of sources.

    A mixture, never a superposition: there is no coherence between
    branches (pulsed emission scrambles the phases between different
    electron-number states).  Branch weights may sum to less than one;
    the remainder is the implicit vacuum / suppressed-channel weight.
    """

    kind: StatisticsKind
    n_modes: int
    sources: frozenset
    branches: list = field(default_factory=list)

    def __post_init__(self):
        total = 0.0
        for w, st in self.branches:
            if w < 0:
                raise ValueError("branch probabilities must be non-negative")
            if st.kind is not self.kind or st.n_modes != self.n_modes:
                raise ValueError("branch state incompatible with ensemble")
            total += w
        if total > 1.0 + _NORM_TOL:
            raise ValueError(f"branch probabilities sum to {total} > 1")

    def weight_sum(self) -> float:
        return float(sum(w for w, _ in self.branches))


def tensor_product(e1: Ensemble, e2: Ensemble, max_electrons: int | None = None) -> Ensemble:
    """Statistically independent combination of two source ensembles.

    Branch pairs multiply their probabilities.  ``max_electrons`` drops
    product branches with more than that many particles in total, which
    realizes the leading-order truncation used by the closed-form
    expressions (orders p1*p2 and p2^2 carry 3 or 4 electrons).
    """
    if e1.kind is not e2.kind or e1.n_modes != e2.n_modes:
        raise ValueError("ensembles are not defined over the same mode space")
    if e1.sources & e2.sources:
        raise ValueError(f"overlapping source indices: {sorted(e1.sources & e2.sources)}")
    fermion = e1.kind is StatisticsKind.FERMION
    branches = []
    for w1, s1 in e1.branches:
        n1 = s1.particle_number()
        for w2, s2 in e2.branches:
            if max_electrons is not None and n1 + s2.particle_number() > max_electrons:
                continue
            prod = FockState(e1.kind, e1.n_modes)
            acc = prod.amp
            if fermion:
                for k1, a1 in s1.amp.items():
                    for k2, a2 in s2.amp.items():
                        if k1 & k2:
                            raise ValueError("product branches occupy a common mode")
                        # Reorder "ops of s1 then ops of s2" into canonical order.
                        swaps = sum((k1 >> (b + 1)).bit_count()
                                    for b in range(e1.n_modes) if (k2 >> b) & 1)
                        sgn = -1.0 if swaps & 1 else 1.0
                        key = k1 | k2
                        acc[key] = acc.get(key, 0.0j) + sgn * a1 * a2
            else:
                for k1, a1 in s1.amp.items():
                    for k2, a2 in s2.amp.items():
                        key = tuple(x + y for x, y in zip(k1, k2))
                        acc[key] = acc.get(key, 0.0j) + a1 * a2
            branches.append((w1 * w2, prod))
    return Ensemble(kind=e1.kind, n_modes=e1.n_modes,
                    sources=e1.sources | e2.sources, branches=branches)


class FockEngine:
    """Second-quantization oracle for one geometry, grid and statistics kind.

    Immutable after construction; every evaluation method is pure, so a
    single engine may be shared across parallel evaluations.
    """

    def __init__(self, geom: Geometry, grid: DirectionGrid,
                 kind: StatisticsKind = StatisticsKind.FERMION):
        self.geom = geom
        self.grid = grid
        self.kind = kind
        self.n_modes = 4 * grid.n_bins

    # -- mode bookkeeping -------------------------------------------------

    def mode(self, source: int, spin: int, bin: int) -> int:
        return ModeIndex(source, spin, bin).flat(self.grid.n_bins)

    def vacuum(self) -> FockState:
        return FockState.vacuum(self.kind, self.n_modes)

    # -- state builders ----------------------------------------------------

    def single_emission(self, source: int, spin: int, envelope=None) -> FockState:
        """One particle from ``source`` with ``spin``: sum_m C_m a^dag_m |0>."""
        env = self.grid.amplitudes if envelope is None else np.asarray(envelope, dtype=complex)
        vac = self.vacuum()
        out = FockState(self.kind, self.n_modes)
        for m in range(self.grid.n_bins):
            created = apply_creation(vac, self.mode(source, spin, m))
            for k, a in created.amp.items():
                out.amp[k] = out.amp.get(k, 0.0j) + env[m] * a
        return out._prune()

    def double_emission(self, source: int, spins: tuple, envelopes=None) -> FockState:
        """Two particles from one source, normalized if nonzero.

        For equal spins and identical envelopes the fermionic state
        cancels exactly and the zero state is returned as-is.
        """
        s, sp = spins
        if envelopes is None:
            env_a = env_b = self.grid.amplitudes
        else:
            env_a = np.asarray(envelopes[0], dtype=complex)
            env_b = np.asarray(envelopes[1], dtype=complex)
        vac = self.vacuum()
        out = FockState(self.kind, self.n_modes)
        for m2 in range(self.grid.n_bins):
            second = apply_creation(vac, self.mode(source, sp, m2))
            for m1 in range(self.grid.n_bins):
                pair = apply_creation(second, self.mode(source, s, m1))
                w = env_a[m1] * env_b[m2]
                for k, a in pair.amp.items():
                    out.amp[k] = out.amp.get(k, 0.0j) + w * a
        return out._prune().normalized()

    def source_ensemble(self, source: int, stats, envelopes=None) -> Ensemble:
        """Mixture of vacuum, single- and double-emission branches of one source.

        Branch weights follow the shared probability convention: p1 per
        single-spin branch and p2 per unordered spin pair, i.e. p2/2 on
        each of the four ordered (s, s') kets since (s, s') and (s', s)
        label the same physical state.  Pauli-suppressed kets stay in the
        list as zero states and contribute nothing.
        """
        branches = [(stats.p0, self.vacuum())]
        for spin in (1, 2):
            branches.append((stats.p1, self.single_emission(source, spin)))
        for spins in ((1, 1), (1, 2), (2, 1), (2, 2)):
            branches.append((stats.p2 / 2.0, self.double_emission(source, spins, envelopes)))
        return Ensemble(kind=self.kind, n_modes=self.n_modes,
                        sources=frozenset({source}), branches=branches)

    def pair_ensemble(self, stats, max_electrons: int | None = None) -> Ensemble:
        """Both sources combined: rho = rho_1 (x) rho_2."""
        return tensor_product(self.source_ensemble(1, stats),
                              self.source_ensemble(2, stats),
                              max_electrons=max_electrons)

    # -- detection ----------------------------------------------------------

    def detector_operator(self, det: DetectorPosition, spin: int) -> DetectorOperator:
        """Field operator at ``det``: a_(1,spin,b) + e^{i delta} a_(2,spin,b).

        The detector snaps to the nearest direction bin; a snap distance
        beyond half the local bin width means the grid is too coarse.
        """
        thetas = self.grid.thetas
        idx = int(np.argmin(np.abs(thetas - det.theta)))
        snap = float(abs(thetas[idx] - det.theta))
        gaps = []
        if idx > 0:
            gaps.append(thetas[idx] - thetas[idx - 1])
        if idx < thetas.size - 1:
            gaps.append(thetas[idx + 1] - thetas[idx])
        if snap > 0.5 * min(gaps):
            raise ValueError(
                f"detector at theta = {det.theta:.6g} is {snap:.3g} rad from the "
                f"nearest bin; grid too coarse"
            )
        delta = phase_delta(self.geom, det)
        terms = ((self.mode(1, spin, idx), 1.0 + 0.0j),
                 (self.mode(2, spin, idx), np.exp(1j * delta)))
        return DetectorOperator(spin=spin, bin=idx, snap_distance=snap, terms=terms)

    # -- correlators ----------------------------------------------------------

    def g2_spin_blocks(self, rho: Ensemble, det1: DetectorPosition,
                       det2: DetectorPosition) -> dict:
        """The four spin-resolved correlator blocks {(s, s'): value}.

        Each block is sum_branches w * || Psi_s'(r2) Psi_s(r1) |psi> ||^2,
        hence real and non-negative by construction.
        """
        ops1 = {s: self.detector_operator(det1, s) for s in (1, 2)}
        ops2 = {s: self.detector_operator(det2, s) for s in (1, 2)}
        blocks = {}
        for s in (1, 2):
            partial = []
            for w, st in rho.branches:
                if w == 0.0 or st.is_zero:
                    continue
                partial.append((w, apply_detector(st, ops1[s])))
            for sp in (1, 2):
                acc = 0.0
                for w, st in partial:
                    if st.is_zero:
                        continue
                    final = apply_detector(st, ops2[sp])
                    acc += w * sum(abs(a) ** 2 for a in final.amp.values())
                blocks[(s, sp)] = acc
        return blocks

    def g2_numeric(self, rho: Ensemble, det1: DetectorPosition,
                   det2: DetectorPosition) -> float:
        """Total correlation: sum of all four spin blocks."""
        return float(sum(self.g2_spin_blocks(rho, det1, det2).values()))

    def g2_equal_spin(self, rho, det1, det2) -> float:
        b = self.g2_spin_blocks(rho, det1, det2)
        return float(b[(1, 1)] + b[(2, 2)])

    def g2_unequal_spin(self, rho, det1, det2) -> float:
        b = self.g2_spin_blocks(rho, det1, det2)
        return float(b[(1, 2)] + b[(2, 1)])

    #: The six (l1, l2, l3, l4) source patterns of the two-electron paths,
    #: in order: both-from-1, both-from-2, the two direct cross paths, and
    #: the two interference terms.
    _PATH_PATTERNS = ((1, 1, 1, 1), (2, 2, 2, 2), (1, 2, 2, 1),
                      (2, 1, 1, 2), (2, 1, 2, 1), (1, 2, 1, 2))

    def g2_term_decomposition(self, rho: Ensemble, det1: DetectorPosition,
                              det2: DetectorPosition, spins: tuple) -> list:
        """Six phase-weighted path contributions of one spin block.

        Terms 1-2 are the same-source pairs, 3-4 the two distinguishable
        cross-source paths, 5-6 the mutually conjugate interference
        terms.  Their sum equals the (s, s') entry of
        :meth:`g2_spin_blocks`.
        """
        s, sp = spins
        op1 = self.detector_operator(det1, s)
        op2 = self.detector_operator(det2, sp)
        # Per-source phase factors at each detector (source 1 is the phase
        # reference, so u[1] = v[1] = 1).
        u = {1: 1.0 + 0.0j, 2: np.exp(1j * phase_delta(self.geom, det1))}
        v = {1: 1.0 + 0.0j, 2: np.exp(1j * phase_delta(self.geom, det2))}
        bin1 = op1.bin
        bin2 = op2.bin
        terms = []
        for (l1, l2, l3, l4) in self._PATH_PATTERNS:
            coeff = np.conj(u[l1] * v[l2]) * v[l3] * u[l4]
            acc = 0.0j
            for w, st in rho.branches:
                if w == 0.0 or st.is_zero:
                    continue
                ket = apply_annihilation(
                    apply_annihilation(st, self.mode(l4, s, bin1)), self.mode(l3, sp, bin2))
                if ket.is_zero:
                    continue
                bra = apply_annihilation(
                    apply_annihilation(st, self.mode(l1, s, bin1)), self.mode(l2, sp, bin2))
                if bra.is_zero:
                    continue
                acc += w * bra.inner(ket)
            terms.append(complex(coeff * acc))
        return terms
