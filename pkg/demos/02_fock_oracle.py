#!/usr/bin/env python3
"""The second-quantization engine as an oracle for the analytic results.

Builds the mixed two-source state over a small direction grid, evaluates
the correlator by literally applying creation/annihilation operators, and
checks it against the closed-form expression.  Also breaks one spin block
into its six two-electron path contributions.
"""
import numpy as np

from ehbt import (
    DetectorPosition,
    DirectionGrid,
    EnvelopeWeights,
    FockEngine,
    Geometry,
    SpinMode,
    apply_creation,
    g2_total,
    phase_delta,
    poissonian_stats,
)


def main():
    geom = Geometry(d=1.0e-8, D=1.0, k=1.0e11)
    grid = DirectionGrid.uniform(np.linspace(-4e-3, 4e-3, 9))
    engine = FockEngine(geom, grid)

    # A few operator facts, straight from the algebra
    vac = engine.vacuum()
    one = apply_creation(vac, engine.mode(1, 1, 4))
    twice = apply_creation(one, engine.mode(1, 1, 4))
    print("a+|0> has norm", one.norm(), "; (a+)^2|0> is the zero state:", twice.is_zero)
    pair = engine.double_emission(1, (1, 1))
    print("two equal-spin electrons, same envelope, same tip -> zero state:",
          pair.is_zero)

    stats = poissonian_stats(0.2)
    rho = engine.pair_ensemble(stats, max_electrons=2)
    env = EnvelopeWeights(1.0 / grid.n_bins, 1.0 / grid.n_bins)
    det1 = DetectorPosition.from_angle(geom, 0.0)

    print()
    print("brute force vs closed form (unpolarized, Poisson mu = 0.2):")
    print(f"{'delta/pi':>9} {'fock':>14} {'closed form':>14} {'rel diff':>10}")
    for theta in grid.thetas[1::2]:
        det2 = DetectorPosition.from_angle(geom, float(theta))
        delta = phase_delta(geom, det2)
        bf = engine.g2_numeric(rho, det1, det2)
        ref = g2_total(delta, stats, env, SpinMode.UNPOLARIZED)
        print(f"{delta / np.pi:>9.3f} {bf:>14.6e} {ref:>14.6e} {abs(bf - ref) / ref:>10.1e}")

    det2 = DetectorPosition.from_angle(geom, float(grid.thetas[6]))
    print()
    print("six path contributions of the equal-spin block at "
          f"delta = {phase_delta(geom, det2) / np.pi:.3f} pi:")
    labels = ("both from tip 1", "both from tip 2", "cross path i", "cross path ii",
              "interference", "interference*")
    terms = engine.g2_term_decomposition(rho, det1, det2, (1, 1))
    for label, term in zip(labels, terms):
        print(f"  {label:<17} {term.real:+.6e} {term.imag:+.6e}j")
    block = engine.g2_spin_blocks(rho, det1, det2)[(1, 1)]
    print(f"  {'sum':<17} {sum(terms).real:+.6e}   (block value {block:+.6e})")


if __name__ == "__main__":
    main()
