#!/usr/bin/env python3
"""Full predicted pattern: Pauli fringes inside the Coulomb dip.

Composes the polarized fermionic fringe pattern with the repulsion-dip
envelope for two geometries: a quasi single-tip setup (d = 0.01 nm),
where the dip and the fringe have the same width and cannot be told
apart, and a two-tip setup (d = 10 nm), where ~4 fringes fit inside the
dip and the two effects separate cleanly.

Usage:
    python demos/04_composed_pattern.py [--plot out.png]
"""
import argparse

import numpy as np

from ehbt import (
    Geometry,
    ScreenGrid,
    SourceStatistics,
    SpinMode,
    compose_pattern,
    count_dip_maxima,
)

SFE = SourceStatistics(p0=0.9, p1=0.05, p2=0.0)


def describe(name, geom, grid):
    series = compose_pattern(geom, SFE, SpinMode.POLARIZED_EQUAL, grid)
    print(f"{name}: d = {geom.d * 1e9:g} nm, k = {geom.k:g} 1/m, D = {geom.D:g} m")
    print(f"  fringe period Lambda_sp = {series.lambda_sp * 100:.4f} cm")
    print(f"  dip width (FWHM) z_dip  = {series.z_dip * 100:.4f} cm")
    print(f"  predicted fringes in dip N = {series.fringe_n:.3f}")
    print(f"  counted maxima inside FWHM = {count_dip_maxima(series)}")
    print()
    return series


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--plot", default=None, help="save a PNG of both patterns")
    args = parser.parse_args()

    single_tip = describe("quasi single tip",
                          Geometry(d=1.0e-11, D=1.0, k=1.0e11),
                          ScreenGrid(-1.0, 1.0, 4001))
    two_tip = describe("two tips",
                       Geometry(d=1.0e-8, D=1.0, k=1.0e11),
                       ScreenGrid(-0.05, 0.05, 4001))

    print("In the single-tip case the central suppression could be Pauli or")
    print("Coulomb; in the two-tip case the fast spatial oscillation is a pure")
    print("exclusion-principle signature modulated by the wide Coulomb dip.")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(2, 1, figsize=(7, 6))
        for ax, series, title in ((axes[0], single_tip, "d = 0.01 nm"),
                                  (axes[1], two_tip, "d = 10 nm")):
            ax.plot(series.x, series.g2_total, lw=0.9, label=r"$G^{(2)}$")
            ax.plot(series.x, series.g2_fermi * np.max(series.envelope), ":", lw=0.7,
                    label="fringes only")
            ax.plot(series.x, 4 * series.envelope, "--", lw=0.8, label="dip envelope")
            ax.set_title(title, fontsize=9)
            ax.set_xlabel("detector separation x [m]")
            ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"saved {args.plot}")


if __name__ == "__main__":
    main()
