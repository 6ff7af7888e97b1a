"""Frozen CODATA-2018 constants used throughout the package.

Values are compiled in and never read from user configuration, so every
run of the same config reproduces the same numbers bit for bit.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants in SI units (CODATA 2018)."""

    e: float = 1.602176634e-19       # elementary charge [C], exact
    eps0: float = 8.8541878128e-12   # vacuum permittivity [F/m]
    hbar: float = 1.054571817e-34    # reduced Planck constant [J s]
    m_e: float = 9.1093837015e-31    # electron mass [kg]

    def __post_init__(self):
        for name in ("e", "eps0", "hbar", "m_e"):
            if getattr(self, name) <= 0:
                raise ValueError(f"constant {name} must be positive")

    @property
    def h(self) -> float:
        """Planck constant h = 2*pi*hbar [J s]."""
        return 2.0 * np.pi * self.hbar

    @property
    def coulomb_prefactor(self) -> float:
        """e^2 / (4 pi eps0) [N m^2]."""
        return self.e**2 / (4.0 * np.pi * self.eps0)


#: Speed of light [m/s], exact; used only for the non-relativistic guard.
C_LIGHT = 299792458.0

#: The single shared constants instance.
CODATA = PhysicalConstants()
