"""Two-electron Hanbury Brown-Twiss interference from independent tip sources.

Library layout:

* :mod:`ehbt.constants`   frozen CODATA constants
* :mod:`ehbt.geometry`    tip/screen geometry and phase differences
* :mod:`ehbt.fock`        brute-force second-quantization oracle
* :mod:`ehbt.closed_form` analytic correlation functions and visibility
* :mod:`ehbt.coulomb`     semiclassical repulsion: Verlet, dip width, fringes
* :mod:`ehbt.pattern`     fringe pattern composed with the Coulomb dip
* :mod:`ehbt.config`      run configs and reproducibility manifests
* :mod:`ehbt.cli`         the ``ehbt`` command-line frontend
* :mod:`ehbt.verify`      self-check suites behind ``ehbt verify``
"""

__version__ = "0.1.0"

from .closed_form import (
    EnvelopeWeights,
    SourceStatistics,
    SpinMode,
    g2_bosonic_reference,
    g2_equal_spin_p1sq,
    g2_same_source,
    g2_total,
    g2_unequal_spin_p1sq,
    poissonian_stats,
    visibility,
)
from .constants import CODATA, PhysicalConstants
from .coulomb import (
    DipResult,
    IntegratorConfig,
    NonConvergedError,
    Trajectory,
    convergence_study,
    coulomb_force,
    dip_width,
    dip_width_numeric,
    end_velocity_closed_form,
    fringe_count,
    integrate_relative,
    sample_dip_widths,
)
from .fock import (
    DirectionGrid,
    Ensemble,
    FockEngine,
    FockState,
    ModeIndex,
    StatisticsKind,
    apply_annihilation,
    apply_creation,
    tensor_product,
)
from .geometry import (
    DetectorPosition,
    Geometry,
    phase_delta,
    screen_to_phase,
    x_for_phase,
)
from .pattern import (
    PatternSeries,
    ScreenGrid,
    compose_pattern,
    count_dip_maxima,
    dip_envelope,
    spatial_wavelength,
)

__all__ = [name for name in dir() if not name.startswith("_")]
