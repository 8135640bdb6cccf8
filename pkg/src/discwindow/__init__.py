"""Discrete spectrum of a Dirichlet layer with a Neumann disc window.

Submodules
----------
bessel
    ``J_n`` and its zeros.
bracketing
    Closed-form Dirichlet bracket, bound-state counts, uniqueness threshold.
variational
    Trial-function certificate that a bound state exists for every ``a > 0``.
fdsolver
    Finite-volume eigenvalues per angular mode.
cli
    ``discwindow`` command line tool producing CSV tables.
"""

from .bessel import BesselZero, Multiplicity, bessel_j, bessel_zero, zeros_below
from .bracketing import (
    BracketLevel,
    asymptotic_sandwich,
    count_bound_states_upper,
    dirichlet_bracket_levels,
    figure_counts,
    threshold_report,
    uniqueness_threshold,
)
from .geometry import SpectralWindow, WaveguideGeometry, spectral_window

__version__ = "0.1.0"

__all__ = [
    "BesselZero",
    "BracketLevel",
    "Multiplicity",
    "SpectralWindow",
    "WaveguideGeometry",
    "asymptotic_sandwich",
    "bessel_j",
    "bessel_zero",
    "count_bound_states_upper",
    "dirichlet_bracket_levels",
    "figure_counts",
    "spectral_window",
    "threshold_report",
    "uniqueness_threshold",
    "zeros_below",
]
