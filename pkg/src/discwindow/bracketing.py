"""Dirichlet bracketing of the window spectrum and bound-state counting.

Putting a Dirichlet wall on the cylinder ``r = a`` raises the operator; the
inner cylinder then has the explicit eigenvalues

    lambda_{k,n,l} = ((2k + 1) pi / 2d)^2 + (x_{n,l} / a)^2,

and every such level below the continuum ``(pi/d)^2`` forces one discrete
eigenvalue of the full problem. Only ``k = 0`` levels can sit below the
continuum, which gives the counting threshold

    x_{n,l} < (sqrt(3) / 2) pi (a / d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .bessel import BesselZero, Multiplicity, mcmahon_estimate, zeros_below
from .geometry import WaveguideGeometry, spectral_window

__all__ = [
    "BracketLevel",
    "PUBLISHED_UNIQUENESS_THRESHOLD",
    "ThresholdReport",
    "asymptotic_sandwich",
    "count_bound_states_upper",
    "counting_threshold",
    "dirichlet_bracket_levels",
    "figure_counts",
    "spectral_window",
    "threshold_report",
    "uniqueness_threshold",
]

#: Value of the uniqueness threshold for ``(a/d)^2`` as printed in the source
#: article (decimal comma in the original).
PUBLISHED_UNIQUENESS_THRESHOLD = 1.9276

_HALF_SQRT3_PI = 0.5 * math.sqrt(3.0) * math.pi


@dataclass(frozen=True)
class BracketLevel:
    """One eigenvalue of the inner Dirichlet cylinder."""

    k: int
    zero: BesselZero
    value: float
    side: str = "dirichlet_inner"


def counting_threshold(ratio: float) -> float:
    """Zeros strictly below this value give levels below the continuum."""
    return _HALF_SQRT3_PI * ratio


def dirichlet_bracket_levels(
    g: WaveguideGeometry, cap: float | None = None, multiplicity="single"
) -> list[BracketLevel]:
    """All inner-Dirichlet levels strictly below ``cap``, ascending.

    ``cap`` defaults to the continuum threshold ``(pi/d)^2``.
    """
    if g.a == 0:
        raise ValueError("inner cylinder is empty for a = 0")
    window = spectral_window(g)
    if cap is None:
        cap = window.upper
    if not cap > window.lower:
        raise ValueError(
            f"cap {cap} must exceed the transverse ground energy {window.lower}"
        )
    levels = []
    k = 0
    while True:
        transverse = ((2 * k + 1) * math.pi / (2 * g.d)) ** 2
        if transverse >= cap:
            break
        bound = g.a * math.sqrt(cap - transverse)
        for z in zeros_below(bound, multiplicity):
            value = transverse + (z.value / g.a) ** 2
            if value < cap:
                levels.append(BracketLevel(k, z, value))
        k += 1
    levels.sort(key=lambda lv: (lv.value, lv.k, lv.zero.order, lv.zero.index))
    return levels


def count_bound_states_upper(g: WaveguideGeometry, multiplicity="single") -> int:
    """Number of inner-Dirichlet levels below the continuum.

    Each of them certifies one discrete eigenvalue, so this is a lower bound
    on the number of bound states of the window problem.
    """
    if g.a == 0:
        return 0
    return len(dirichlet_bracket_levels(g, None, multiplicity))


def uniqueness_threshold(multiplicity="single") -> float:
    """Largest ``(a/d)^2`` for which the bracket count stays at most one."""
    second = zeros_below(5.0, multiplicity)[1].value
    return (second / _HALF_SQRT3_PI) ** 2


@dataclass(frozen=True)
class ThresholdReport:
    derived: float
    leading_asymptotic: float
    published: float

    @property
    def relative_discrepancy(self) -> float:
        return (self.derived - self.published) / self.published


def threshold_report(multiplicity="single") -> ThresholdReport:
    """Derived, asymptotic-estimate and published uniqueness thresholds.

    ``leading_asymptotic`` replaces ``x_{1,1}`` by ``(n + 2l - 1/2) pi / 2``.
    The published value 1.9276 matches neither; the gap is reported here
    rather than reconciled.
    """
    approx = mcmahon_estimate(1, 1, terms=1)
    return ThresholdReport(
        derived=uniqueness_threshold(multiplicity),
        leading_asymptotic=(approx / _HALF_SQRT3_PI) ** 2,
        published=PUBLISHED_UNIQUENESS_THRESHOLD,
    )


def asymptotic_sandwich(g: WaveguideGeometry, lam: float) -> tuple[float, float]:
    """Consecutive values ``(pi/2d)^2 + (x/a)^2`` enclosing ``lam``.

    The bottom and top of the spectral window stand in when no bracket value
    lies below, respectively above, ``lam`` inside the window.
    """
    window = spectral_window(g)
    if lam not in window:
        raise ValueError(
            f"energy {lam} outside the spectral window ({window.lower}, {window.upper})"
        )
    if g.a == 0:
        return window.lower, window.upper
    lower, upper = window.lower, window.upper
    # J_0 zeros are less than pi apart, so the next level lies within pi
    target = g.a * math.sqrt(lam - window.lower)
    cap = min(g.a * math.sqrt(window.upper - window.lower), target + math.pi)
    for z in zeros_below(cap):
        value = window.lower + (z.value / g.a) ** 2
        if value <= lam:
            lower = value
        else:
            upper = value
            break
    return lower, upper


def figure_counts(
    ratio_grid: Sequence[float], multiplicity="single"
) -> list[tuple[float, int]]:
    """Bound-state count lower bound sampled at each ``a/d`` in the grid."""
    ratios = [float(r) for r in ratio_grid]
    if any(not r > 0 for r in ratios):
        raise ValueError("ratios must be positive")
    if any(b < a for a, b in zip(ratios, ratios[1:])):
        raise ValueError("ratios must be ascending")
    if not ratios:
        return []
    rule = Multiplicity(multiplicity)
    zeros = zeros_below(counting_threshold(ratios[-1]) + 1.0, rule)
    table = []
    for r in ratios:
        t = counting_threshold(r)
        table.append((r, sum(1 for z in zeros if z.value < t)))
    return table
