"""Layer geometry and the energy window that holds its discrete spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["WaveguideGeometry", "SpectralWindow", "spectral_window"]


@dataclass(frozen=True)
class WaveguideGeometry:
    """Layer ``R^2 x [0, d]`` with a Neumann disc of radius ``a`` at ``z = 0``.

    Attributes
    ----------
    d : float
        Layer width.
    a : float
        Window radius, in the same length unit as ``d``.
    """

    d: float
    a: float

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d > 0):
            raise ValueError(f"layer width d must be positive, got {self.d}")
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ValueError(f"window radius a must be >= 0, got {self.a}")

    @property
    def ratio(self) -> float:
        return self.a / self.d

    def scaled(self, s: float) -> "WaveguideGeometry":
        return WaveguideGeometry(self.d * s, self.a * s)


@dataclass(frozen=True)
class SpectralWindow:
    """Energies ``[(pi/2d)^2, (pi/d)^2]``; ``upper`` is the continuum threshold."""

    lower: float
    upper: float

    def __contains__(self, energy: float) -> bool:
        return self.lower < energy < self.upper


def spectral_window(g: WaveguideGeometry) -> SpectralWindow:
    upper = (math.pi / g.d) ** 2
    # dividing by 4 is exact in binary, so lower == upper / 4 bit for bit
    return SpectralWindow(upper / 4.0, upper)
