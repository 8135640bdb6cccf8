"""Bessel functions of the first kind and their positive zeros.

``J_n`` is evaluated for integer order ``n >= 0`` and real ``x >= 0`` by one
of three routes:

* the ascending power series, when ``x**2 <= 4 (n + 1)`` so every term is
  smaller than the first one and the alternating sum loses no digits;
* Hankel's large-argument expansion, for ``x >= 30`` and ``x >= n**2``;
* Miller's backward recurrence normalised by ``J_0 + 2 sum J_2k = 1``
  everywhere else.

Zeros are located with a safeguarded Newton iteration that never leaves a
sign-change bracket. The brackets come from interlacing: the ``l``-th zero of
``J_n`` lies strictly between the ``l``-th and ``(l+1)``-th zeros of
``J_{n-1}``, and for ``J_0`` the ``l``-th zero lies in ``((l - 1/2) pi, l pi)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "BesselZero",
    "Multiplicity",
    "bessel_j",
    "bessel_j_prime",
    "bessel_zero",
    "clear_zero_cache",
    "fold_order",
    "mcmahon_estimate",
    "zeros_below",
]

_SERIES_TERMS = 200
_HANKEL_MIN_X = 30.0
_RESCALE = 1e250


class Multiplicity(str, enum.Enum):
    """How zeros of ``J_n`` with ``n >= 1`` are counted.

    ``SINGLE`` counts each ``x_{n,l}`` once. ``ANGULAR_DEGENERACY`` counts it
    twice, once for each angular mode ``exp(+i n theta)`` and
    ``exp(-i n theta)``.
    """

    SINGLE = "single"
    ANGULAR_DEGENERACY = "degenerate"

    @classmethod
    def _missing_(cls, value):
        if value == "angular_degeneracy":
            return cls.ANGULAR_DEGENERACY
        return None

    def weight(self, order: int) -> int:
        if self is Multiplicity.ANGULAR_DEGENERACY and order >= 1:
            return 2
        return 1


@dataclass(frozen=True, order=True)
class BesselZero:
    """The ``index``-th positive zero of ``J_order``."""

    value: float
    order: int
    index: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"order must be >= 0, got {self.order}")
        if self.index < 1:
            raise ValueError(f"index must be >= 1, got {self.index}")
        if not self.value > 0:
            raise ValueError(f"zero must be positive, got {self.value}")


def fold_order(n: int) -> tuple[int, int]:
    """Map a signed order to ``(|n|, sign)`` using ``J_{-n} = (-1)^n J_n``."""
    n = _as_order(n, allow_negative=True)
    if n >= 0:
        return n, 1
    return -n, (-1) ** (-n)


def _as_order(n, allow_negative=False) -> int:
    if isinstance(n, bool) or not float(n).is_integer():
        raise ValueError(f"Bessel order must be an integer, got {n!r}")
    n = int(n)
    if n < 0 and not allow_negative:
        raise ValueError(f"Bessel order must be >= 0, got {n}")
    return n


def _series(n: int, x: float) -> float:
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    for k in range(1, _SERIES_TERMS):
        term *= q / (k * (n + k))
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    # (x/2)^n / n! built incrementally to avoid overflow in n!
    prefactor = 1.0
    half = 0.5 * x
    for k in range(1, n + 1):
        prefactor *= half / k
    return prefactor * total


def _hankel(n: int, x: float) -> float:
    mu = 4.0 * n * n
    p = 1.0
    q = 0.0
    term = 1.0
    k = 1
    last = math.inf
    while k < 60:
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) >= last:
            break
        last = abs(term)
        if k % 2:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += -term if (k // 2) % 2 == 1 else term
        if last < 1e-17:
            break
        k += 1
    omega = x - (0.5 * n + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(omega) - q * math.sin(omega))


def _miller_pair(n: int, x: float) -> tuple[float, float]:
    """``(J_n(x), J_{n-1}(x))`` from one backward sweep (``J_{-1} = -J_1``)."""
    top = max(n, int(x)) + 20 + int(math.sqrt(40.0 * max(n, x)))
    top += top % 2
    j_next = 0.0
    j_cur = 1e-300
    norm = 0.0
    result = 0.0
    below = 0.0
    for k in range(top, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds the unnormalised J_{k-1}
        if k - 1 == n:
            result = j_cur
        elif k - 1 == n - 1:
            below = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            norm /= _RESCALE
            result /= _RESCALE
            below /= _RESCALE
    norm += j_cur
    if n == 0:
        below = -j_next
    return result / norm, below / norm


def _miller(n: int, x: float) -> float:
    return _miller_pair(n, x)[0]


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind ``J_n(x)``.

    Parameters
    ----------
    n : int
        Non-negative integer order.
    x : float
        Non-negative argument.

    Returns
    -------
    float
        ``J_n(x)`` to about ``1e-14`` absolute accuracy for ``x <= 200``.
    """
    n = _as_order(n)
    x = float(x)
    if not x >= 0.0:
        raise ValueError(f"argument must be >= 0, got {x}")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x * x <= 4.0 * (n + 1):
        return _series(n, x)
    if x >= _HANKEL_MIN_X and x >= n * n:
        return _hankel(n, x)
    return _miller(n, x)


def _value_and_below(n: int, x: float) -> tuple[float, float]:
    """``(J_n(x), J_{n-1}(x))``, sharing one Miller sweep when possible."""
    if x * x > 4.0 * (n + 1) and not (x >= _HANKEL_MIN_X and x >= n * n):
        return _miller_pair(n, x)
    below = -bessel_j(1, x) if n == 0 else bessel_j(n - 1, x)
    return bessel_j(n, x), below


def bessel_j_prime(n: int, x: float) -> float:
    """Derivative ``J_n'(x) = J_{n-1}(x) - (n/x) J_n(x)``."""
    n = _as_order(n)
    if n == 0:
        return -bessel_j(1, x)
    if x == 0.0:
        return 0.5 if n == 1 else 0.0
    return bessel_j(n - 1, x) - n / x * bessel_j(n, x)


def mcmahon_estimate(n: int, l: int, terms: int = 3) -> float:
    """McMahon's large-``l`` expansion of the ``l``-th zero of ``J_n``.

    With ``terms=1`` this is the leading term ``(n + 2l - 1/2) pi / 2``.
    """
    beta = (n + 2 * l - 0.5) * math.pi / 2
    if terms <= 1:
        return beta
    mu = 4.0 * n * n
    est = beta - (mu - 1) / (8 * beta)
    if terms >= 3:
        est -= 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * beta) ** 3)
    return est


def _refine_root(n: int, lo: float, hi: float, seed: float) -> float:
    f_lo = bessel_j(n, lo)
    f_hi = bessel_j(n, hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ArithmeticError(f"no sign change for J_{n} on [{lo}, {hi}]")
    x = seed if lo < seed < hi else 0.5 * (lo + hi)
    for _ in range(200):
        fx, below = _value_and_below(n, x)
        if fx == 0.0:
            return x
        if (fx > 0) == (f_lo > 0):
            lo, f_lo = x, fx
        else:
            hi = x
        dfx = below - n / x * fx
        step = fx / dfx if dfx != 0.0 else math.inf
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
            step = x - x_new
        if abs(step) <= 2e-16 * abs(x_new) or hi - lo <= 4e-16 * hi:
            return x_new
        x = x_new
    return x


# highest zero index already cached, per order
_filled: dict[int, int] = {}


@lru_cache(maxsize=None)
def _zero_value(n: int, l: int) -> float:
    if n == 0:
        lo, hi = (l - 0.5) * math.pi, l * math.pi
    else:
        lo, hi = _zero_value(n - 1, l), _zero_value(n - 1, l + 1)
    seed = mcmahon_estimate(n, l)
    return _refine_root(n, lo, hi, seed)


def clear_zero_cache() -> None:
    """Forget every cached zero (for cold-start timing)."""
    _zero_value.cache_clear()
    _filled.clear()


def bessel_zero(n: int, l: int) -> BesselZero:
    """Return the ``l``-th positive zero of ``J_n`` (``l`` is 1-based)."""
    n = _as_order(n)
    if isinstance(l, bool) or int(l) != l or l < 1:
        raise ValueError(f"zero index must be a positive integer, got {l!r}")
    l = int(l)
    # fill the cache order by order so the interlacing recursion stays shallow
    for m in range(n):
        need = l + n - m
        have = _filled.get(m, 0)
        for k in range(have + 1, need + 1):
            _zero_value(m, k)
        _filled[m] = max(have, need)
    return BesselZero(_zero_value(n, l), n, l)


def zeros_below(bound: float, multiplicity="single") -> list[BesselZero]:
    """All zeros ``x_{n,l} < bound`` over every order ``n >= 0``, ascending.

    Since ``x_{n,1} > n`` the scan over orders stops once ``n >= bound``.
    Under the angular-degeneracy rule zeros with ``n >= 1`` appear twice.
    """
    bound = float(bound)
    if not bound > 0:
        raise ValueError(f"bound must be positive, got {bound}")
    rule = Multiplicity(multiplicity)
    found = []
    n = 0
    while n < bound:
        l = 1
        while True:
            z = bessel_zero(n, l)
            if z.value >= bound:
                break
            found.extend([z] * rule.weight(n))
            l += 1
        if l == 1:
            break
        n += 1
    found.sort(key=lambda z: (z.value, z.order, z.index))
    return found
