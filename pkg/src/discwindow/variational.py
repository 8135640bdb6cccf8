"""Variational certificate that a bound state exists for every window radius.

The trial function is

    Phi(r, z) = phi_tau(r) * (chi(z) + eps * j(r)**2 * eta(z))

with ``chi`` the first Dirichlet transverse mode, ``phi_tau`` a plateau
profile whose tail is stretched logarithmically, ``j`` a smooth bump inside
the window and ``eta`` a transverse factor for the bump. A negative value of

    q[Phi] = Q0[Phi] - (pi/d)^2 ||Phi||^2

proves, by min-max, an eigenvalue below the continuum ``(pi/d)^2``.

The bump needs a transverse factor that vanishes at ``z = d`` for ``Phi`` to
satisfy the Dirichlet condition there. The default ``eta = cos(pi z / 2d)``
does; ``eta = 1`` (``transverse="flat"``) is kept for comparison only and is
refused by :func:`certify_bound_state`.

Two independent evaluations of ``q`` are provided. :func:`energy_closed_form`
uses the reduced expression, with transverse integrals done analytically and
radial norms by 1D quadrature; :func:`energy_quadrature` integrates the
energy density of ``Phi`` directly over the ``(r, z)`` half plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .geometry import WaveguideGeometry

__all__ = [
    "Certificate",
    "CertificationFailure",
    "EnergyCoefficients",
    "LocalizationBump",
    "QuadratureError",
    "RadialProfile",
    "TailFamily",
    "TransverseMode",
    "TrialParams",
    "canonical_trial",
    "certify_bound_state",
    "cle_discrepancy",
    "energy_closed_form",
    "energy_coefficients",
    "energy_printed",
    "energy_quadrature",
    "tail_energy",
    "unweighted_energy",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=400)


class QuadratureError(RuntimeError):
    """Adaptive quadrature missed its tolerance."""

    def __init__(self, message, achieved):
        super().__init__(f"{message} (estimated error {achieved:.3e})")
        self.achieved = achieved


class CertificationFailure(RuntimeError):
    """No negative trial energy was found; carries the best value seen."""

    def __init__(self, message, best):
        super().__init__(f"{message}; best q = {best:.6e}")
        self.best = best


def _quad(f, lo, hi, points=None, what="integral", rtol=1e-10):
    opts = dict(_QUAD_OPTS)
    if points is not None and math.isfinite(hi):
        inner = sorted(p for p in points if lo < p < hi)
        if inner:
            opts["points"] = inner
    value, err = integrate.quad(f, lo, hi, **opts)
    if err > max(rtol * abs(value), 1e-13):
        raise QuadratureError(f"{what} on [{lo}, {hi}] did not converge", err)
    return value


# -- building blocks ---------------------------------------------------------


@dataclass(frozen=True)
class TransverseMode:
    """First Dirichlet mode ``sqrt(2/d) sin(pi z / d)`` of the layer."""

    d: float

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        inside = (z > 0) & (z < self.d)
        return np.where(inside, math.sqrt(2 / self.d) * np.sin(math.pi * z / self.d), 0.0)

    def derivative(self, z):
        z = np.asarray(z, dtype=float)
        inside = (z > 0) & (z < self.d)
        k = math.pi / self.d
        return np.where(inside, math.sqrt(2 / self.d) * k * np.cos(k * z), 0.0)

    def norm_squared(self) -> float:
        return _quad(lambda z: float(self(z)) ** 2, 0.0, self.d, what="chi norm")


def _mollifier(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, and its derivative."""
    t = np.asarray(t, dtype=float)
    f0 = _mollifier(t)
    f1 = _mollifier(1.0 - t)
    denom = f0 + f1
    value = f0 / denom
    with np.errstate(divide="ignore", invalid="ignore"):
        df0 = np.where(t > 0, f0 / t**2, 0.0)
        df1 = np.where(t < 1, f1 / (1.0 - t) ** 2, 0.0)
    deriv = (df0 * f1 + f0 * df1) / denom**2
    return value, deriv


class RadialProfile:
    """Non-negative radial profile equal to 1 on the plateau ``[0, b]``.

    Use one of the constructors: :meth:`plateau` (C-infinity transition on
    ``[b, b + width]``), :meth:`cosine` (C1 transition) or :meth:`gaussian`
    (Schwartz tail). :meth:`from_callables` wraps user functions and checks
    the plateau condition.
    """

    def __init__(self, value, derivative, b, support_end, name="custom"):
        if not b > 0:
            raise ValueError(f"plateau end must be positive, got {b}")
        if not support_end > b:
            raise ValueError("support must extend past the plateau")
        self._value = value
        self._derivative = derivative
        self.b = float(b)
        self.support_end = float(support_end)
        self.name = name
        self._check_plateau()

    def _check_plateau(self):
        s = np.linspace(0.0, self.b, 257)
        if np.max(np.abs(self.value(s) - 1.0)) > 1e-12 or np.max(
            np.abs(self.derivative(s))
        ) > 1e-12:
            raise ValueError(
                f"profile {self.name!r} is not identically 1 on [0, b]; its tail "
                "would not be reached by the logarithmic stretch"
            )

    @classmethod
    def plateau(cls, b, width=None):
        w = float(b if width is None else width)

        def value(s):
            return _smooth_step((b + w - np.asarray(s, dtype=float)) / w)[0]

        def derivative(s):
            return -_smooth_step((b + w - np.asarray(s, dtype=float)) / w)[1] / w

        return cls(value, derivative, b, b + w, name=f"plateau(w={w:g})")

    @classmethod
    def cosine(cls, b, width):
        w = float(width)

        def value(s):
            t = np.clip((np.asarray(s, dtype=float) - b) / w, 0.0, 1.0)
            return np.cos(0.5 * math.pi * t) ** 2

        def derivative(s):
            s = np.asarray(s, dtype=float)
            t = (s - b) / w
            inside = (t > 0) & (t < 1)
            return np.where(inside, -0.5 * math.pi / w * np.sin(math.pi * t), 0.0)

        return cls(value, derivative, b, b + w, name=f"cosine(w={w:g})")

    @classmethod
    def gaussian(cls, b, sigma):
        sigma = float(sigma)

        def value(s):
            t = np.maximum(np.asarray(s, dtype=float) - b, 0.0) / sigma
            return np.exp(-(t**2))

        def derivative(s):
            t = np.maximum(np.asarray(s, dtype=float) - b, 0.0) / sigma
            return -2.0 * t / sigma * np.exp(-(t**2))

        # exp(-144) is far below double precision relative to the bulk
        return cls(value, derivative, b, b + 12.0 * sigma, name=f"gaussian(s={sigma:g})")

    @classmethod
    def from_callables(cls, value, derivative, b, support_end, name="custom"):
        return cls(
            lambda s: np.asarray(value(np.asarray(s, dtype=float)), dtype=float),
            lambda s: np.asarray(derivative(np.asarray(s, dtype=float)), dtype=float),
            b,
            support_end,
            name,
        )

    def value(self, s):
        return self._value(s)

    def derivative(self, s):
        return self._derivative(s)

    def __repr__(self):
        return f"RadialProfile({self.name}, b={self.b:g})"


def unweighted_energy(profile: RadialProfile) -> float:
    """``int_0^inf phi'(s)^2 ds`` (the derivative vanishes on the plateau)."""
    return _quad(
        lambda s: float(profile.derivative(s)) ** 2,
        profile.b,
        profile.support_end,
        what="unweighted profile energy",
    )


@dataclass(frozen=True)
class TailFamily:
    """``phi_tau(r) = phi(b + tau ln(r / b))`` beyond the plateau."""

    base: RadialProfile
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def b(self) -> float:
        return self.base.b

    def _stretched(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r > self.b, self.b + self.tau * np.log(r / self.b), r)

    def value(self, r):
        return self.base.value(self._stretched(r))

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        s = self._stretched(r)
        safe_r = np.where(r > self.b, r, 1.0)
        return np.where(r > self.b, self.tau / safe_r * self.base.derivative(s), 0.0)

    def log_span(self) -> float:
        """Length of the tail in ``u = ln(r / b)``."""
        return (self.base.support_end - self.b) / self.tau

    def r_derivative(self, u):
        """``r * phi_tau'(r)`` at ``r = b exp(u)``, without forming ``r``."""
        u = np.asarray(u, dtype=float)
        return self.tau * self.base.derivative(self.b + self.tau * u)

    @property
    def support_end(self) -> float:
        span = self.log_span()
        return self.b * math.exp(span) if span < 700 else math.inf


def tail_energy(profile: TailFamily) -> float:
    """``||phi_tau'||^2`` in ``L^2((0, inf), r dr)``.

    The radial axis past the plateau is integrated in ``u = ln(r / b)``, where
    the integrand is ``(r phi_tau'(r))^2``.
    """
    core = _quad(
        lambda r: float(profile.derivative(r)) ** 2 * r, 0.0, profile.b, what="core"
    )
    span = profile.log_span()
    tail = _quad(
        lambda u: float(profile.r_derivative(u)) ** 2,
        0.0,
        span,
        what="logarithmic tail",
    )
    return core + tail


@dataclass(frozen=True)
class LocalizationBump:
    """``j(r) = exp(-1 / (1 - s^2))`` with ``s`` mapping ``(lo, hi)`` onto ``(-1, 1)``."""

    lo: float
    hi: float

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise ValueError(f"bump support must satisfy 0 < lo < hi, got ({self.lo}, {self.hi})")

    @classmethod
    def inside(cls, a: float) -> "LocalizationBump":
        return cls(0.25 * a, 0.75 * a)

    def _s(self, r):
        return (2.0 * np.asarray(r, dtype=float) - self.lo - self.hi) / (self.hi - self.lo)

    def value(self, r):
        s = self._s(r)
        inside = np.abs(s) < 1
        safe = np.where(inside, 1.0 - s * s, 1.0)
        return np.where(inside, np.exp(-1.0 / safe), 0.0)

    def derivative(self, r):
        s = self._s(r)
        inside = np.abs(s) < 1
        safe = np.where(inside, 1.0 - s * s, 1.0)
        ds = 2.0 / (self.hi - self.lo)
        return np.where(inside, np.exp(-1.0 / safe) * (-2.0 * s / safe**2) * ds, 0.0)

    def fits(self, a: float) -> bool:
        return self.hi < a


@dataclass(frozen=True)
class TrialParams:
    """Parameters of the trial function ``phi_tau (chi + eps j^2 eta)``."""

    tau: float
    epsilon: float
    profile: RadialProfile
    bump: LocalizationBump
    transverse: str = "cosine"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.transverse not in _TRANSVERSE:
            raise ValueError(f"unknown transverse factor {self.transverse!r}")

    @property
    def tail(self) -> TailFamily:
        return TailFamily(self.profile, self.tau)

    def replace(self, **changes) -> "TrialParams":
        fields = dict(
            tau=self.tau,
            epsilon=self.epsilon,
            profile=self.profile,
            bump=self.bump,
            transverse=self.transverse,
        )
        fields.update(changes)
        return TrialParams(**fields)

    def evaluate(self, d, r, z):
        """``Phi(r, z)`` on broadcast arrays (``r`` must stay finite)."""
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        chi = TransverseMode(d)(z)
        eta = _transverse_factor(self.transverse, d, z)[0]
        j = self.bump.value(r)
        return self.tail.value(r) * (chi + self.epsilon * j * j * eta)


# -- transverse factor of the bump ------------------------------------------


def _cosine_factor(d, z):
    k = 0.5 * math.pi / d
    inside = (z >= 0) & (z <= d)
    return np.where(inside, np.cos(k * z), 0.0), np.where(inside, -k * np.sin(k * z), 0.0)


def _flat_factor(d, z):
    inside = (z >= 0) & (z <= d)
    return np.where(inside, 1.0, 0.0), np.zeros_like(z, dtype=float)


def _cosine_integrals(d):
    c = math.sqrt(2.0 / d)
    return dict(
        eta2=d / 2,
        deta2=math.pi**2 / (8 * d),
        chi_eta=c * 4 * d / (3 * math.pi),
        dchi_deta=c * math.pi / (3 * d),
    )


def _flat_integrals(d):
    c = math.sqrt(2.0 / d)
    return dict(eta2=d, deta2=0.0, chi_eta=c * 2 * d / math.pi, dchi_deta=0.0)


_TRANSVERSE: dict[str, tuple[Callable, Callable]] = {
    "cosine": (_cosine_factor, _cosine_integrals),
    "flat": (_flat_factor, _flat_integrals),
}


def _transverse_factor(kind, d, z):
    return _TRANSVERSE[kind][0](d, np.asarray(z, dtype=float))


# -- energies ----------------------------------------------------------------


def _check_admissible(g: WaveguideGeometry, p: TrialParams):
    if g.a <= 0:
        raise ValueError("the window radius must be positive")
    if not p.bump.fits(g.a):
        raise ValueError(
            f"bump support ({p.bump.lo}, {p.bump.hi}) is not inside the window (0, {g.a})"
        )
    if not p.profile.b > g.a:
        raise ValueError(f"plateau end {p.profile.b} must exceed the window radius {g.a}")


@dataclass(frozen=True)
class EnergyCoefficients:
    """``q = tail * tau + linear * eps + quadratic * eps**2``."""

    tail: float
    linear: float
    quadratic: float
    radial_norms: dict = field(default_factory=dict, compare=False)

    def __call__(self, tau, epsilon):
        return self.tail * tau + self.linear * epsilon + self.quadratic * epsilon**2


def _bump_norms(bump: LocalizationBump) -> dict:
    def q(f, what):
        return _quad(f, bump.lo, bump.hi, what=what)

    j = lambda r: float(bump.value(r))  # noqa: E731
    dj = lambda r: float(bump.derivative(r))  # noqa: E731
    return dict(
        j2_r=q(lambda r: j(r) ** 2 * r, "int j^2 r dr"),
        jdj_r=q(lambda r: (j(r) * dj(r)) ** 2 * r, "||j j'||^2"),
        j4_r=q(lambda r: j(r) ** 4 * r, "||j^2||^2"),
        j4=q(lambda r: j(r) ** 4, "unweighted ||j^2||^2"),
    )


def energy_coefficients(
    g: WaveguideGeometry, profile: RadialProfile, bump: LocalizationBump, transverse="cosine"
) -> EnergyCoefficients:
    """Coefficients of the reduced trial energy as a polynomial in ``(tau, eps)``."""
    k2 = (math.pi / g.d) ** 2
    zint = _TRANSVERSE[transverse][1](g.d)
    norms = _bump_norms(bump)
    tail = 2 * math.pi * unweighted_energy(profile)
    linear = 4 * math.pi * (zint["dchi_deta"] - k2 * zint["chi_eta"]) * norms["j2_r"]
    quadratic = 2 * math.pi * (
        4 * zint["eta2"] * norms["jdj_r"] + (zint["deta2"] - k2 * zint["eta2"]) * norms["j4_r"]
    )
    return EnergyCoefficients(tail, linear, quadratic, norms)


def energy_closed_form(g: WaveguideGeometry, p: TrialParams) -> float:
    """Reduced trial energy ``2 pi tau ||phi'||^2 - L eps + Q eps^2``.

    With ``eta = cos(pi z / 2d)`` the two coefficients are

        L = (4 pi^2 / d) sqrt(2/d) int j^2 r dr
        Q = pi d (4 ||j j'||^2 - (3 pi^2 / 4 d^2) ||j^2||^2)

    where the norms are in ``L^2(r dr)``.
    """
    _check_admissible(g, p)
    coeffs = energy_coefficients(g, p.profile, p.bump, p.transverse)
    return coeffs(p.tau, p.epsilon)


def energy_printed(g: WaveguideGeometry, p: TrialParams) -> float:
    """The reduced energy with the coefficients exactly as published.

    ``2 pi tau ||phi'||^2 - 8 pi d eps ||j^2||^2 + 2 pi eps^2 (2 ||j j'||^2
    - (pi/d)^2 ||j^2||^2)``, the middle norm unweighted and the last two in
    ``L^2(r dr)``. Kept so its difference from :func:`energy_quadrature`
    can be reported.
    """
    _check_admissible(g, p)
    norms = _bump_norms(p.bump)
    k2 = (math.pi / g.d) ** 2
    return (
        2 * math.pi * p.tau * unweighted_energy(p.profile)
        - 8 * math.pi * g.d * p.epsilon * norms["j4"]
        + 2 * math.pi * p.epsilon**2 * (2 * norms["jdj_r"] - k2 * norms["j4_r"])
    )


def cle_discrepancy(g: WaveguideGeometry, p: TrialParams) -> dict:
    """Compare the published reduced energy with the two evaluations here."""
    exact = energy_quadrature(g, p)
    closed = energy_closed_form(g, p)
    printed = energy_printed(g, p)
    coeffs = energy_coefficients(g, p.profile, p.bump, p.transverse)
    norms = coeffs.radial_norms
    k2 = (math.pi / g.d) ** 2
    printed_linear = -8 * math.pi * g.d * norms["j4"]
    printed_quadratic = 2 * math.pi * (2 * norms["jdj_r"] - k2 * norms["j4_r"])
    return dict(
        quadrature=exact,
        closed_form=closed,
        printed=printed,
        closed_minus_quadrature=closed - exact,
        printed_minus_quadrature=printed - exact,
        linear_ratio=printed_linear / coeffs.linear,
        quadratic_ratio=printed_quadratic / coeffs.quadratic,
    )


def energy_quadrature(g: WaveguideGeometry, p: TrialParams) -> float:
    """``Q0[Phi] - (pi/d)^2 ||Phi||^2`` by direct quadrature over ``(r, z)``.

    On ``r <= b`` the full energy density is integrated (64-point
    Gauss-Legendre in ``z``, adaptive in ``r``). Past the plateau ``Phi`` is
    ``phi_tau(r) chi(z)``; its radial part is integrated in
    ``s = b + tau ln(r / b)``, and its transverse part is checked to vanish
    for every ``r`` (``chi`` is a Dirichlet eigenmode) and then dropped,
    because multiplying a rounding-level residue by ``||phi_tau||^2`` would
    swamp the answer when ``tau`` is small.
    """
    _check_admissible(g, p)
    d = g.d
    k2 = (math.pi / d) ** 2
    z = 0.5 * d * (_GL_NODES + 1.0)
    wz = 0.5 * d * _GL_WEIGHTS
    chi_mode = TransverseMode(d)
    chi, dchi = chi_mode(z), chi_mode.derivative(z)
    eta, deta = _transverse_factor(p.transverse, d, z)
    fam = p.tail
    bump = p.bump
    eps = p.epsilon

    def core_density(r):
        phi = float(fam.value(r))
        dphi = float(fam.derivative(r))
        j = float(bump.value(r))
        dj = float(bump.derivative(r))
        bracket = chi + eps * j * j * eta
        d_r = dphi * bracket + phi * 2.0 * eps * j * dj * eta
        d_z = phi * (dchi + eps * j * j * deta)
        dens = d_r**2 + d_z**2 - k2 * (phi * bracket) ** 2
        return float(np.dot(wz, dens)) * r

    core = _quad(
        core_density, 0.0, fam.b, points=[bump.lo, bump.hi, g.a], what="core energy"
    )

    transverse_residue = float(np.dot(wz, dchi**2 - k2 * chi**2))
    if abs(transverse_residue) > 1e-12 * k2:
        raise QuadratureError("transverse energy of chi does not cancel", abs(transverse_residue))
    chi_norm = float(np.dot(wz, chi**2))
    tail = _quad(
        lambda s: p.tau * float(p.profile.derivative(s)) ** 2 * chi_norm,
        fam.b,
        p.profile.support_end,
        what="tail energy",
    )
    return 2 * math.pi * (core + tail)


# -- certificate -------------------------------------------------------------


def canonical_trial(g: WaveguideGeometry, tau=1.0, epsilon=0.0) -> TrialParams:
    """Default profile and bump: ``b = max(2a, a + d)``, bump on ``(a/4, 3a/4)``."""
    if not g.a > 0:
        raise ValueError("the window radius must be positive")
    b = max(2 * g.a, g.a + g.d)
    return TrialParams(tau, epsilon, RadialProfile.plateau(b), LocalizationBump.inside(g.a))


@dataclass
class Certificate:
    params: TrialParams
    value: float
    closed_form: float
    delta: float
    trace: list = field(default_factory=list)

    @property
    def margin(self) -> float:
        return -self.value


def certify_bound_state(
    g: WaveguideGeometry, delta: float | None = None, shrink=0.25, max_steps=200
) -> Certificate:
    """Find ``(tau, eps)`` with ``q[Phi] < -delta``.

    ``eps`` is set to half the ratio of the linear to the quadratic
    coefficient, which minimises the ``eps`` part of the energy; ``tau`` then
    shrinks geometrically until the closed form drops below ``-delta``, and
    the result is confirmed by :func:`energy_quadrature`.
    """
    if not g.a > 0:
        raise ValueError("certificate needs a window radius a > 0")
    if delta is None:
        delta = 1e-8 * (math.pi / g.d) ** 2
    base = canonical_trial(g)
    coeffs = energy_coefficients(g, base.profile, base.bump, base.transverse)
    if not coeffs.linear < 0:
        raise CertificationFailure("linear coefficient is not negative", math.inf)
    if coeffs.quadratic > 0:
        eps = -coeffs.linear / (2 * coeffs.quadratic)
    else:
        eps = 1.0
    trace = []
    tau = 1.0
    best = math.inf
    for step in range(max_steps):
        q = coeffs(tau, eps)
        trace.append((step, tau, eps, q))
        best = min(best, q)
        if q < -delta:
            params = base.replace(tau=tau, epsilon=eps)
            exact = energy_quadrature(g, params)
            best = min(best, exact)
            if exact < -delta:
                return Certificate(params, exact, q, delta, trace)
        tau *= shrink
    raise CertificationFailure(f"no certificate for a={g.a}, d={g.d}", best)
