"""Finite-volume eigenvalues of the window problem, one angular mode at a time.

For ``u(r, z) exp(i n theta)`` the quadratic form reduces to

    2 pi  int int ( r |u_r|^2 + r |u_z|^2 + (n^2 / r) |u|^2 ) dr dz

on the half strip ``0 < r < R``, ``0 < z < d``. It is discretised on a
tensor grid with a node on ``r = a``: every edge contributes
``(face measure) * (difference)^2 / length`` and every node carries its
dual-cell measure ``int r dr dz`` in a diagonal mass matrix. The result is a
real symmetric generalized problem ``A u = lam B u``.

Boundary treatment: Dirichlet on ``z = d``, on ``r = R`` (or Neumann when
requested) and on ``z = 0`` for ``r > a``; natural (Neumann) on ``z = 0``
for ``r <= a``, the switch node itself included. On the axis the condition
is natural for ``n = 0`` and Dirichlet for ``n >= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bessel import bessel_zero
from .geometry import WaveguideGeometry, spectral_window

__all__ = [
    "EigenResult",
    "GapRow",
    "Mesh",
    "MeshMismatch",
    "ReducedProblem",
    "RefinementStudy",
    "SolverError",
    "assemble",
    "free_nodes",
    "gap_asymptotics",
    "interpolate",
    "rayleigh_quotient",
    "refine_study",
    "solve_lowest",
]

DEFAULT_R_FACTOR = 5.0


class MeshMismatch(ValueError):
    """Mesh does not resolve the problem's radii."""


class SolverError(RuntimeError):
    """Eigensolver failed to reach the residual target."""

    def __init__(self, message, residual=math.nan):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class ReducedProblem:
    """Angular mode ``n`` of the window problem, truncated at radius ``R``.

    ``R`` defaults to ``a + 5 d``. A window with ``a >= R`` makes the whole
    bottom Neumann.
    """

    geometry: WaveguideGeometry
    n: int = 0
    R: float | None = None
    outer_bc: str = "dirichlet"

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError(f"mode must be a non-negative integer, got {self.n}")
        if self.R is None:
            g = self.geometry
            object.__setattr__(self, "R", g.a + DEFAULT_R_FACTOR * g.d)
        if not self.R > 0:
            raise ValueError(f"truncation radius must be positive, got {self.R}")
        if self.outer_bc not in ("dirichlet", "neumann"):
            raise ValueError(f"outer_bc must be 'dirichlet' or 'neumann', got {self.outer_bc!r}")

    @property
    def full_window(self) -> bool:
        return self.geometry.a >= self.R


@dataclass(frozen=True)
class Mesh:
    """Tensor grid: node radii ``r`` (from 0 to R) and heights ``z`` (0 to d)."""

    r: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.r) <= 0) or np.any(np.diff(self.z) <= 0):
            raise ValueError("mesh spacings must be positive")
        if self.r[0] != 0.0 or self.z[0] != 0.0:
            raise ValueError("mesh must start at r = 0 and z = 0")
        if self.nz < 16:
            raise ValueError(f"need nz >= 16, got {self.nz}")

    @property
    def nr(self) -> int:
        return len(self.r) - 1

    @property
    def nz(self) -> int:
        return len(self.z) - 1

    @property
    def h(self) -> float:
        return float(max(np.max(np.diff(self.r)), np.max(np.diff(self.z))))

    @classmethod
    def for_problem(cls, p: ReducedProblem, nr: int, nz: int) -> "Mesh":
        """Uniform pieces on ``[0, a]`` and ``[a, R]`` with ``nr`` cells in total."""
        a, R = p.geometry.a, p.R
        if 0 < a < R:
            na = min(max(1, round(nr * a / R)), nr - 1)
            r = np.concatenate(
                [np.linspace(0.0, a, na + 1), np.linspace(a, R, nr - na + 1)[1:]]
            )
        else:
            r = np.linspace(0.0, R, nr + 1)
        z = np.linspace(0.0, p.geometry.d, nz + 1)
        return cls(r, z)

    @classmethod
    def with_spacing(cls, p: ReducedProblem, h: float) -> "Mesh":
        """Cells of size close to ``h`` in both directions."""
        nz = max(16, round(p.geometry.d / h))
        nr = max(2, round(p.R / h))
        return cls.for_problem(p, nr, nz)

    def refined(self) -> "Mesh":
        """Halve every cell."""
        return Mesh(_bisect(self.r), _bisect(self.z))

    def coarsened(self) -> "Mesh":
        """Drop every other node (requires even cell counts)."""
        if self.nr % 2 or self.nz % 2:
            raise ValueError("coarsening needs even cell counts")
        return Mesh(self.r[::2].copy(), self.z[::2].copy())

    def describe(self) -> str:
        return f"{self.nr}x{self.nz}"


def _bisect(x):
    out = np.empty(2 * len(x) - 1)
    out[::2] = x
    out[1::2] = 0.5 * (x[:-1] + x[1:])
    return out


def _check_mesh(p: ReducedProblem, m: Mesh):
    g = p.geometry
    if not math.isclose(m.r[-1], p.R, rel_tol=1e-12):
        raise MeshMismatch(f"mesh ends at r = {m.r[-1]}, problem truncates at R = {p.R}")
    if not math.isclose(m.z[-1], g.d, rel_tol=1e-12):
        raise MeshMismatch(f"mesh ends at z = {m.z[-1]}, layer width is {g.d}")
    if 0 < g.a < p.R and not np.any(np.isclose(m.r, g.a, rtol=0, atol=1e-12 * p.R)):
        raise MeshMismatch(f"no mesh node on the window edge r = {g.a}")


def free_nodes(p: ReducedProblem, m: Mesh) -> np.ndarray:
    """Boolean ``(nr+1, nz+1)`` mask of nodes that carry unknowns."""
    _check_mesh(p, m)
    tol = 1e-12 * p.R
    keep = np.ones((m.nr + 1, m.nz + 1), dtype=bool)
    keep[:, -1] = False
    if p.outer_bc == "dirichlet":
        keep[-1, :] = False
    keep[m.r > p.geometry.a + tol, 0] = False
    if p.n > 0:
        keep[0, :] = False
    return keep


def _dual_measures(m: Mesh):
    r = m.r
    mid = 0.5 * (r[:-1] + r[1:])
    edges = np.concatenate([[0.0], mid, [r[-1]]])
    r_area = 0.5 * (edges[1:] ** 2 - edges[:-1] ** 2)
    z = m.z
    zmid = 0.5 * (z[:-1] + z[1:])
    zedges = np.concatenate([[0.0], zmid, [z[-1]]])
    z_len = np.diff(zedges)
    return mid, edges, r_area, z_len


def assemble(p: ReducedProblem, m: Mesh):
    """Stiffness ``A`` and diagonal mass ``B`` (both CSR) on the free nodes."""
    keep = free_nodes(p, m)
    index = np.full(keep.shape, -1, dtype=np.int64)
    n_dof = int(keep.sum())
    index[keep] = np.arange(n_dof)
    mid, edges, r_area, z_len = _dual_measures(m)
    hr = np.diff(m.r)
    hz = np.diff(m.z)

    rows, cols, vals = [], [], []
    diag = np.zeros(n_dof)

    def couple(i0, i1, w):
        a0, a1 = i0 >= 0, i1 >= 0
        np.add.at(diag, i0[a0], w[a0])
        np.add.at(diag, i1[a1], w[a1])
        both = a0 & a1
        rows.extend([i0[both], i1[both]])
        cols.extend([i1[both], i0[both]])
        vals.extend([-w[both], -w[both]])

    # radial edges (i, j) -- (i+1, j): face measure r_{i+1/2} * z_len_j
    w_r = (mid / hr)[:, None] * z_len[None, :]
    couple(index[:-1, :].ravel(), index[1:, :].ravel(), w_r.ravel())
    # vertical edges (i, j) -- (i, j+1): face measure r_area_i
    w_z = r_area[:, None] * (1.0 / hz)[None, :]
    couple(index[:, :-1].ravel(), index[:, 1:].ravel(), w_z.ravel())

    if p.n > 0:
        # n^2 int dr / r over the dual cell; the axis node is never free here
        ii, jj = np.nonzero(keep)
        weight = np.log(edges[ii + 1] / edges[ii]) * z_len[jj]
        np.add.at(diag, index[ii, jj], p.n**2 * weight)

    rows.append(np.arange(n_dof))
    cols.append(np.arange(n_dof))
    vals.append(diag)
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_dof, n_dof),
    )
    ii, jj = np.nonzero(keep)
    B = sp.diags(r_area[ii] * z_len[jj]).tocsr()
    return A, B


@dataclass
class EigenResult:
    """Lowest eigenvalues of one angular mode on one mesh."""

    n: int
    eigenvalues: np.ndarray
    residuals: np.ndarray
    mesh: str
    h: float
    outer_bc: str
    continuum: float
    vectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def bound_states(self) -> np.ndarray:
        return self.eigenvalues[self.eigenvalues < self.continuum]


def _weighted_residual(A, Bdiag, lam, v):
    res = A @ v - lam * (Bdiag * v)
    return float(np.linalg.norm(res / np.sqrt(Bdiag)) / np.linalg.norm(np.sqrt(Bdiag) * v))


def solve_lowest(
    p: ReducedProblem, m: Mesh, count: int = 1, tol: float = 1e-8, keep_vectors=False
) -> EigenResult:
    """Lowest ``count`` eigenvalues by shift-invert Lanczos.

    The shift sits just under the window bottom ``(pi/2d)^2`` so the
    eigenvalues nearest to it are the lowest ones. The start vector is
    all-ones, B-normalised, which makes every run reproducible. Residuals
    ``||A v - lam B v||_{B^-1} / ||v||_B`` above ``tol`` get a few rounds of
    inverse iteration with the same factorisation.
    """
    if count < 1:
        raise ValueError("count must be positive")
    A, B = assemble(p, m)
    n_dof = A.shape[0]
    if count >= n_dof - 1:
        raise ValueError(f"count {count} too large for {n_dof} unknowns")
    window = spectral_window(p.geometry)
    sigma = 0.9 * window.lower
    Bdiag = B.diagonal()
    v0 = np.ones(n_dof) / math.sqrt(Bdiag.sum())
    lu = spla.splu((A - sigma * B).tocsc())
    op = spla.LinearOperator((n_dof, n_dof), matvec=lu.solve, dtype=float)
    try:
        vals, vecs = spla.eigsh(
            A, k=count, M=B, sigma=sigma, which="LM", v0=v0, OPinv=op, tol=0, maxiter=5000
        )
    except spla.ArpackNoConvergence as exc:
        raise SolverError("ARPACK did not converge") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    residuals = np.empty(count)
    for k in range(count):
        v = vecs[:, k]
        lam = vals[k]
        res = _weighted_residual(A, Bdiag, lam, v)
        for _ in range(5):
            if res <= tol:
                break
            v = lu.solve(Bdiag * v)
            v /= math.sqrt(float(v @ (Bdiag * v)))
            lam = float(v @ (A @ v))
            res = _weighted_residual(A, Bdiag, lam, v)
        vals[k], vecs[:, k], residuals[k] = lam, v, res
    if np.any(residuals > tol):
        raise SolverError("residual target missed", float(residuals.max()))
    return EigenResult(
        n=p.n,
        eigenvalues=vals,
        residuals=residuals,
        mesh=m.describe(),
        h=m.h,
        outer_bc=p.outer_bc,
        continuum=window.upper,
        vectors=vecs if keep_vectors else None,
    )


def interpolate(p: ReducedProblem, m: Mesh, func) -> np.ndarray:
    """Sample ``func(r, z)`` at the free nodes, in unknown order."""
    keep = free_nodes(p, m)
    rr, zz = np.meshgrid(m.r, m.z, indexing="ij")
    values = np.asarray(func(rr, zz), dtype=float)
    return values[keep]


def rayleigh_quotient(A, B, v) -> float:
    return float(v @ (A @ v)) / float(v @ (B @ v))


@dataclass
class RefinementStudy:
    """Lowest eigenvalue on a sequence of halved meshes."""

    h: list
    values: list
    meshes: list

    @property
    def orders(self) -> list:
        """Observed order from every consecutive triple of levels."""
        out = []
        v = self.values
        for k in range(len(v) - 2):
            d1, d2 = v[k + 1] - v[k], v[k + 2] - v[k + 1]
            out.append(math.log2(d1 / d2) if d1 * d2 > 0 else math.nan)
        return out

    @property
    def order(self) -> float:
        return self.orders[-1]

    @property
    def extrapolated(self) -> float:
        p = self.order
        return self.values[-1] + (self.values[-1] - self.values[-2]) / (2**p - 1)

    @property
    def error_estimate(self) -> float:
        return abs(self.extrapolated - self.values[-1])

    def rows(self):
        orders = [math.nan, math.nan] + self.orders
        return list(zip(self.h, self.values, orders))


def refine_study(p: ReducedProblem, levels: int = 3, base: Mesh | None = None) -> RefinementStudy:
    """Solve on ``levels`` meshes, halving every cell each time."""
    if levels < 3:
        raise ValueError("need at least 3 levels to estimate an order")
    mesh = base if base is not None else Mesh.with_spacing(p, p.geometry.d / 16)
    hs, vals, names = [], [], []
    for _ in range(levels):
        res = solve_lowest(p, mesh, 1)
        hs.append(mesh.h)
        vals.append(float(res.eigenvalues[0]))
        names.append(mesh.describe())
        mesh = mesh.refined()
    return RefinementStudy(hs, vals, names)


@dataclass(frozen=True)
class GapRow:
    a: float
    eigenvalue: float
    gap: float
    scaled_gap: float
    bracket_gap: float
    error_estimate: float


def gap_asymptotics(geometries, spacing: float | None = None) -> list[GapRow]:
    """Gap ``lam_1 - (pi/2d)^2`` and ``gap * a^2`` for growing windows.

    Each geometry is solved on a mesh of cell size ``spacing`` (default
    ``d / 40``) and on the mesh with every cell halved; the difference is
    reported as the discretisation error estimate.
    """
    geometries = list(geometries)
    ds = {g.d for g in geometries}
    if len(ds) != 1:
        raise ValueError("all geometries must share the layer width")
    if any(b.a <= a.a for a, b in zip(geometries, geometries[1:])):
        raise ValueError("window radii must be ascending")
    rows = []
    x01 = bessel_zero(0, 1).value
    for g in geometries:
        h = g.d / 40 if spacing is None else spacing
        p = ReducedProblem(g, 0)
        mesh = Mesh.with_spacing(p, h)
        coarse = solve_lowest(p, mesh, 1).eigenvalues[0]
        fine = solve_lowest(p, mesh.refined(), 1).eigenvalues[0]
        gap = fine - spectral_window(g).lower
        rows.append(
            GapRow(
                a=g.a,
                eigenvalue=float(fine),
                gap=float(gap),
                scaled_gap=float(gap * g.a**2),
                bracket_gap=(x01 / g.a) ** 2,
                error_estimate=float(abs(fine - coarse)),
            )
        )
    return rows
