"""Uniform grids, finite differences, quadrature, tridiagonal eigenvalues and root finding."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy.linalg import eigh_tridiagonal

MIN_POINTS = 16


class NoSignChangeError(ValueError):
    """Raised when a root bracket does not change sign."""


@dataclass(frozen=True)
class Grid:
    """Uniform radial grid with Dirichlet conditions at both ends."""

    r_min: float
    r_max: float
    n_points: int
    boundary: str = "dirichlet_both"

    def __post_init__(self):
        if not (np.isfinite(self.r_min) and np.isfinite(self.r_max)):
            raise ValueError("grid bounds must be finite")
        if not self.r_min < self.r_max:
            raise ValueError(f"need r_min < r_max, got {self.r_min} >= {self.r_max}")
        if int(self.n_points) != self.n_points or self.n_points < MIN_POINTS:
            raise ValueError(f"n_points must be an integer >= {MIN_POINTS}, got {self.n_points}")
        if self.boundary != "dirichlet_both":
            raise ValueError(f"unsupported boundary tag {self.boundary!r}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def spacing(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points - 1)

    def node(self, i: int) -> float:
        return self.r_min + i * self.spacing

    @property
    def r(self) -> np.ndarray:
        return self.r_min + np.arange(self.n_points) * self.spacing

    @property
    def midpoint_index(self) -> int:
        return (self.n_points - 1) // 2


def build_grid(r_min: float, r_max: float, n_points: int) -> Grid:
    return Grid(float(r_min), float(r_max), n_points)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples of a function on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} samples, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function has non-finite samples")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, np.broadcast_to(fn(grid.r), (grid.n_points,)).astype(float))


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix stored as its diagonal and one off-diagonal."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        e = np.asarray(self.off_diagonal, dtype=float)
        if d.ndim != 1 or d.size == 0:
            raise ValueError("diagonal must be a non-empty 1-d sequence")
        if e.shape != (d.size - 1,):
            raise ValueError(f"off-diagonal must have length {d.size - 1}, got {e.size}")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def size(self) -> int:
        return self.diagonal.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diagonal * x
        y[:-1] += self.off_diagonal * x[1:]
        y[1:] += self.off_diagonal * x[:-1]
        return y


def derivative_values(values: np.ndarray, h: float) -> np.ndarray:
    """Second-order central differences, second-order one-sided at the ends."""
    return np.gradient(values, h, edge_order=2)


def derivative(f: GridFunction) -> GridFunction:
    return GridFunction(f.grid, derivative_values(f.values, f.grid.spacing))


def integrate_values(values: np.ndarray, h: float) -> float:
    return float(_integrate.simpson(values, dx=h))


def integrate(f: GridFunction) -> float:
    """Composite Simpson quadrature over the whole grid."""
    return integrate_values(f.values, f.grid.spacing)


def cumulative_values(values: np.ndarray, h: float, anchor_index: int) -> np.ndarray:
    # accumulate outward from the anchor so values near it carry no cancellation error
    values = np.asarray(values, dtype=float)
    right = _integrate.cumulative_trapezoid(values[anchor_index:], dx=h)
    left = _integrate.cumulative_trapezoid(values[anchor_index::-1], dx=h)
    return np.concatenate((-left[::-1], [0.0], right))


def cumulative_integral(f: GridFunction, anchor_index: int = 0) -> GridFunction:
    """Trapezoid running integral, zero at ``anchor_index``."""
    if not 0 <= anchor_index < f.grid.n_points:
        raise IndexError(f"anchor index {anchor_index} outside [0, {f.grid.n_points})")
    return GridFunction(f.grid, cumulative_values(f.values, f.grid.spacing, anchor_index))


def sturm_count(op: TridiagonalOperator, x: float) -> int:
    """Number of eigenvalues of ``op`` strictly below ``x``."""
    d, e2 = op.diagonal, op.off_diagonal**2
    tiny = np.finfo(float).tiny
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    for i in range(1, op.size):
        if q == 0.0:
            q = tiny
        q = d[i] - x - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def eigenvalues_lowest(op: TridiagonalOperator, k: int, tol: float = 1e-12) -> np.ndarray:
    """The ``k`` smallest eigenvalues in ascending order (LAPACK bisection)."""
    return eigenvalues_range(op, 0, k - 1, tol)


def eigenvalues_range(op: TridiagonalOperator, lo: int, hi: int, tol: float = 1e-12) -> np.ndarray:
    if not 0 <= lo <= hi < op.size:
        raise ValueError(f"eigenvalue indices [{lo}, {hi}] outside [0, {op.size})")
    if op.size == 1:
        return op.diagonal.copy()
    return eigh_tridiagonal(
        op.diagonal,
        op.off_diagonal,
        eigvals_only=True,
        select="i",
        select_range=(lo, hi),
        lapack_driver="stebz",
        tol=tol,
    )


def eigenpair(op: TridiagonalOperator, index: int, tol: float = 1e-12) -> tuple[float, np.ndarray]:
    """Eigenvalue ``index`` (0-based, ascending) and its unit eigenvector."""
    if not 0 <= index < op.size:
        raise ValueError(f"eigenvalue index {index} outside [0, {op.size})")
    if op.size == 1:
        return float(op.diagonal[0]), np.ones(1)
    w, v = eigh_tridiagonal(
        op.diagonal,
        op.off_diagonal,
        select="i",
        select_range=(index, index),
        lapack_driver="stebz",
        tol=tol,
    )
    return float(w[0]), v[:, 0]


def find_root_bracketed(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> tuple[float, int]:
    """Root of ``f`` inside ``[lo, hi]`` by Brent's method.

    Returns the root and the number of iterations used. Brent's method keeps a
    sign-changing bracket at every step, so the result never leaves ``[lo, hi]``.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, 0
    if fhi == 0.0:
        return hi, 0
    if np.sign(flo) == np.sign(fhi):
        raise NoSignChangeError(f"f({lo}) = {flo:.3g} and f({hi}) = {fhi:.3g} share a sign")
    root, info = _optimize.brentq(f, lo, hi, xtol=tol, maxiter=500, full_output=True)
    return float(root), int(info.iterations)


def dirichlet_hamiltonian(grid: Grid, potential: np.ndarray) -> TridiagonalOperator:
    """-d^2/dr^2 + U on interior nodes; both end nodes are pinned to zero."""
    h2 = grid.spacing**2
    u = np.asarray(potential, dtype=float)[1:-1]
    return TridiagonalOperator(2.0 / h2 + u, np.full(u.size - 1, -1.0 / h2))
