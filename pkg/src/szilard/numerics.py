"""Numerical kernels: interior grids, symmetric-tridiagonal eigensolution,
certified series summation, and adaptive quadrature.

Everything here is a pure function of its inputs.  The eigensolver and the
series summation both enforce their accuracy contracts before returning,
so downstream physics code never has to second-guess them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal as _lapack_eigh_tridiagonal

from .exceptions import NumericsError

__all__ = [
    "Grid",
    "TridiagonalSymmetric",
    "SeriesSum",
    "eig_tridiagonal",
    "sum_series",
    "integrate",
]

# residual contract: ||Mv - lambda*v|| <= RESIDUAL_FACTOR * max|entry|
RESIDUAL_FACTOR = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform grid of interior points on (x_min, x_max).

    The endpoints themselves are excluded: anything sampled on the grid is
    implicitly pinned to zero at both walls, which is how the hard-wall
    boundary condition enters the discretization.  Hence
    spacing = (x_max - x_min) / (n_points + 1).
    """

    n_points: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.n_points < 3:
            raise ValueError(f"need at least 3 interior points, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points + 1)

    @property
    def points(self) -> np.ndarray:
        """Interior points x_min + h, x_min + 2h, ..., x_max - h."""
        h = self.spacing
        return self.x_min + h * np.arange(1, self.n_points + 1)


@dataclass(frozen=True)
class TridiagonalSymmetric:
    """Real symmetric tridiagonal matrix stored as two bands."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diagonal, dtype=float)
        off = np.asarray(self.off_diagonal, dtype=float)
        if diag.ndim != 1 or off.ndim != 1:
            raise ValueError("bands must be one-dimensional")
        if len(off) != len(diag) - 1:
            raise ValueError(
                f"off-diagonal length {len(off)} does not match diagonal length {len(diag)}"
            )
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "off_diagonal", off)

    @property
    def dim(self) -> int:
        return len(self.diagonal)

    @property
    def scale(self) -> float:
        """Largest absolute entry; the reference scale for residual checks."""
        m = float(np.max(np.abs(self.diagonal)))
        if len(self.off_diagonal):
            m = max(m, float(np.max(np.abs(self.off_diagonal))))
        return m

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        out[:-1] += self.off_diagonal * v[1:]
        out[1:] += self.off_diagonal * v[:-1]
        return out


def eig_tridiagonal(matrix: TridiagonalSymmetric, k_lowest: int):
    """Lowest k eigenpairs of a symmetric tridiagonal matrix.

    Eigenvalues come from bisection on Sturm sequences and eigenvectors from
    inverse iteration, which keeps the cost at O(n) per requested pair.
    Returns a list of (eigenvalue, eigenvector) tuples sorted ascending, each
    vector unit-norm.  Every returned pair is verified against the residual
    contract ||Mv - lambda v|| <= 1e-10 * scale; a violation raises
    NumericsError naming the offending pair.
    """
    n = matrix.dim
    if not 1 <= k_lowest <= n:
        raise ValueError(f"k_lowest must lie in [1, {n}], got {k_lowest}")
    try:
        vals, vecs = _lapack_eigh_tridiagonal(
            matrix.diagonal,
            matrix.off_diagonal,
            select="i",
            select_range=(0, k_lowest - 1),
            lapack_driver="stebz",
            tol=1e-12,
        )
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"tridiagonal eigensolver did not converge: {exc}") from exc

    limit = RESIDUAL_FACTOR * matrix.scale
    pairs = []
    for j in range(k_lowest):
        v = vecs[:, j]
        v = v / np.linalg.norm(v)
        residual = float(np.linalg.norm(matrix.matvec(v) - vals[j] * v))
        if residual > limit:
            raise NumericsError(
                f"eigenpair {j} failed the residual contract: "
                f"{residual:.3e} > {limit:.3e}"
            )
        pairs.append((float(vals[j]), v))
    return pairs


class SeriesSum(NamedTuple):
    value: float
    terms_used: int


def sum_series(
    terms: Iterable[float],
    tail_bound: Callable[[int], float],
    rel_tol: float = 1e-10,
    batch: int = 1,
    max_terms: int = 100_000,
) -> SeriesSum:
    """Sum a series whose remainder admits an explicit bound.

    `terms` yields successive terms; `tail_bound(n)` must bound the total
    magnitude of everything not yet consumed after n terms.  Terms are
    consumed `batch` at a time between bound checks; the result is
    insensitive to the batching, only the stopping point moves within the
    certified tolerance.  Stops once tail_bound(n) <= rel_tol * |partial|,
    or when the generator is exhausted (finite series sum exactly).
    """
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    it = iter(terms)
    total = 0.0
    used = 0
    bound = np.inf
    while used < max_terms:
        exhausted = False
        for _ in range(batch):
            try:
                total += next(it)
            except StopIteration:
                exhausted = True
                break
            used += 1
        if exhausted:
            return SeriesSum(total, used)
        bound = float(tail_bound(used))
        if bound <= rel_tol * abs(total):
            return SeriesSum(total, used)
    raise NumericsError(
        f"series tail bound not satisfied after {used} terms "
        f"(last bound {bound:.3e}, partial sum {total:.6e})"
    )


def integrate(f: Callable[[float], float], a: float, b: float, rel_tol: float = 1e-9) -> float:
    """Adaptive quadrature of f over [a, b] to relative tolerance rel_tol.

    Raises NumericsError if the adaptive subdivision gives up before
    reaching the tolerance.
    """
    if a == b:
        return 0.0
    result = quad(f, a, b, epsabs=0.0, epsrel=rel_tol, full_output=1)
    if len(result) > 3:
        # fourth element is the integrator's explanation of the failure
        raise NumericsError(f"quadrature failed on [{a}, {b}]: {result[3]}")
    return float(result[0])
