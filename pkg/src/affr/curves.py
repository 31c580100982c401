"""Functional-data primitives: grids, quadrature, centering, and empirical FPCA.

Curves live on a shared evaluation grid over [0, 1] and integrals are taken
with the composite trapezoid rule, so every inner product is a weighted dot
product.  The FPCA here eigendecomposes the weighted discretized covariance
``W^{1/2} K W^{1/2}`` and rescales eigenvectors by ``W^{-1/2}``, which keeps
the eigenfunctions orthonormal in the quadrature inner product even on
non-uniform grids.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "FunctionalSample",
    "FpcaBasis",
    "make_grid",
    "grid_from_points",
    "inner_product",
    "center",
    "fpca",
    "project_scores",
    "truncate_basis",
]

# Relative eigenvalue threshold below which a component counts as numerically zero.
_RANK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Grid:
    """Ordered evaluation points on [0, 1] with quadrature weights."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("grid needs at least two points")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        if wts.shape != pts.shape:
            raise ValueError("weights must align with points")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(wts)):
            raise ValueError("grid entries must be finite")
        if np.any(wts < 0):
            raise ValueError("quadrature weights must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def size(self) -> int:
        return self.points.size

    def matches(self, other: "Grid") -> bool:
        """Exact grid equality (same evaluation points)."""
        return np.array_equal(self.points, other.points)


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """A sample of curves: row i holds curve i evaluated on ``grid``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if vals.shape[1] != self.grid.size:
            raise ValueError(
                f"curves have {vals.shape[1]} values but the grid has {self.grid.size} points"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("curve values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def n_curves(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class FpcaBasis:
    """Empirical eigenfunctions of a curve sample.

    ``eigenfunctions`` has one component per row, orthonormal under the grid's
    quadrature inner product; ``eigenvalues`` are nonincreasing; ``pev`` holds
    cumulative explained-variance fractions.  ``n_selected`` is the number of
    components chosen by the truncation rule passed to :func:`fpca`, and
    ``rank_deficient`` flags a fixed rule that asked for more components than
    the sample's numerical rank.
    """

    grid: Grid
    eigenfunctions: np.ndarray
    eigenvalues: np.ndarray
    mean_curve: np.ndarray
    pev: np.ndarray
    n_selected: int
    rank_deficient: bool = field(default=False)

    @property
    def n_components(self) -> int:
        return self.eigenfunctions.shape[0]


def make_grid(m: int) -> Grid:
    """Equispaced grid of ``m`` points on [0, 1] with trapezoid weights."""
    if m < 2:
        raise ValueError("m must be at least 2")
    pts = np.linspace(0.0, 1.0, m)
    step = 1.0 / (m - 1)
    wts = np.full(m, step)
    wts[0] = wts[-1] = step / 2.0
    return Grid(pts, wts)


def grid_from_points(points) -> Grid:
    """Grid over arbitrary strictly increasing points, with trapezoid weights."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size < 2:
        raise ValueError("need at least two grid points")
    wts = np.empty_like(pts)
    wts[0] = (pts[1] - pts[0]) / 2.0
    wts[-1] = (pts[-1] - pts[-2]) / 2.0
    if pts.size > 2:
        wts[1:-1] = (pts[2:] - pts[:-2]) / 2.0
    return Grid(pts, wts)


def inner_product(grid: Grid, f, g) -> float:
    """Quadrature L2 inner product of two curves on the same grid."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (grid.size,) or g.shape != (grid.size,):
        raise ValueError("curves do not match the grid")
    return float(np.sum(grid.weights * f * g))


def center(sample: FunctionalSample) -> tuple[FunctionalSample, np.ndarray]:
    """Remove the pointwise mean curve; returns (centered sample, mean curve)."""
    mean = sample.values.mean(axis=0)
    return FunctionalSample(sample.grid, sample.values - mean), mean


def _principal_decomposition(centered: np.ndarray, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose the discretized covariance of already-centered curves.

    Returns (eigenvalues, eigenfunctions) with eigenvalues descending and
    eigenfunctions orthonormal under the quadrature inner product.  The
    covariance uses divisor n.
    """
    n = centered.shape[0]
    cov = centered.T @ centered / n
    sqw = np.sqrt(grid.weights)
    sym = sqw[:, None] * cov * sqw[None, :]
    evals, evecs = np.linalg.eigh(sym)
    evals = np.clip(evals[::-1], 0.0, None)
    evecs = evecs[:, ::-1]
    efuns = (evecs / sqw[:, None]).T
    # Sign convention: largest-magnitude entry of each eigenfunction is positive.
    for row in efuns:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return evals, efuns


def fpca(sample: FunctionalSample, n_components: int | float | None = None) -> FpcaBasis:
    """Empirical functional PCA of a curve sample.

    Parameters
    ----------
    sample : FunctionalSample
        Curves to decompose; they are centered internally.
    n_components : int, float, or None
        Truncation rule.  An ``int`` selects that many components (must not
        exceed ``min(n, m)``); a ``float`` in (0, 1] selects the smallest
        number of components whose cumulative explained variance reaches the
        cutoff (requires n >= 2); ``None`` selects every numerically nonzero
        component.

    Returns
    -------
    FpcaBasis
        All ``min(n, m)`` leading components are stored; ``n_selected``
        records how many the rule picked.
    """
    n, m = sample.values.shape
    centered, mean = center(sample)
    evals, efuns = _principal_decomposition(centered.values, sample.grid)

    keep = min(n, m)
    evals = evals[:keep]
    efuns = efuns[:keep]

    total = evals.sum()
    if total > 0:
        pev = np.cumsum(evals) / total
        rank = int(np.sum(evals > _RANK_TOL * max(evals[0], 1.0)))
    else:
        # Degenerate sample with zero variance: nothing to explain.
        pev = np.ones(keep)
        rank = 0

    rank_deficient = False
    if n_components is None:
        n_selected = rank
    elif isinstance(n_components, (int, np.integer)):
        if n_components < 1 or n_components > keep:
            raise ValueError(f"n_components must be in [1, {keep}]")
        if n_components > rank:
            warnings.warn(
                f"requested {n_components} components but the sample has numerical rank {rank}",
                stacklevel=2,
            )
            rank_deficient = True
            n_selected = rank
        else:
            n_selected = int(n_components)
    else:
        cutoff = float(n_components)
        if not 0.0 < cutoff <= 1.0:
            raise ValueError("explained-variance cutoff must lie in (0, 1]")
        if n < 2:
            raise ValueError("explained-variance rule needs at least two curves")
        n_selected = int(np.searchsorted(pev, cutoff - 1e-12) + 1)
        n_selected = min(n_selected, max(rank, 1))

    return FpcaBasis(
        grid=sample.grid,
        eigenfunctions=efuns,
        eigenvalues=evals,
        mean_curve=mean,
        pev=pev,
        n_selected=n_selected,
        rank_deficient=rank_deficient,
    )


def project_scores(sample: FunctionalSample, basis: FpcaBasis, n_components: int) -> np.ndarray:
    """Scores of each curve (centered by the basis mean) on the leading components."""
    if not sample.grid.matches(basis.grid):
        raise ValueError("sample grid does not match the basis grid")
    if n_components < 1 or n_components > basis.n_components:
        raise ValueError(f"n_components must be in [1, {basis.n_components}]")
    centered = sample.values - basis.mean_curve
    return (centered * basis.grid.weights) @ basis.eigenfunctions[:n_components].T


def truncate_basis(basis: FpcaBasis, n_components: int) -> FpcaBasis:
    """Keep only the leading components (pev entries keep their cumulative meaning)."""
    if n_components < 1 or n_components > basis.n_components:
        raise ValueError(f"n_components must be in [1, {basis.n_components}]")
    return FpcaBasis(
        grid=basis.grid,
        eigenfunctions=basis.eigenfunctions[:n_components],
        eigenvalues=basis.eigenvalues[:n_components],
        mean_curve=basis.mean_curve,
        pev=basis.pev[:n_components],
        n_selected=min(basis.n_selected, n_components),
        rank_deficient=basis.rank_deficient,
    )
