"""Trivariate reproducing kernels on [0,1]^2 x R, factorizations, and bandwidth heuristics.

Two stationary families are supported, both separable across the three
coordinates:

* ``gaussian``:     k(p, q) = exp(-delta * ((dt)^2 + (ds)^2 + (dx)^2))
* ``exponential``:  k(p, q) = exp(-delta * (|dt| + |ds| + |dx|))

A kernel may additionally carry a domain mask restricting, for each output
time t, which input times s contribute.  ``historical`` uses the family
A_t = [0, t] (closed at the endpoint, applied at grid nodes), which makes
fits and predictions at time t blind to covariate values after t.  ``full``
is the degenerate family A_t = [0, 1]; it routes evaluation through the
masked code path but is mathematically identical to no mask, which makes it
useful for validation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .curves import FunctionalSample

__all__ = ["KernelSpec", "KPoint", "kernel_eval", "factorize", "gram", "median_bandwidth"]

FAMILIES = ("gaussian", "exponential")
MASKS = ("none", "historical", "full")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family, bandwidth, and optional domain mask."""

    family: str
    delta: float
    mask: str = "none"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; choose from {FAMILIES}")
        if self.mask not in MASKS:
            raise ValueError(f"unknown mask {self.mask!r}; choose from {MASKS}")
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise ValueError("delta must be a positive finite number")

    @property
    def masked(self) -> bool:
        return self.mask != "none"


@dataclass(frozen=True)
class KPoint:
    """A kernel argument triple (t, s, x) with t, s in [0, 1]."""

    t: float
    s: float
    x: float

    def __post_init__(self):
        if not (0.0 <= self.t <= 1.0 and 0.0 <= self.s <= 1.0):
            raise ValueError("t and s must lie in [0, 1]")


def pair_part(family: str, delta: float, a, b) -> np.ndarray:
    """One separable coordinate factor, exp(-delta * dist(a, b)), broadcast over arrays."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if family == "gaussian":
        return np.exp(-delta * d * d)
    return np.exp(-delta * np.abs(d))


def mask_indicator(spec: KernelSpec, t, s) -> np.ndarray:
    """Indicator 1_{s in A_t} for the spec's mask family, broadcast over arrays."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if spec.mask == "historical":
        return (s <= t).astype(float)
    return np.ones(np.broadcast(t, s).shape)


def kernel_eval(spec: KernelSpec, p: KPoint, q: KPoint) -> float:
    """Evaluate the (possibly masked) kernel at a pair of argument triples."""
    if spec.family == "gaussian":
        dist = (p.t - q.t) ** 2 + (p.s - q.s) ** 2 + (p.x - q.x) ** 2
    else:
        dist = abs(p.t - q.t) + abs(p.s - q.s) + abs(p.x - q.x)
    val = float(np.exp(-spec.delta * dist))
    if spec.masked:
        val *= float(mask_indicator(spec, p.t, p.s)) * float(mask_indicator(spec, q.t, q.s))
    return val


def factorize(spec: KernelSpec):
    """Split the unmasked kernel into a time factor and a cross factor.

    Returns callables ``time_factor(t, t')`` and ``cross_factor(s, s', x, x')``
    whose product equals the unmasked ``kernel_eval`` for all arguments.
    """

    def time_factor(t, tp):
        return pair_part(spec.family, spec.delta, t, tp)

    def cross_factor(s, sp, x, xp):
        return pair_part(spec.family, spec.delta, s, sp) * pair_part(
            spec.family, spec.delta, x, xp
        )

    return time_factor, cross_factor


def gram(spec: KernelSpec, points) -> np.ndarray:
    """Symmetric kernel matrix over a list of KPoints (masked if the spec is)."""
    t = np.array([p.t for p in points])
    s = np.array([p.s for p in points])
    x = np.array([p.x for p in points])
    if spec.family == "gaussian":
        dist = (
            (t[:, None] - t[None, :]) ** 2
            + (s[:, None] - s[None, :]) ** 2
            + (x[:, None] - x[None, :]) ** 2
        )
        g = np.exp(-spec.delta * dist)
    else:
        dist = (
            np.abs(t[:, None] - t[None, :])
            + np.abs(s[:, None] - s[None, :])
            + np.abs(x[:, None] - x[None, :])
        )
        g = np.exp(-spec.delta * dist)
    if spec.masked:
        ind = mask_indicator(spec, t, s)
        g = ind[:, None] * g * ind[None, :]
    return g


def median_bandwidth(
    curves: FunctionalSample, subsample: int = 200, seed: int | None = 0
) -> float:
    """Bandwidth from the median heuristic over curve graph triples.

    Draws ``subsample`` random triples (t, s, X_i(s)) from the sample's graph
    points, computes all pairwise squared Euclidean distances between them,
    and returns ``1 / (2 * median)``.  Falls back to 1.0 with a warning when
    the drawn points are degenerate (median distance zero).
    """
    if subsample < 2:
        raise ValueError("subsample must be at least 2")
    rng = np.random.default_rng(seed)
    vals = curves.values
    n, m = vals.shape
    pts = curves.grid.points
    i = rng.integers(0, n, size=subsample)
    a = rng.integers(0, m, size=subsample)
    b = rng.integers(0, m, size=subsample)
    triples = np.column_stack([pts[a], pts[b], vals[i, b]])
    diff = triples[:, None, :] - triples[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    med = float(np.median(sq[np.triu_indices(subsample, k=1)]))
    if med <= 0.0:
        warnings.warn("degenerate graph points; falling back to delta = 1.0", stacklevel=2)
        return 1.0
    return 1.0 / (2.0 * med)
