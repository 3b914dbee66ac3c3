"""Sampling the infinite model: root neighborhoods and the direct
clustering estimator.

Conditionally on a root of weight w, its neighbors form an inhomogeneous
Poisson process: the neighbor count is Poisson(M(w)) and, given the count,
the (location, weight) marks are i.i.d. from the normalized neighbor
intensity.  Edges among neighbors are then placed independently with the
connection probability.  The direct clustering estimator buckets sampled
neighborhoods by their realized degree and averages the ordered-pair
triangle count over k(k-1), which converges to the clustering function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _sampling, theory
from .model import (
    DomainError,
    Estimate,
    ModelParams,
    connection_probability,
    xi_alpha,
)

__all__ = [
    "RootNeighborhood",
    "sample_neighbor",
    "sample_root_neighborhood",
    "neighborhood_triangle_count",
    "clustering_function_mc",
]


@dataclass
class RootNeighborhood:
    """A sampled neighborhood of the root in the infinite model.

    locations has shape (N, d); edges is an (E, 2) integer array of index
    pairs (i < j) among the N neighbors.
    """

    root_weight: float
    locations: np.ndarray
    weights: np.ndarray
    edges: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=np.int64))

    @property
    def degree(self) -> int:
        return len(self.weights)


def sample_neighbor(w: float, params: ModelParams,
                    rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """One (location, weight) draw from the normalized neighbor intensity.

    The weight comes from the density proportional to g(w, v) * v**(-beta)
    (piecewise power inversion); the location radius from the kernel
    profile at scale g(w, V); the direction is uniform.  Needs alpha > 1.
    """
    params.require_long_range()
    if not w > 1.0:
        raise DomainError(f"root weight must exceed 1, got {w}")
    points, weights = _sampling.sample_neighbors(rng, 1, w, params)
    return points[0], float(weights[0])


def _pair_edges(locations: np.ndarray, weights: np.ndarray, params: ModelParams,
                rng: np.random.Generator) -> np.ndarray:
    """Independent edge decisions among the sampled neighbors."""
    n = len(weights)
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    iu, ju = np.triu_indices(n, k=1)
    r = np.linalg.norm(locations[iu] - locations[ju], axis=1)
    p = connection_probability(r, weights[iu], weights[ju], params)
    keep = rng.random(len(iu)) < p
    return np.column_stack([iu[keep], ju[keep]]).astype(np.int64)


def sample_root_neighborhood(w: float, params: ModelParams,
                             rng: np.random.Generator) -> RootNeighborhood:
    """Sample the full local view at a weight-w root.

    N ~ Poisson(M(w)) neighbors, i.i.d. marks, then independent pairwise
    edges with the connection probability.
    """
    params.require_long_range()
    if not w > 1.0:
        raise DomainError(f"root weight must exceed 1, got {w}")
    n = int(rng.poisson(theory.mean_degree(w, params)))
    if n == 0:
        return RootNeighborhood(w, np.empty((0, params.d)), np.empty(0))
    locations, weights = _sampling.sample_neighbors(rng, n, w, params)
    edges = _pair_edges(locations, weights, params, rng)
    return RootNeighborhood(w, locations, weights, edges)


def neighborhood_triangle_count(nbhd: RootNeighborhood) -> int:
    """Ordered-pair triangle count at the root: twice the edge count among
    its neighbors."""
    return 2 * len(nbhd.edges)


def clustering_function_mc(k_min: int, k_max: int, params: ModelParams,
                           n_samples: int, rng: np.random.Generator,
                           batch: int = 200_000) -> dict[int, Estimate]:
    """Direct Monte Carlo of the clustering function on a degree range.

    Repeatedly draws a Pareto root weight and its Poisson degree, realizes
    the neighborhood only when the degree lands in [k_min, k_max], and
    averages the ordered-pair triangle count over k(k-1) per degree bucket.
    Degrees never hit stay absent from the result.  Desk-scale tool: the
    per-neighborhood cost is quadratic in k, so keep k_max modest (<= 50).
    """
    if not (2 <= k_min <= k_max):
        raise DomainError("need 2 <= k_min <= k_max")
    if k_max > 50:
        raise DomainError("k_max above 50 is past the desk scale of this estimator")
    params.require_long_range()

    sums = {k: 0.0 for k in range(k_min, k_max + 1)}
    sq_sums = {k: 0.0 for k in range(k_min, k_max + 1)}
    counts = {k: 0 for k in range(k_min, k_max + 1)}
    xi = xi_alpha(params)

    remaining = n_samples
    while remaining > 0:
        m = min(batch, remaining)
        remaining -= m
        roots = rng.random(m) ** (-1.0 / (params.beta - 1.0))
        degrees = rng.poisson(xi * _sampling.neighbor_intensity_mass(roots, params))
        for k in range(k_min, k_max + 1):
            hits = roots[degrees == k]
            if len(hits) == 0:
                continue
            pts, wts = _sampling.sample_neighbors(rng, len(hits) * k,
                                                  np.repeat(hits, k), params)
            pts = pts.reshape(len(hits), k, params.d)
            wts = wts.reshape(len(hits), k)
            iu, ju = np.triu_indices(k, 1)
            r = np.linalg.norm(pts[:, iu, :] - pts[:, ju, :], axis=2)
            p = connection_probability(r, wts[:, iu], wts[:, ju], params)
            n_edges = (rng.random(p.shape) < p).sum(axis=1)
            ratios = 2.0 * n_edges / (k * (k - 1.0))
            sums[k] += float(ratios.sum())
            sq_sums[k] += float(ratios @ ratios)
            counts[k] += len(ratios)

    out: dict[int, Estimate] = {}
    for k in range(k_min, k_max + 1):
        n = counts[k]
        if n == 0:
            continue
        mean = sums[k] / n
        var = max(sq_sums[k] - n * mean * mean, 0.0) / max(n - 1, 1)
        out[k] = Estimate(mean, float(np.sqrt(var / n)), n)
    return out
