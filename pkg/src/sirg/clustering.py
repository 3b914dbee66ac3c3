"""Empirical clustering statistics on finite graphs and sampled
neighborhoods.

The per-vertex triangle count follows the ordered-pair convention: Delta_v
is twice the number of unordered neighbor pairs of v that are adjacent, so
the local clustering Delta_v / (d_v (d_v - 1)) lands in [0, 1] with no extra
factors.  The clustering spectrum maps each degree k >= 2 to the number of
such vertices and their mean local clustering; log-binning, power-law slope
fits, the finite-size degree threshold and the typical-triangle geometry
diagnostic build on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import _sampling, theory
from .graphs import Graph
from .model import (
    DomainError,
    InsufficientDataError,
    ModelParams,
    connection_probability,
)

__all__ = [
    "degrees",
    "triangles_per_vertex",
    "ClusteringSpectrum",
    "clustering_spectrum",
    "combine_spectra",
    "log_binned_spectrum",
    "SlopeFit",
    "fit_slope",
    "FiniteSizeThreshold",
    "finite_size_threshold",
    "TriangleGeometry",
    "typical_triangle_stats",
    "TRIANGLE_STATS",
]


def degrees(graph: Graph) -> np.ndarray:
    return np.diff(graph.indptr).astype(np.int64)


@njit(cache=True)
def _count_triangles(optr, oind, tri):  # pragma: no cover - via wrapper
    n = optr.shape[0] - 1
    for u in range(n):
        for p in range(optr[u], optr[u + 1]):
            v = oind[p]
            i = optr[u]
            j = optr[v]
            iend = optr[u + 1]
            jend = optr[v + 1]
            while i < iend and j < jend:
                x = oind[i]
                y = oind[j]
                if x == y:
                    tri[u] += 1
                    tri[v] += 1
                    tri[x] += 1
                    i += 1
                    j += 1
                elif x < y:
                    i += 1
                else:
                    j += 1


def triangles_per_vertex(graph: Graph) -> np.ndarray:
    """Ordered-pair triangle counts: Delta_v = 2 x (triangles through v).

    Orients each edge from lower to higher (degree, id) rank; every triangle
    is then discovered exactly once by intersecting the sorted out-lists of
    its lowest-rank edge.  Cost is proportional to the sum of out-degree
    intersections, which degree ordering keeps near-linear in the edge count
    even with heavy-tailed hubs.
    """
    deg = degrees(graph)
    n = graph.n
    rank = np.empty(n, dtype=np.int64)
    rank[np.lexsort((np.arange(n), deg))] = np.arange(n)
    rows = np.repeat(np.arange(n), deg)
    forward = rank[graph.indices] > rank[rows]
    optr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(optr, rows[forward] + 1, 1)
    np.cumsum(optr, out=optr)
    oind = graph.indices[forward].astype(np.int64)  # row-sorted by vertex id
    tri = np.zeros(n, dtype=np.int64)
    _count_triangles(optr, oind, tri)
    return 2 * tri


@dataclass
class ClusteringSpectrum:
    """Degree k -> (vertex count n_k, mean local clustering)."""

    entries: dict[int, tuple[int, float]]
    n: int
    params: ModelParams

    def rows(self) -> list[tuple[int, int, float]]:
        return [(k, c, cc) for k, (c, cc) in sorted(self.entries.items())]


def clustering_spectrum(graph: Graph) -> ClusteringSpectrum:
    """Mean of Delta_v / (k (k - 1)) over degree-k vertices, per k >= 2."""
    deg = degrees(graph)
    tri = triangles_per_vertex(graph)
    mask = deg >= 2
    d_sel = deg[mask]
    cc = tri[mask] / (d_sel * (d_sel - 1.0))
    entries: dict[int, tuple[int, float]] = {}
    if d_sel.size:
        counts = np.bincount(d_sel)
        sums = np.bincount(d_sel, weights=cc)
        for k in np.nonzero(counts)[0]:
            entries[int(k)] = (int(counts[k]), float(sums[k] / counts[k]))
    return ClusteringSpectrum(entries, graph.n, graph.params)


def combine_spectra(spectra) -> ClusteringSpectrum:
    """Pool spectra of independent samples (n_k-weighted means)."""
    spectra = list(spectra)
    if not spectra:
        raise InsufficientDataError("no spectra to combine")
    acc: dict[int, tuple[int, float]] = {}
    for sp in spectra:
        for k, (c, cc) in sp.entries.items():
            c0, s0 = acc.get(k, (0, 0.0))
            acc[k] = (c0 + c, s0 + c * cc)
    entries = {k: (c, s / c) for k, (c, s) in acc.items()}
    return ClusteringSpectrum(entries, sum(sp.n for sp in spectra), spectra[0].params)


def log_binned_spectrum(spectrum: ClusteringSpectrum,
                        bins_per_decade: int = 8) -> np.ndarray:
    """Geometrically binned spectrum: rows (k geometric mean, cc, n weight).

    Bin edges multiply by 10**(1/bins_per_decade); within a bin the mean
    clustering values are averaged with n_k weights and the representative
    degree is the n_k-weighted geometric mean.
    """
    if bins_per_decade < 1:
        raise DomainError("bins_per_decade must be >= 1")
    if not spectrum.entries:
        return np.empty((0, 3))
    ks = np.array(sorted(spectrum.entries))
    counts = np.array([spectrum.entries[k][0] for k in ks], dtype=float)
    ccs = np.array([spectrum.entries[k][1] for k in ks])
    idx = np.floor(np.log10(ks) * bins_per_decade).astype(np.int64)
    rows = []
    for b in np.unique(idx):
        sel = idx == b
        w = counts[sel]
        k_gm = float(np.exp(np.average(np.log(ks[sel]), weights=w)))
        rows.append((k_gm, float(np.average(ccs[sel], weights=w)), float(w.sum())))
    return np.array(rows)


@dataclass(frozen=True)
class SlopeFit:
    k_lo: float
    k_hi: float
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def fit_slope(binned: np.ndarray, k_lo: float, k_hi: float) -> SlopeFit:
    """OLS of log10(cc) on log10(k) over binned points inside [k_lo, k_hi].

    Bins with zero clustering cannot enter a log fit and are dropped before
    the three-point minimum is enforced.
    """
    if k_lo >= k_hi:
        raise DomainError("need k_lo < k_hi")
    binned = np.asarray(binned)
    if binned.size == 0:
        raise InsufficientDataError("empty binned spectrum")
    sel = (binned[:, 0] >= k_lo) & (binned[:, 0] <= k_hi) & (binned[:, 1] > 0)
    pts = binned[sel]
    if len(pts) < 3:
        raise InsufficientDataError(
            f"need at least 3 binned points in [{k_lo}, {k_hi}], found {len(pts)}")
    x = np.log10(pts[:, 0])
    y = np.log10(pts[:, 1])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(k_lo, k_hi, float(slope), float(intercept), r2, len(pts))


@dataclass(frozen=True)
class FiniteSizeThreshold:
    """Degree scale where a size-n graph departs from the infinite model."""

    psi: float
    degree_cap: float


def finite_size_threshold(n: int, params: ModelParams) -> FiniteSizeThreshold:
    """psi(n) = n**(1/(beta-1)) when beta >= (a+1) v 2, else
    n**((2+a-beta)/(beta-1)); the degree cap inverts k/log(k) through psi on
    the beta = a + 1 line and equals psi elsewhere.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    from .model import classify_regime

    classify_regime(params.a, params.beta)
    a, beta = params.a, params.beta
    if beta >= max(a + 1.0, 2.0):
        psi = float(n) ** (1.0 / (beta - 1.0))
    else:
        psi = float(n) ** ((2.0 + a - beta) / (beta - 1.0))
    if beta == a + 1.0:
        # solve k / log(k) = psi by damped fixed point; k = psi log k
        k = max(psi * math.log(max(psi, 3.0)), 3.0)
        for _ in range(80):
            k_next = psi * math.log(k)
            if abs(k_next - k) < 1e-12 * k:
                k = k_next
                break
            k = k_next
        cap = k
    else:
        cap = psi
    return FiniteSizeThreshold(psi, cap)


# ---------------------------------------------------------------------------
# Typical triangle geometry
# ---------------------------------------------------------------------------

TRIANGLE_STATS = ("root_dist_1", "root_dist_2", "weight_1", "weight_2", "pair_dist")


@dataclass
class TriangleGeometry:
    """Log-log growth of triangle statistics against the root degree.

    rows: one record per grid point with the degree k = M(w) and the mean
    log of each statistic over sampled closed triangles; exponents: per
    statistic, the OLS slope of mean log-statistic on log k with its
    standard error.
    """

    rows: list[dict]
    exponents: dict[str, tuple[float, float]]


def typical_triangle_stats(params: ModelParams, w_grid, n_samples: int,
                           seed: int = 0, min_triangles: int = 40) -> TriangleGeometry:
    """Sample closed root triangles along a root-weight grid and fit the
    growth exponents of their geometry.

    For each w the two neighbors of a closed triangle are distributed as an
    i.i.d. neighbor pair conditioned on being adjacent, so pairs are drawn
    from the neighbor intensity and accepted by an edge coin; per accepted
    triangle the recorded statistics are the two root distances, the two
    neighbor weights and the neighbor-neighbor distance.
    """
    params.require_long_range()
    w_grid = [float(w) for w in w_grid]
    if any(w2 <= w1 for w1, w2 in zip(w_grid, w_grid[1:])) or any(w <= 1 for w in w_grid):
        raise DomainError("w_grid must be strictly increasing with entries > 1")
    rows = []
    for i, w in enumerate(w_grid):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(7, i)))
        k = theory.mean_degree(w, params)
        logs = {s: [] for s in TRIANGLE_STATS}
        accepted = 0
        remaining = n_samples
        while remaining > 0:
            m = min(remaining, 100_000)
            remaining -= m
            x1, v1 = _sampling.sample_neighbors(rng, m, w, params)
            x2, v2 = _sampling.sample_neighbors(rng, m, w, params)
            r12 = np.linalg.norm(x1 - x2, axis=1)
            p = connection_probability(r12, v1, v2, params)
            keep = rng.random(m) < p
            if not np.any(keep):
                continue
            accepted += int(keep.sum())
            logs["root_dist_1"].append(np.log(np.linalg.norm(x1[keep], axis=1)))
            logs["root_dist_2"].append(np.log(np.linalg.norm(x2[keep], axis=1)))
            logs["weight_1"].append(np.log(v1[keep]))
            logs["weight_2"].append(np.log(v2[keep]))
            logs["pair_dist"].append(np.log(r12[keep]))
        if accepted < min_triangles:
            raise InsufficientDataError(
                f"only {accepted} closed triangles at w={w}; raise n_samples")
        row = {"w": w, "k": k, "n_triangles": accepted}
        for s in TRIANGLE_STATS:
            vals = np.concatenate(logs[s])
            row[f"mean_log_{s}"] = float(vals.mean())
            row[f"se_log_{s}"] = float(vals.std(ddof=1) / math.sqrt(len(vals)))
        rows.append(row)

    exponents: dict[str, tuple[float, float]] = {}
    log_k = np.array([math.log(r["k"]) for r in rows])
    for s in TRIANGLE_STATS:
        y = np.array([r[f"mean_log_{s}"] for r in rows])
        slope, intercept = np.polyfit(log_k, y, 1)
        resid = y - (slope * log_k + intercept)
        dof = max(len(rows) - 2, 1)
        sxx = float(np.sum((log_k - log_k.mean()) ** 2))
        se = math.sqrt(float(resid @ resid) / dof / sxx)
        exponents[s] = (float(slope), se)
    return TriangleGeometry(rows, exponents)
