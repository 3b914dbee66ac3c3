import math

import numpy as np
import pytest
from scipy import stats

from sirg import _sampling, sampler, theory
from sirg.model import (
    DivergentIntegralError,
    DomainError,
    Kernel,
    ModelParams,
    weight_kernel,
)


def P(d=1, alpha=math.inf, beta=3.5, a=1.0, kernel=Kernel.INTERPOLATION):
    return ModelParams(d=d, alpha=alpha, beta=beta, a=a, kernel=kernel)


def test_neighbor_weight_marginal_ks(rng):
    p = P(beta=3.5, a=1.0)
    w = 4.0
    draws = _sampling.sample_neighbor_weights(rng, 100_000, w, p)
    d = stats.kstest(draws, lambda v: _sampling.neighbor_weight_cdf(v, w, p)).statistic
    assert d < 0.005


def test_neighbor_weight_marginal_ks_log_branch(rng):
    # beta = a + 1 exercises the logarithmic inverse CDF piece
    p = P(d=1, alpha=2.0, beta=3.0, a=2.0)
    draws = _sampling.sample_neighbor_weights(rng, 100_000, 6.0, p)
    d = stats.kstest(draws, lambda v: _sampling.neighbor_weight_cdf(v, 6.0, p)).statistic
    assert d < 0.005


def test_neighbor_location_support_hard_threshold(rng):
    p = P(d=2, alpha=math.inf, beta=3.5, a=1.0)
    pts, wts = _sampling.sample_neighbors(rng, 50_000, 3.0, p)
    vol = np.linalg.norm(pts, axis=1) ** 2
    assert np.all(vol < weight_kernel(3.0, wts, p))


def test_neighbor_location_tail_fraction(rng):
    # outside the certain-connection ball with probability 1/alpha
    p = P(d=1, alpha=2.0, beta=3.5, a=1.0)
    pts, wts = _sampling.sample_neighbors(rng, 200_000, 3.0, p)
    outside = (np.abs(pts[:, 0]) ** 1 > weight_kernel(3.0, wts, p)).mean()
    se = math.sqrt(0.5 * 0.5 / 200_000)
    assert abs(outside - 0.5) < 3 * se


def test_sample_neighbor_single_draw(rng):
    p = P(beta=3.5)
    loc, wt = sampler.sample_neighbor(2.0, p, rng)
    assert loc.shape == (1,)
    assert wt >= 1.0
    with pytest.raises(DivergentIntegralError):
        sampler.sample_neighbor(2.0, ModelParams(d=1, alpha=1.0, beta=3.5), rng)


def test_boolean_neighbor_weights(rng):
    p = P(d=1, alpha=2.0, beta=3.5, kernel=Kernel.BOOLEAN_SUM)
    draws = _sampling.sample_neighbor_weights(rng, 200_000, 2.0, p)
    # density prop. to (2 + v) v^-3.5 on (1, inf): check against its mean
    from scipy import integrate

    norm = integrate.quad(lambda v: (2 + v) * v ** -3.5, 1, np.inf)[0]
    mean = integrate.quad(lambda v: v * (2 + v) * v ** -3.5, 1, np.inf)[0] / norm
    se = draws.std(ddof=1) / math.sqrt(len(draws))
    assert abs(draws.mean() - mean) < 3 * se


def test_root_neighborhood_poisson_moments(rng):
    p = P(beta=3.5, a=1.0)
    m = theory.mean_degree(2.0, p)
    counts = np.array([sampler.sample_root_neighborhood(2.0, p, rng).degree
                       for _ in range(10_000)])
    assert abs(counts.mean() - m) / m < 0.03
    assert abs(counts.var(ddof=1) - m) / m < 0.03


def _poisson_gof_pvalue(counts, m):
    kmax = int(stats.poisson.ppf(1 - 1e-9, m)) + 2
    probs = stats.poisson.pmf(np.arange(kmax), m)
    probs[-1] = max(1.0 - probs[:-1].sum(), 0.0)
    expected = probs * len(counts)
    observed = np.bincount(np.minimum(counts, kmax - 1), minlength=kmax).astype(float)
    obs, exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= 5.0:
            obs.append(acc_o)
            exp.append(acc_e)
            acc_o = acc_e = 0.0
    obs[-1] += acc_o
    exp[-1] += acc_e
    exp = np.array(exp) * (sum(obs) / sum(exp))
    return stats.chisquare(obs, exp).pvalue


@pytest.mark.slow
def test_root_neighborhood_degree_is_poisson_three_sets(rng):
    sets = [
        (P(d=1, alpha=math.inf, beta=3.5, a=1.0), 2.0),
        (P(d=2, alpha=2.0, beta=2.6, a=2.0), 3.0),
        (P(d=1, alpha=math.inf, beta=3.0, a=0.0), 4.0),
    ]
    for p, w in sets:
        m = theory.mean_degree(w, p)
        counts = np.array([sampler.sample_root_neighborhood(w, p, rng).degree
                           for _ in range(10_000)])
        assert _poisson_gof_pvalue(counts, m) > 0.001


def test_root_neighborhood_triangles_match_triangle_integral(rng):
    p = P(beta=3.5, a=1.0)
    w = 2.0
    deltas = np.array([sampler.neighborhood_triangle_count(
        sampler.sample_root_neighborhood(w, p, rng)) for _ in range(20_000)])
    t_mc = theory.triangle_integral_mc(w, p, n_samples=400_000, seed=21)
    se = math.hypot(deltas.std(ddof=1) / math.sqrt(len(deltas)), t_mc.std_error)
    assert abs(deltas.mean() - t_mc.value) < 3 * se


def test_root_neighborhood_small_counts_near_support_edge(rng):
    p = P(beta=8.0, a=1.0)
    m1 = theory.mean_degree(1.0 + 1e-9, p)
    counts = [sampler.sample_root_neighborhood(1.0 + 1e-9, p, rng).degree
              for _ in range(10_000)]
    assert max(counts) <= 10 * m1


def test_direct_clustering_estimator_basics(rng):
    p = P(beta=4.0, a=1.0)
    est = sampler.clustering_function_mc(5, 10, p, n_samples=50_000, rng=rng)
    for k, e in est.items():
        assert 0.0 <= e.value <= 1.0
        assert e.n_samples > 0
    with pytest.raises(DomainError):
        sampler.clustering_function_mc(1, 5, p, 1000, rng)
    with pytest.raises(DomainError):
        sampler.clustering_function_mc(5, 60, p, 1000, rng)


def test_triangle_count_of_forced_connected_pair():
    # a neighborhood with two adjacent neighbors has ordered-pair count 2,
    # hence local clustering 2 / (2*1) = 1
    nbhd = sampler.RootNeighborhood(
        root_weight=2.0,
        locations=np.array([[0.1], [0.2]]),
        weights=np.array([1.5, 1.5]),
        edges=np.array([[0, 1]]),
    )
    delta = sampler.neighborhood_triangle_count(nbhd)
    assert delta == 2
    assert delta / (2 * 1) == 1.0


def test_direct_vs_quadrature_clustering(rng):
    p = P(beta=4.0, a=1.0)
    direct = sampler.clustering_function_mc(5, 8, p, n_samples=200_000, rng=rng)
    for k in (5, 8):
        gamma = theory.clustering_function(k, p, n_samples=60_000, seed=22)
        assert direct[k].value == pytest.approx(gamma.value, rel=0.10)


@pytest.mark.slow
def test_finite_graph_mean_degree_matches_quadrature():
    # box-boundary deficit stays inside the 5% band at this size
    from sirg.graphs import generate_finite_sirg

    p = ModelParams(d=2, alpha=2.0, beta=4.0, a=1.0)
    target = theory.expected_mean_degree(p)
    means = [generate_finite_sirg(10_000, p, seed=s).indptr[-1] / 10_000
             for s in range(20)]
    assert np.mean(means) == pytest.approx(target, rel=0.05)


def test_degree_distribution_power_tail():
    # fraction of vertices with degree > k decays like k^(1-beta)
    from sirg.graphs import generate_finite_sirg
    from sirg.clustering import degrees

    p = ModelParams(d=1, alpha=math.inf, beta=3.0, a=1.0)
    degs = np.concatenate([degrees(generate_finite_sirg(30_000, p, seed=s))
                           for s in range(5)])
    ks = np.array([30.0 * 10 ** (j / 6) for j in range(7)])  # one decade
    ccdf = np.array([(degs > k).mean() for k in ks])
    slope = np.polyfit(np.log10(ks), np.log10(ccdf), 1)[0]
    assert slope == pytest.approx(-(p.beta - 1.0), abs=0.3)
