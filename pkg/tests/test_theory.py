import math

import numpy as np
import pytest
from scipy import integrate

from sirg import theory
from sirg.model import (
    DivergentIntegralError,
    DomainError,
    Kernel,
    ModelParams,
    RegimeCase,
    clustering_limit_constant,
    connection_probability,
    unit_ball_volume,
    weight_kernel,
    xi_alpha,
)
from sirg._sampling import sample_kernel_points


def P(d=1, alpha=math.inf, beta=3.0, a=1.0, kernel=Kernel.INTERPOLATION):
    return ModelParams(d=d, alpha=alpha, beta=beta, a=a, kernel=kernel)


# ---------------------------------------------------------------------------
# mean degree: closed form, oracle, inverse
# ---------------------------------------------------------------------------

def test_mean_degree_examples():
    p = P(beta=3.0, a=0.0)
    assert theory.mean_degree(1.0, p) == pytest.approx(4.0, rel=1e-12)
    assert theory.mean_degree(2.0, p) == pytest.approx(5.0, rel=1e-12)
    # closed form 2w + 2/w for these parameters
    for w in (1.5, 3.0, 7.0):
        assert theory.mean_degree(w, p) == pytest.approx(2 * w + 2 / w, rel=1e-12)
    with pytest.raises(DomainError):
        theory.mean_degree(0.99, p)


def test_mean_degree_quadrature_agrees_small_grid():
    for a, beta, alpha, d, w in [
        (0.0, 3.0, math.inf, 1, 2.0),
        (2.0, 2.6, 2.0, 2, 32.0),
        (1.0, 4.0, 1.5, 1, 1.0),
        (2.0, 3.0, math.inf, 2, 5.0),  # log branch beta = a + 1
    ]:
        p = P(d=d, alpha=alpha, beta=beta, a=a)
        closed = theory.mean_degree(w, p)
        quad = theory.mean_degree_quadrature(w, p)
        assert quad == pytest.approx(closed, rel=1e-8)


def test_mean_degree_boolean_kernel():
    p = P(d=1, alpha=math.inf, beta=3.5, kernel=Kernel.BOOLEAN_SUM)
    # xi * int (v + w)^1 v^-3.5 dv over (1, inf)
    xi = xi_alpha(p)
    w = 2.0
    expected = xi * (1.0 / 1.5 + w / 2.5)
    assert theory.mean_degree(w, p) == pytest.approx(expected, rel=1e-12)
    assert theory.mean_degree_quadrature(w, p) == pytest.approx(expected, rel=1e-8)
    with pytest.raises(DivergentIntegralError):
        theory.mean_degree(2.0, P(d=2, alpha=2.0, beta=2.9, kernel=Kernel.BOOLEAN_SUM))


def test_mean_degree_full_radial_oracle():
    # deeper oracle: integrate the connection probability over R^d shells
    # and the weight, with no shared reduction with the closed form
    p = P(d=2, alpha=2.5, beta=3.5, a=1.5)
    w = 3.0

    def spatial(v):
        om = unit_ball_volume(2)
        # integral over R^2 of kappa(||x||, w, v) dx via the ball-volume
        # substitution u = r^d
        return om * integrate.quad(
            lambda u: connection_probability(u ** 0.5, w, v, p), 0.0,
            50.0 * weight_kernel(w, v, p) * 100.0, limit=400)[0] \
            + om * weight_kernel(w, v, p) ** p.alpha \
            * (50.0 * weight_kernel(w, v, p) * 100.0) ** (1 - p.alpha) / (p.alpha - 1)

    val, _ = integrate.quad(lambda v: spatial(v) * 2.5 * v ** -3.5, 1.0, np.inf, limit=400)
    assert val == pytest.approx(theory.mean_degree(w, p), rel=1e-6)


def test_inverse_mean_degree_round_trip(rng):
    p = P(d=2, alpha=2.0, beta=3.2, a=1.4)
    assert theory.inverse_mean_degree(5.0, P(beta=3.0, a=0.0)) == pytest.approx(2.0, rel=1e-9)
    for w0 in rng.uniform(1.0 + 1e-6, 1e5, size=100):
        k = theory.mean_degree(float(w0), p)
        w = theory.inverse_mean_degree(k, p)
        assert w == pytest.approx(w0, rel=1e-9)
        assert theory.mean_degree(w, p) == pytest.approx(k, rel=1e-9)
    with pytest.raises(DomainError):
        theory.inverse_mean_degree(theory.mean_degree(1.0, p) * 0.5, p)


def test_inverse_mean_degree_asymptotics():
    p = P(beta=4.0, a=1.0)
    from sirg.model import inverse_degree_scale, typical_weight_growth_constant

    k = 1e8
    ratio = theory.inverse_mean_degree(k, p) / inverse_degree_scale(k, 1.0, 4.0)
    assert ratio == pytest.approx(typical_weight_growth_constant(p), rel=0.05)


def test_mean_degree_growth_constants():
    from sirg.model import mean_degree_growth_constant, mean_degree_scale

    for a, beta, w, tol in [(1.0, 4.0, 1e10, 0.02), (2.0, 3.25, 1e10, 0.02),
                            (2.0, 2.5, 1e10, 0.02), (2.0, 3.0, 1e12, 0.10)]:
        p = P(beta=beta, a=a)
        ratio = theory.mean_degree(w, p) / mean_degree_scale(w, a, beta)
        assert ratio == pytest.approx(mean_degree_growth_constant(p), rel=tol)


# ---------------------------------------------------------------------------
# pair overlap integral
# ---------------------------------------------------------------------------

def test_pair_overlap_examples():
    assert theory.pair_overlap_integral(2.0, 3.0, P(beta=4.0)) == pytest.approx(48.0)
    for d in (1, 2, 3):
        om = unit_ball_volume(d)
        p = P(d=d, beta=4.0, a=1.7)
        assert theory.pair_overlap_integral(1.0, 1.0, p) == pytest.approx(om * om)
    p = P(beta=4.0)
    assert theory.pair_overlap_integral(2.0, 5.0, p) == \
        theory.pair_overlap_integral(5.0, 2.0, p)
    with pytest.raises(DivergentIntegralError):
        theory.pair_overlap_integral(2.0, 3.0, P(alpha=1.0))


def test_pair_overlap_monte_carlo_oracle():
    # sample x from the radial law of kappa(., 1, w1), average
    # kappa(||x||, 1, w2), scale by the first mass and the second factor
    p = P(d=2, alpha=2.0, beta=4.0, a=1.0)
    w1, w2 = 2.0, 5.0
    rng = np.random.default_rng(77)
    n = 400_000
    g1 = weight_kernel(1.0, w1, p)
    x = sample_kernel_points(rng, n, g1, p)
    vals = connection_probability(np.linalg.norm(x, axis=1), 1.0, w2, p)
    first = theory.kernel_total_mass(g1, p) * vals.mean()
    se = theory.kernel_total_mass(g1, p) * vals.std(ddof=1) / math.sqrt(n)
    mc = first * theory.kernel_total_mass(weight_kernel(w1, w2, p), p)
    se *= theory.kernel_total_mass(weight_kernel(w1, w2, p), p)
    exact = theory.pair_overlap_integral(w1, w2, p)
    assert abs(mc - exact) < 3 * se


def test_pair_overlap_weight_average_guard():
    with pytest.raises(DivergentIntegralError):
        theory.pair_overlap_weight_average(P(beta=2.1, a=0.4))


# ---------------------------------------------------------------------------
# two-path closure integral
# ---------------------------------------------------------------------------

def test_closure_hexagon_value():
    # alpha=inf, d=1, w1=w2=1: the integrand is the indicator of the hexagon
    # {|x|<1, |y|<1, |x-y|<1}, whose area a brute-force grid pins at 3
    xs = np.linspace(-1, 1, 2001)
    grid_x, grid_y = np.meshgrid(xs, xs)
    inside = np.abs(grid_x - grid_y) < 1
    area = inside.mean() * 4.0
    assert area == pytest.approx(3.0, abs=5e-3)
    p = P(beta=4.0)
    est = theory.two_path_closure_integral(1.0, 1.0, p, n_samples=200_000, seed=3)
    assert abs(est.value - 3.0) <= 3 * est.std_error


def test_closure_symmetry_and_bound():
    p = P(d=1, alpha=2.0, beta=3.5, a=2.0)
    e12 = theory.two_path_closure_integral(2.0, 5.0, p, n_samples=150_000, seed=4)
    e21 = theory.two_path_closure_integral(5.0, 2.0, p, n_samples=150_000, seed=5)
    se = math.hypot(e12.std_error, e21.std_error)
    assert abs(e12.value - e21.value) <= 3 * se
    cap = (p.alpha * unit_ball_volume(1) / (p.alpha - 1)) ** 2 \
        * weight_kernel(1.0, 2.0, p) * weight_kernel(2.0, 5.0, p)
    assert e12.value <= cap + 3 * e12.std_error


def test_closure_requires_samples():
    with pytest.raises(DomainError):
        theory.two_path_closure_integral(1.0, 1.0, P(beta=4.0), n_samples=100)


def test_closure_weight_average_cross_check():
    # joint importance sampling vs nested (outer weights, inner per-pair
    # closure estimates): same target, different decomposition
    p = P(d=1, alpha=2.0, beta=2.5, a=2.0)
    joint = theory.two_path_closure_weight_average(p, n_samples=400_000, seed=6)
    rng = np.random.default_rng(8)
    total = 0.0
    n_outer = 120
    values = []
    pp, t = (3 * p.a - 2 * p.beta) / 2.0, p.beta - 2.0
    for _ in range(n_outer):
        ws = []
        iws = []
        for _ in range(2):
            u = rng.random()
            if rng.random() < 0.5:
                w = u ** (1.0 / (pp + 1.0))
                iw = 2 * (p.beta - 1) / (pp + 1) * w ** (-p.beta - pp)
            else:
                w = u ** (-1.0 / t)
                iw = 2 * (p.beta - 1) / t / w
            ws.append(w)
            iws.append(iw)
        inner = theory.two_path_closure_integral(ws[0], ws[1], p, n_samples=10_000,
                                                 seed=int(rng.integers(2**31)))
        values.append(iws[0] * iws[1] * inner.value)
    values = np.array(values)
    nested = values.mean()
    nested_se = values.std(ddof=1) / math.sqrt(n_outer)
    assert abs(nested - joint.value) <= 3 * math.hypot(nested_se, joint.std_error)


def test_closure_weight_average_guard():
    from sirg.model import EstimationError

    with pytest.raises(EstimationError):
        theory.two_path_closure_weight_average(P(beta=2.9, a=0.6))


# ---------------------------------------------------------------------------
# triangle integral and bounds
# ---------------------------------------------------------------------------

def test_triangle_probability_below_one():
    for w in (2.0, 8.0, 64.0):
        p_est = theory.triangle_edge_probability_mc(w, P(beta=4.0), 50_000, seed=9)
        assert 0.0 <= p_est.value <= 1.0 + 3 * p_est.std_error


def test_triangle_exact_quadrature_cross_check():
    # d=1, alpha=inf: interval-overlap reduction evaluated by quadrature
    p = P(beta=4.0, a=1.0)
    w = 32.0

    def overlap(A, B, C):
        f = lambda x: max(0.0, min(B, x + C) - max(-B, x - C))
        kinks = sorted(t for t in (-B - C, -B + C, B - C, B + C) if -A < t < A)
        return integrate.quad(f, -A, A, points=kinks or None, limit=200)[0]

    inner = lambda w2: integrate.quad(
        lambda w1: overlap(w * w1, w * w2, w1 * w2) * 9.0 * (w1 * w2) ** -4.0,
        1, np.inf, limit=200)[0]
    exact, _ = integrate.quad(inner, 1, np.inf, limit=200)
    t_hat = theory.triangle_integral_mc(w, p, n_samples=400_000, seed=10)
    assert abs(t_hat.value - exact) <= 3 * t_hat.std_error
    assert theory.triangle_lower_bound(w, p) <= exact <= theory.triangle_upper_bound(w, p)


def test_triangle_bounds_structure():
    for a, beta, alpha, d in [(1.0, 4.0, math.inf, 1), (2.0, 2.6, 2.0, 2),
                              (0.75, 2.5, 1.5, 1), (2.0, 3.5, math.inf, 2)]:
        p = P(d=d, alpha=alpha, beta=beta, a=a)
        for w in (4.0, 16.0, 256.0):
            lo = theory.triangle_lower_bound(w, p)
            hi = theory.triangle_upper_bound(w, p)
            assert 0.0 < hi
            assert lo <= hi
            assert lo > 0.0
    # d = 1 geometric factor is exactly 1/2: spell the formula out once
    p = P(beta=4.0, a=1.0)
    w = 16.0
    half = w / 2
    j1 = (half ** -3.0 - 1.0) / -3.0
    j2 = (half ** -1.0 - 1.0) / -1.0
    expected = 0.5 * 2.0 ** 2 * 3.0 ** 2 * (2.0 / 2.0) * w * (j1 - half ** -2.0 * j2)
    assert theory.triangle_lower_bound(w, p) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        theory.triangle_lower_bound(1.5, P(beta=4.0))
    from sirg.model import InvalidParameterError

    with pytest.raises(InvalidParameterError):
        theory.triangle_upper_bound(4.0, P(d=1, alpha=2.0, beta=3.0,
                                           kernel=Kernel.BOOLEAN_SUM))


def test_evaluate_mean_degree_record():
    p = P(beta=3.0, a=0.0)
    closed = theory.evaluate_mean_degree(2.0, p)
    quad = theory.evaluate_mean_degree(2.0, p, theory.MeanDegreeMethod.QUADRATURE)
    assert closed.method is theory.MeanDegreeMethod.CLOSED_FORM
    assert quad.value == pytest.approx(closed.value, rel=1e-8)
    assert closed.w == quad.w == 2.0


def test_triangle_sandwich_record():
    s = theory.triangle_sandwich(16.0, P(beta=4.0, a=1.0), n_samples=50_000, seed=30)
    assert s.lower <= s.upper
    assert s.inside


def test_triangle_bound_ratio_to_scale_bounded():
    from sirg.model import triangle_scale

    p = P(beta=4.0, a=1.0)
    ratios_hi = []
    ratios_lo = []
    for e in range(6, 17):
        w = float(2 ** e)
        sig = triangle_scale(w, 1.0, 4.0)
        ratios_hi.append(theory.triangle_upper_bound(w, p) / sig)
        ratios_lo.append(theory.triangle_lower_bound(w, p) / sig)
    assert max(ratios_hi) < 4 * min(r for r in ratios_hi if r > 0)
    assert min(ratios_lo) > 0.05 * max(ratios_lo)


# ---------------------------------------------------------------------------
# conditional weight density and the clustering function
# ---------------------------------------------------------------------------

def test_conditional_weight_density_normalizes():
    p = P(beta=4.0, a=1.0)
    for k in (5, 50, 500):
        w_lo, w_hi = theory.concentration_window(k, p)
        ws = np.linspace(w_lo + 1e-9, w_hi, 200_001)
        dens = np.array([theory.conditional_weight_density(float(w), k, p) for w in ws])
        total = integrate.simpson(dens, x=ws)
        assert total == pytest.approx(1.0, abs=1e-6)


def test_conditional_weight_density_mode_near_inverse():
    p = P(beta=4.0, a=1.0)
    k = 1000
    w_lo, w_hi = theory.concentration_window(k, p)
    ws = np.linspace(w_lo, w_hi, 40_001)[1:]
    dens = [theory.conditional_weight_density(float(w), k, p) for w in ws]
    w_max = float(ws[int(np.argmax(dens))])
    assert w_max == pytest.approx(theory.inverse_mean_degree(float(k), p), rel=0.05)


def test_conditional_weight_density_proportionality():
    p = P(beta=4.0, a=1.0)
    k = 40
    w_ref = 10.0
    ref = theory.conditional_weight_density(w_ref, k, p)

    def unnorm(w):
        m = theory.mean_degree(w, p)
        return math.exp(-m + k * math.log(m) - math.lgamma(k + 1)) * 3.0 * w ** -4.0

    for w in (2.0, 8.0, 15.0, 20.0):
        assert theory.conditional_weight_density(w, k, p) / ref == pytest.approx(
            unnorm(w) / unnorm(w_ref), rel=1e-9)
    assert theory.conditional_weight_density(0.5, k, p) == 0.0


def test_clustering_function_in_unit_interval():
    p = P(beta=4.0, a=1.0)
    for k in (2, 10, 1000):
        est = theory.clustering_function(k, p, n_samples=30_000, seed=11)
        assert 0.0 <= est.value <= 1.0


def test_clustering_function_asymptotic_slope():
    # the inverse-linear decay is a large-k law: the local log-log slope of
    # gamma(k) reaches -1 only for k well above the limiting constant
    # (at desk degrees the clustering function is still in its shoulder,
    # which is why finite-size windows pinned near k ~ 10 cannot show it)
    p = P(beta=4.0, a=1.0)
    ks = [1_000, 10_000]
    gammas = [theory.clustering_function(k, p, n_samples=1_500_000, seed=40 + k).value
              for k in ks]
    slope = (math.log(gammas[1]) - math.log(gammas[0])) / (math.log(ks[1]) - math.log(ks[0]))
    assert slope == pytest.approx(-1.0, abs=0.05)


def test_clustering_function_dirac_consistency():
    # gamma(k) k^2 / T(M^-1(k)) approaches 1
    p = P(beta=4.0, a=1.0)
    vals = {}
    for k, n in [(100, 200_000), (1_000, 400_000), (10_000, 3_000_000)]:
        gamma = theory.clustering_function(k, p, n_samples=n, seed=12)
        t_hat = theory.triangle_integral_mc(theory.inverse_mean_degree(k, p), p,
                                            n_samples=n, seed=13)
        vals[k] = gamma.value * k * k / t_hat.value
    assert abs(vals[10_000] - 1.0) < 0.10
    assert abs(vals[1_000] - 1.0) < abs(vals[100] - 1.0) + 0.05


# ---------------------------------------------------------------------------
# clustering limit constant and ratio report
# ---------------------------------------------------------------------------

def test_clustering_limit_inverse_linear_value():
    lim = clustering_limit_constant(P(beta=4.0, a=1.0))
    assert lim.value.value == pytest.approx(4.0, rel=1e-6)
    assert lim.alt_value is None
    # brute force cross-check: (beta-a-1)/xi * T(w)/w at large w
    t_hat = theory.triangle_integral_mc(2.0 ** 14, P(beta=4.0, a=1.0),
                                        n_samples=4_000_000, seed=14)
    brute = (4.0 - 1.0 - 1.0) / 6.0 * t_hat.value / 2.0 ** 14
    assert brute == pytest.approx(4.0, rel=0.1)


def test_clustering_limit_critical_log_reports_both():
    p = P(beta=3.5, a=2.0)
    lim = clustering_limit_constant(p)
    assert lim.case is RegimeCase.CRITICAL_LOG
    assert lim.alt_value is not None
    assert lim.value.value / lim.alt_value.value == pytest.approx(
        (2 * p.a + 1) / 2.0, rel=1e-9)


def test_clustering_limit_constant_regime():
    p = P(d=1, alpha=2.0, beta=2.5, a=2.0)
    lim = clustering_limit_constant(p, n_samples=200_000, seed=15)
    xi = xi_alpha(p)
    pref = ((1 + p.a - p.beta) * (p.beta - 2) / ((p.a - 1) * xi)) ** 2
    s1 = theory.two_path_closure_weight_average(p, n_samples=200_000, seed=15)
    assert lim.value.value == pytest.approx(pref * s1.value, rel=1e-12)
    assert lim.value.value > 0


def test_clustering_limit_boolean_kernel():
    p = P(d=1, alpha=math.inf, beta=3.5, kernel=Kernel.BOOLEAN_SUM)
    lim = clustering_limit_constant(p)
    assert lim.case is RegimeCase.INVERSE_LINEAR
    assert lim.value.value > 0
    assert lim.alt_value is None


def test_limit_ratio_report():
    p = P(beta=4.0, a=1.0)
    rows = theory.limit_ratio_report(p, [1e2, 1e4, 1e6, 1e8])
    scale_rows = [r for r in rows if r.quantity == "scale_ratio"]
    assert len(scale_rows) == 4
    assert abs(scale_rows[-1].rel_dev) < 0.05
    devs = [abs(r.rel_dev) for r in scale_rows]
    assert devs == sorted(devs, reverse=True)
    with pytest.raises(DomainError):
        theory.limit_ratio_report(p, [100.0, 100.0])


def test_limit_ratio_report_with_mc():
    p = P(beta=4.0, a=1.0)
    rows = theory.limit_ratio_report(p, [16.0, 64.0], n_samples=50_000, seed=16)
    t_rows = [r for r in rows if r.quantity == "triangle_over_scale"]
    assert len(t_rows) == 2
    assert all(r.std_error > 0 for r in t_rows)
