"""Analytic and semi-analytic quantities of the infinite SIRG.

For a root of weight w the conditional mean degree is

    M(w) = xi_alpha * integral over v > 1 of g(w, v) * v**(-beta) dv,

available in closed form and, as an independent oracle, by adaptive
quadrature.  The expected (ordered-pair counted) triangle count at the root,

    T(w) = E[ kappa(||X1 - X2||, V1, V2) ] * M(w)**2,

with (Xi, Vi) i.i.d. from the normalized neighbor intensity, is estimated by
importance-sampled Monte Carlo and bracketed between rigorous closed-form
bounds.  The clustering function gamma(k) = integral of T(w)/M(w)**2 against
the conditional weight density f_k(w) given degree k is evaluated by
Gauss-Legendre quadrature over the Poisson concentration window.  The module
also evaluates the pair overlap and two-path closure integrals entering the
limiting clustering constant, and tabulates the scale ratios used to check
convergence toward it.

All Monte Carlo is chunk-deterministic (see ``sirg.mc``): a fixed seed gives
bit-identical estimates for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import comb
from typing import Optional

import numpy as np
from scipy import integrate

from . import _sampling
from .mc import mc_mean
from .model import (
    DivergentIntegralError,
    DomainError,
    EstimationError,
    Estimate,
    InvalidParameterError,
    Kernel,
    ModelParams,
    RegimeCase,
    classify_regime,
    clustering_scaling,
    clustering_scale_ratio_constant,
    connection_probability,
    triangle_scale,
    unit_ball_volume,
    weight_kernel,
    xi_alpha,
)

__all__ = [
    "MeanDegreeMethod",
    "MeanDegreeEval",
    "mean_degree",
    "mean_degree_quadrature",
    "mean_degree_derivative",
    "evaluate_mean_degree",
    "expected_mean_degree",
    "inverse_mean_degree",
    "kernel_total_mass",
    "pair_overlap_integral",
    "pair_overlap_weight_average",
    "critical_overlap_integral",
    "two_path_closure_integral",
    "two_path_closure_weight_average",
    "triangle_edge_probability_mc",
    "triangle_integral_mc",
    "triangle_upper_bound",
    "triangle_lower_bound",
    "TriangleSandwich",
    "triangle_sandwich",
    "poisson_tail_bound",
    "concentration_window",
    "conditional_weight_density",
    "clustering_function",
    "RatioRow",
    "limit_ratio_report",
]


# ---------------------------------------------------------------------------
# Mean degree
# ---------------------------------------------------------------------------

class MeanDegreeMethod(Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class MeanDegreeEval:
    """One mean-degree evaluation, tagged with how it was computed.

    The two methods agree to 1e-8 relative over the validation grid (see
    the acceptance suite).
    """

    w: float
    value: float
    method: MeanDegreeMethod


def evaluate_mean_degree(w: float, params: ModelParams,
                         method: MeanDegreeMethod = MeanDegreeMethod.CLOSED_FORM
                         ) -> MeanDegreeEval:
    if method is MeanDegreeMethod.QUADRATURE:
        return MeanDegreeEval(float(w), mean_degree_quadrature(w, params), method)
    return MeanDegreeEval(float(w), mean_degree(w, params), method)


def mean_degree(w: float, params: ModelParams) -> float:
    """Conditional mean degree M(w) of a weight-w root, in closed form.

    For the interpolation kernel,

        M(w) = xi * [ w * (w**(a+1-beta) - 1)/(a+1-beta) + w**(a+2-beta)/(beta-2) ],

    with the first bracket degenerating to w*log(w) at beta = a + 1.  The
    sum kernel expands binomially and needs beta > d + 1 to be finite.
    Strictly increasing in w on [1, inf).
    """
    w = float(w)
    if not w >= 1.0:
        raise DomainError(f"root weight must be >= 1, got {w}")
    xi = xi_alpha(params)
    return xi * float(_sampling.neighbor_intensity_mass(w, params))


def mean_degree_derivative(w: float, params: ModelParams) -> float:
    """d/dw of the closed-form mean degree (used by Newton refinement)."""
    w = float(w)
    if not w >= 1.0:
        raise DomainError(f"root weight must be >= 1, got {w}")
    xi = xi_alpha(params)
    a, beta, d = params.a, params.beta, params.d
    if params.kernel is Kernel.BOOLEAN_SUM:
        if not beta > d + 1:
            raise DivergentIntegralError("the sum-kernel mean degree needs beta > d + 1")
        return xi * sum(
            comb(d, j) * (d - j) * w ** (d - j - 1) / (beta - 1.0 - j)
            for j in range(d)
        )
    q = a + 1.0 - beta
    if abs(q) < 1e-9:
        d_below = math.log(w) + 1.0
    else:
        d_below = ((q + 1.0) * w ** q - 1.0) / q
    d_above = (a + 2.0 - beta) * w ** (a + 1.0 - beta) / (beta - 2.0)
    return xi * (d_below + d_above)


def mean_degree_quadrature(w: float, params: ModelParams, rel_tol: float = 1e-10) -> float:
    """Mean degree by adaptive quadrature of xi * g(w, v) * v**(-beta).

    Integrates numerically up to the cutoff 1e6 * w with a breakpoint at
    v = w, then adds the exact power-law tail.  Independent oracle for the
    closed form.
    """
    w = float(w)
    if not w >= 1.0:
        raise DomainError(f"root weight must be >= 1, got {w}")
    xi = xi_alpha(params)
    beta, a, d = params.beta, params.a, params.d
    if params.kernel is Kernel.BOOLEAN_SUM and not beta > d + 1:
        raise DivergentIntegralError("the sum-kernel mean degree needs beta > d + 1")
    cutoff = 1e6 * w

    def integrand(v):
        return weight_kernel(v, w, params) * v ** (-beta)

    def piece(lo, hi):
        # subdivide wide ranges geometrically: the integrand is a smooth
        # power on each side of the kink, but six decades in one call trips
        # the extrapolation roundoff check
        total = 0.0
        edges = [lo]
        while edges[-1] * 1e3 < hi:
            edges.append(edges[-1] * 1e3)
        edges.append(hi)
        for sub_lo, sub_hi in zip(edges, edges[1:]):
            out = integrate.quad(integrand, sub_lo, sub_hi, limit=400, epsabs=0.0,
                                 epsrel=min(rel_tol, 1e-11), full_output=1)
            value, abserr = out[0], out[1]
            if len(out) > 3 and abserr > rel_tol * max(abs(value), 1e-300):
                raise EstimationError(
                    f"mean-degree quadrature did not converge: {out[-1]}")
            total += value
        return total

    body = piece(1.0, w) + piece(w, cutoff) if w > 1.0 + 1e-12 else piece(1.0, cutoff)
    if params.kernel is Kernel.BOOLEAN_SUM:
        tail = sum(
            comb(d, j) * w ** (d - j) * cutoff ** (j + 1.0 - beta) / (beta - 1.0 - j)
            for j in range(d + 1)
        )
    else:
        tail = w ** a * cutoff ** (2.0 - beta) / (beta - 2.0)
    return xi * (body + tail)


def expected_mean_degree(params: ModelParams) -> float:
    """E[M(W)] over the Pareto weight of the root, by quadrature.

    Diverges when beta < (a + 3)/2 (flagged by the regime label); quadrature
    is refused there.
    """
    label = classify_regime(params.a, params.beta) if params.kernel is Kernel.INTERPOLATION else None
    if label is not None and label.infinite_mean_degree:
        raise DivergentIntegralError(
            "E[M(W)] diverges for beta < (a + 3)/2")
    beta = params.beta

    def integrand(w):
        return mean_degree(w, params) * (beta - 1.0) * w ** (-beta)

    out = integrate.quad(integrand, 1.0, np.inf, limit=400, epsrel=1e-10, full_output=1)
    if len(out) > 3:
        raise EstimationError(f"mean mean-degree quadrature did not converge: {out[-1]}")
    return out[0]


def inverse_mean_degree(k: float, params: ModelParams, rel_tol: float = 1e-12) -> float:
    """The unique w >= 1 with mean_degree(w) = k.

    Doubling bracket, bisection, then Newton refinement with the analytic
    derivative; any Newton step leaving the bracket falls back to the pure
    bisection value.  Round-trips mean_degree(inverse_mean_degree(k)) = k to
    better than 1e-9 relative.
    """
    k = float(k)
    m1 = mean_degree(1.0, params)
    if not k > m1:
        raise DomainError(
            f"k must exceed the minimum mean degree M(1) = {m1:.6g}, got {k}")
    lo, hi = 1.0, 2.0
    while mean_degree(hi, params) < k:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise EstimationError("inverse mean degree bracket overflow")
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        if mean_degree(mid, params) < k:
            lo = mid
        else:
            hi = mid
    w = 0.5 * (lo + hi)
    for _ in range(12):
        step = (mean_degree(w, params) - k) / mean_degree_derivative(w, params)
        candidate = w - step
        if not lo <= candidate <= hi:
            break
        w = candidate
        if abs(step) <= rel_tol * w:
            break
    return w


# ---------------------------------------------------------------------------
# Pair overlap integral (closed form) and its weight averages
# ---------------------------------------------------------------------------

def kernel_total_mass(mass_scale, params: ModelParams):
    """Spatial integral of kappa(.; G): omega_d * G * alpha/(alpha-1)."""
    params.require_long_range()
    om = unit_ball_volume(params.d)
    g = np.asarray(mass_scale, dtype=float)
    if math.isinf(params.alpha):
        out = om * g
    else:
        out = om * g * params.alpha / (params.alpha - 1.0)
    return out if out.ndim else float(out)


def pair_overlap_integral(w1: float, w2: float, params: ModelParams) -> float:
    """Product integral I(w1, w2) of the two root-edge profiles and the pair profile.

    Factorizes as [integral of kappa(||x||, 1, w1) * kappa(||x||, 1, w2) dx]
    times [integral of kappa(||y||, w1, w2) dy].  The first factor reduces
    radially: with G1 <= G2 the two unit-weight kernel scales, in terms of
    the ball volume u = r**d the integrand is 1 on (0, G1), (G1/u)**alpha on
    (G1, G2) and (G1 G2)**alpha u**(-2 alpha) beyond, each piece in closed
    form.  Needs alpha > 1.
    """
    if w1 <= 0 or w2 <= 0:
        raise DomainError("weights must be positive")
    if not params.alpha > 1:
        raise DivergentIntegralError(
            f"the pair overlap integral diverges for alpha <= 1 (got {params.alpha})")
    om = unit_ball_volume(params.d)
    ga = float(weight_kernel(1.0, w1, params))
    gb = float(weight_kernel(1.0, w2, params))
    g1, g2 = (ga, gb) if ga <= gb else (gb, ga)
    if math.isinf(params.alpha):
        first = om * g1
    else:
        al = params.alpha
        cross = g1 * (g1 / g2) ** (al - 1.0)
        first = om * (g1 + (g1 - cross) / (al - 1.0) + cross / (2.0 * al - 1.0))
    second = kernel_total_mass(weight_kernel(w1, w2, params), params)
    return first * second


def _quad(fn, lo, hi, points=None, epsrel=1e-9):
    out = integrate.quad(fn, lo, hi, points=points, limit=400,
                         epsabs=0.0, epsrel=epsrel, full_output=1)
    if len(out) > 3:
        raise EstimationError(f"quadrature did not converge: {out[-1]}")
    return out[0]


def pair_overlap_weight_average(params: ModelParams, epsrel: float = 1e-9) -> float:
    """Double Pareto average of the pair overlap integral over (1, inf)^2.

    Finite above the critical clustering line for a >= 1 and, for a < 1,
    only when additionally beta > 2 + a/2 (the near-diagonal tail of the
    overlap integral grows like w**(2+a)); divergent requests are refused.
    For the sum kernel finiteness needs beta > d + 1.
    """
    params.require_long_range()
    beta = params.beta
    if params.kernel is Kernel.BOOLEAN_SUM:
        if not beta > params.d + 1:
            raise DivergentIntegralError(
                "the sum-kernel pair overlap average needs beta > d + 1")
    else:
        if params.a < 1.0 and not beta > 2.0 + params.a / 2.0:
            raise DivergentIntegralError(
                "the pair overlap average diverges for a < 1 unless beta > 2 + a/2")

    def inner(w2):
        def f(w1):
            return pair_overlap_integral(w1, w2, params) * (beta - 1.0) * w1 ** (-beta)
        return (_quad(f, 1.0, w2, epsrel=epsrel) if w2 > 1.0 else 0.0) + \
            _quad(f, max(w2, 1.0), np.inf, epsrel=epsrel)

    return _quad(lambda w2: inner(w2) * (beta - 1.0) * w2 ** (-beta),
                 1.0, np.inf, epsrel=epsrel)


def critical_overlap_integral(params: ModelParams, lower: float = 0.0,
                              epsrel: float = 1e-9) -> float:
    """(beta - 1)**2 * integral of I(1, r) * r**(-beta) over (lower, inf).

    On the critical line both the lower = 0 and the lower = 1 versions
    circulate; the caller picks.  The r -> 0 endpoint is integrable exactly
    when a > 1/2 at beta = a + 3/2.
    """
    if lower not in (0.0, 1.0):
        raise DomainError("lower limit must be 0 or 1")
    params.require_long_range()
    beta = params.beta

    def f(r):
        return pair_overlap_integral(1.0, r, params) * r ** (-beta)

    head = _quad(f, lower, 1.0, epsrel=epsrel) if lower == 0.0 else 0.0
    return (beta - 1.0) ** 2 * (head + _quad(f, 1.0, np.inf, epsrel=epsrel))


# ---------------------------------------------------------------------------
# Two-path closure integral (Monte Carlo)
# ---------------------------------------------------------------------------

def two_path_closure_integral(w1: float, w2: float, params: ModelParams,
                              n_samples: int = 100_000, seed: int = 0,
                              workers: int = 1) -> Estimate:
    """Importance-sampled closure integral S1(w1, w2).

    Draws x from the normalized radial profile of kappa(., 1, w1) (total
    spatial mass N1), y likewise for w2 (mass N2), and returns
    N1 * N2 * mean[kappa(||x - y||, w1, w2)] with its standard error.
    """
    if w1 <= 0 or w2 <= 0:
        raise DomainError("weights must be positive")
    if not params.alpha > 1:
        raise DivergentIntegralError(
            f"the closure integral diverges for alpha <= 1 (got {params.alpha})")
    if n_samples < 10_000:
        raise DomainError("need at least 1e4 samples for a usable closure estimate")
    g1 = float(weight_kernel(1.0, w1, params))
    g2 = float(weight_kernel(1.0, w2, params))
    mass = kernel_total_mass(g1, params) * kernel_total_mass(g2, params)

    def chunk(rng, m):
        x = _sampling.sample_kernel_points(rng, m, g1, params)
        y = _sampling.sample_kernel_points(rng, m, g2, params)
        r = np.linalg.norm(x - y, axis=1)
        return connection_probability(r, w1, w2, params)

    return mc_mean(chunk, n_samples, seed, tag=101, workers=workers).scaled(mass)


def two_path_closure_weight_average(params: ModelParams, n_samples: int = 400_000,
                                    seed: int = 0, workers: int = 1) -> Estimate:
    """Monte Carlo for the closure integral averaged over (0, inf)^2 weights.

    The weight density (beta - 1) * w**(-beta) extended to (0, inf) is not
    normalizable, so each weight is importance-sampled from the mixture

        0.5 * (p + 1) * w**p on (0, 1)   with p = (3a - 2 beta)/2,
        0.5 * (beta - 2) * w**(1 - beta) on (1, inf),

    whose tails match the integrand's second moment on both ends; the
    estimator has finite variance exactly when beta < (3a + 2)/2, which
    covers every classified regime below the critical line with a > 1.
    Each sample evaluates one closure draw (x, y), keeping the whole
    estimator unbiased.
    """
    params.require_long_range()
    if params.kernel is not Kernel.INTERPOLATION:
        raise InvalidParameterError(
            "the closure weight average is defined for the interpolation kernel")
    a, beta = params.a, params.beta
    if not beta < (3.0 * a + 2.0) / 2.0:
        raise EstimationError(
            "no finite-variance proposal for the closure weight average when "
            f"beta >= (3a + 2)/2 (a={a}, beta={beta})")
    p = (3.0 * a - 2.0 * beta) / 2.0
    t = beta - 2.0

    def draw_weights(rng, m):
        u = rng.random(m)
        small = rng.random(m) < 0.5
        w = np.where(small, u ** (1.0 / (p + 1.0)), u ** (-1.0 / t))
        # importance weight: extended Pareto density over the mixture
        iw = np.where(
            small,
            2.0 * (beta - 1.0) / (p + 1.0) * w ** (-beta - p),
            2.0 * (beta - 1.0) / t * w ** (-1.0),
        )
        return w, iw

    def chunk(rng, m):
        w1, iw1 = draw_weights(rng, m)
        w2, iw2 = draw_weights(rng, m)
        g1 = weight_kernel(np.ones(m), w1, params)
        g2 = weight_kernel(np.ones(m), w2, params)
        x = _sampling.sample_kernel_points(rng, m, g1, params)
        y = _sampling.sample_kernel_points(rng, m, g2, params)
        r = np.linalg.norm(x - y, axis=1)
        kap = connection_probability(r, w1, w2, params)
        return iw1 * iw2 * kernel_total_mass(g1, params) * kernel_total_mass(g2, params) * kap

    return mc_mean(chunk, n_samples, seed, tag=102, workers=workers)


# ---------------------------------------------------------------------------
# Triangle integral: Monte Carlo and closed-form bounds
# ---------------------------------------------------------------------------

def triangle_edge_probability_mc(w: float, params: ModelParams,
                                 n_samples: int = 200_000, seed: int = 0,
                                 workers: int = 1) -> Estimate:
    """P(two independent neighbors of a weight-w root are adjacent).

    Equals T(w) / M(w)**2; always in [0, 1].
    """
    w = float(w)
    if not w > 1.0:
        raise DomainError(f"root weight must exceed 1, got {w}")
    params.require_long_range()

    def chunk(rng, m):
        x1, v1 = _sampling.sample_neighbors(rng, m, w, params)
        x2, v2 = _sampling.sample_neighbors(rng, m, w, params)
        r = np.linalg.norm(x1 - x2, axis=1)
        return connection_probability(r, v1, v2, params)

    return mc_mean(chunk, n_samples, seed, tag=103, workers=workers)


def triangle_integral_mc(w: float, params: ModelParams, n_samples: int = 200_000,
                         seed: int = 0, workers: int = 1) -> Estimate:
    """Importance-sampled triangle integral T(w) = M(w)**2 * E[kappa(pair)]."""
    m = mean_degree(w, params)
    return triangle_edge_probability_mc(w, params, n_samples, seed, workers).scaled(m * m)


def triangle_upper_bound(w: float, params: ModelParams) -> float:
    """Closed-form upper bound on T(w) for the interpolation kernel.

    Splits the weight plane at w1 ^ w2 = w: the inner part is bounded by the
    envelope g(w1,w2) * min(g(w,w1), g(w,w2)) and reduces to
    xi**2 * (2/(beta-2)) * w * integral of u**(2+2a-2beta) over (1, w)
    (log branch when that exponent is -1, i.e. beta = a + 3/2); the outer
    part is bounded by g(w,w1) * g(w,w2), giving
    xi**2 * w**(2a) * (w**(2-beta)/(beta-2))**2.
    """
    w = float(w)
    if params.kernel is not Kernel.INTERPOLATION:
        raise InvalidParameterError("triangle bounds cover the interpolation kernel only")
    if not w > 1.0:
        raise DomainError(f"root weight must exceed 1, got {w}")
    xi = xi_alpha(params)
    a, beta = params.a, params.beta
    inner = xi ** 2 * (2.0 / (beta - 2.0)) * w * \
        _sampling.power_integral(2.0 + 2.0 * a - 2.0 * beta, 1.0, w)
    outer = xi ** 2 * w ** (2.0 * a) * (w ** (2.0 - beta) / (beta - 2.0)) ** 2
    return inner + outer


def triangle_lower_bound(w: float, params: ModelParams) -> float:
    """Closed-form lower bound on T(w), valid for every alpha.

    Geometric construction: restricting both neighbor weights below w/2
    keeps a ball of a fixed volume fraction inside the intersection of the
    two root balls, giving

        K * omega_d**2 * (beta-1)**2 * (2/(beta-2)) * w *
            [ int_1^{w/2} u**(2+2a-2beta) du
              - (w/2)**(2-beta) * int_1^{w/2} u**(2a-beta) du ],

    with K = (1 - (1/2)**(1/d))**d.  Holds for alpha = inf and therefore for
    every alpha by pointwise kernel monotonicity.  Strictly positive for
    w > 2 and requires it.
    """
    w = float(w)
    if params.kernel is not Kernel.INTERPOLATION:
        raise InvalidParameterError("triangle bounds cover the interpolation kernel only")
    if not w > 2.0:
        raise DomainError(f"the lower bound needs w > 2, got {w}")
    d, a, beta = params.d, params.a, params.beta
    k_geom = (1.0 - 0.5 ** (1.0 / d)) ** d
    om = unit_ball_volume(d)
    half = 0.5 * w
    bracket = _sampling.power_integral(2.0 + 2.0 * a - 2.0 * beta, 1.0, half) \
        - half ** (2.0 - beta) * _sampling.power_integral(2.0 * a - beta, 1.0, half)
    return k_geom * om ** 2 * (beta - 1.0) ** 2 * (2.0 / (beta - 2.0)) * w * bracket


@dataclass(frozen=True)
class TriangleSandwich:
    """Triangle integral bracketed by its closed-form bounds."""

    w: float
    lower: float
    upper: float
    mc_estimate: Estimate

    @property
    def inside(self) -> bool:
        band = 3.0 * self.mc_estimate.std_error
        return (self.lower <= self.mc_estimate.value + band
                and self.mc_estimate.value - band <= self.upper)


def triangle_sandwich(w: float, params: ModelParams, n_samples: int = 100_000,
                      seed: int = 0, workers: int = 1) -> TriangleSandwich:
    """Bracket the Monte Carlo triangle integral between its bounds."""
    return TriangleSandwich(
        float(w),
        triangle_lower_bound(w, params),
        triangle_upper_bound(w, params),
        triangle_integral_mc(w, params, n_samples, seed, workers),
    )


# ---------------------------------------------------------------------------
# Conditional weight density given the degree, and the clustering function
# ---------------------------------------------------------------------------

def poisson_tail_bound(lam: float, x: float) -> float:
    """Chernoff bound: P(|Poi(lam) - lam| >= x) <= 2 exp(-x^2 / (2(lam + x)))."""
    if x <= 0:
        return 1.0
    return 2.0 * math.exp(-x * x / (2.0 * (lam + x)))


def _window_halfwidth(k: float, width: float) -> float:
    # width*sqrt(k log k) dominates at large k; the additive 6*width floor
    # keeps the Chernoff certificate strong at desk-scale degrees.
    kk = max(k, 2.0)
    return width * math.sqrt(kk * math.log(kk)) + 6.0 * width


def concentration_window(k: int, params: ModelParams,
                         width: float = 8.0) -> tuple[float, float]:
    """Weight window carrying all but O(k**(-width^2/2)) of f_k's mass.

    Maps the Poisson fluctuation band k -/+ halfwidth (with halfwidth of
    order width*sqrt(k log k)) through the inverse mean degree, clipping at
    the support edge w = 1.
    """
    half = _window_halfwidth(float(k), width)
    m1 = mean_degree(1.0, params)
    k_lo = float(k) - half
    w_lo = 1.0 if k_lo <= m1 else inverse_mean_degree(k_lo, params)
    k_hi = max(float(k) + half, m1 + _window_halfwidth(m1, width))
    w_hi = inverse_mean_degree(k_hi, params)
    return w_lo, w_hi


def _log_fk_unnormalized(w: float, k: int, params: ModelParams) -> float:
    """log of e^{-M(w)} M(w)^k / k! * f_W(w); log-space to survive large k."""
    m = mean_degree(w, params)
    return -m + k * math.log(m) - math.lgamma(k + 1.0) \
        + math.log(params.beta - 1.0) - params.beta * math.log(w)


def _fk_anchor_points(k: int, params: ModelParams, w_lo: float, w_hi: float):
    """Breakpoints pinning the Poisson bump of f_k inside its window.

    The bump sits at the inverse mean degree with weight-scale width
    sqrt(k) / M'(mode); without anchors the adaptive quadrature can settle
    on the flat underflowed-to-zero flanks.
    """
    m1 = mean_degree(1.0, params)
    mode = inverse_mean_degree(float(k), params) if k > m1 else 1.0
    sigma = math.sqrt(max(float(k), 1.0)) / mean_degree_derivative(max(mode, 1.0), params)
    pts = sorted({mode + c * sigma for c in (-30.0, -10.0, -3.0, 0.0, 3.0, 10.0, 30.0)})
    return [p for p in pts if w_lo < p < w_hi] or None


@lru_cache(maxsize=256)
def _fk_normalization(k: int, params: ModelParams) -> tuple[float, float, float]:
    """(normalizing mass over the window, w_lo, w_hi) for f_k."""
    w_lo, w_hi = concentration_window(k, params)
    out = integrate.quad(lambda w: math.exp(_log_fk_unnormalized(w, k, params)),
                         w_lo, w_hi, points=_fk_anchor_points(k, params, w_lo, w_hi),
                         limit=800, epsrel=1e-11, full_output=1)
    if len(out) > 3:
        raise EstimationError(f"weight-density normalization failed: {out[-1]}")
    mass = out[0]
    if not mass > 0:
        raise EstimationError("conditional weight density has vanishing window mass")
    # Chernoff control of the truncation: outside the window every Poisson
    # probability sits below the band bound, weighted by the Pareto mass of
    # the excluded weight ranges.
    half = _window_halfwidth(float(k), 8.0)
    bound = poisson_tail_bound(float(k) + half, half)
    from .model import weight_cdf

    excluded = weight_cdf(w_lo, params.beta) + (1.0 - weight_cdf(w_hi, params.beta))
    if bound * excluded > 1e-6 * mass:
        raise EstimationError("concentration window too narrow for this k")
    return mass, w_lo, w_hi


def conditional_weight_density(w: float, k: int, params: ModelParams) -> float:
    """Density f_k(w) of the root weight given that its degree equals k.

    Proportional to e^{-M(w)} M(w)^k f_W(w); normalized by quadrature over
    the concentration window (truncation below 1e-9 by the Chernoff bound).
    """
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    w = float(w)
    if w <= 1.0:
        return 0.0
    mass, _, _ = _fk_normalization(int(k), params)
    return math.exp(_log_fk_unnormalized(w, int(k), params)) / mass


def clustering_function(k: int, params: ModelParams, n_samples: int = 200_000,
                        seed: int = 0, nodes: int = 40,
                        workers: int = 1) -> Estimate:
    """Clustering function gamma(k): mean adjacency probability of two
    uniformly random neighbors of a degree-k root.

    Gauss-Legendre quadrature of the triangle edge probability against the
    conditional weight density over its concentration window; the density is
    self-normalized on the same nodes, and the per-node Monte Carlo standard
    errors propagate through the quadrature weights.
    """
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    params.require_long_range()
    w_lo, w_hi = concentration_window(int(k), params)
    x, gl_w = np.polynomial.legendre.leggauss(nodes)
    mid, halfspan = 0.5 * (w_hi + w_lo), 0.5 * (w_hi - w_lo)
    w_nodes = mid + halfspan * x
    log_fk = np.array([_log_fk_unnormalized(w, int(k), params) for w in w_nodes])
    raw = gl_w * np.exp(log_fk - log_fk.max())
    lam = raw / raw.sum()

    value = 0.0
    variance = 0.0
    total = 0
    for i, (w_node, weight) in enumerate(zip(w_nodes, lam)):
        if weight < 1e-12:
            continue
        m_i = max(1500, int(round(n_samples * weight)))
        est = triangle_edge_probability_mc(w_node, params, m_i,
                                           seed=seed + 7919 * i, workers=workers)
        value += weight * est.value
        variance += (weight * est.std_error) ** 2
        total += est.n_samples
    return Estimate(value, math.sqrt(variance), total)


# ---------------------------------------------------------------------------
# Scale-ratio convergence report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatioRow:
    k_or_w: float
    quantity: str
    value: float
    std_error: float
    target: float
    rel_dev: float


def closure_limit_targets(params: ModelParams, n_samples: int = 200_000,
                          seed: int = 0, workers: int = 1) -> tuple[Estimate, Optional[Estimate]]:
    """Limit of T(w) / triangle_scale(w), per regime.

    Above the critical line this is the Pareto average of the pair overlap
    integral; on it, both circulating candidates (lower limit 0 and 1 of the
    overlap profile integral); below it, the closure weight average.
    """
    label = classify_regime(params.a, params.beta)
    if label.case is RegimeCase.INVERSE_LINEAR:
        return Estimate(pair_overlap_weight_average(params), 0.0, 0), None
    if label.case is RegimeCase.CRITICAL_LOG:
        return (
            Estimate(critical_overlap_integral(params, lower=0.0), 0.0, 0),
            Estimate(critical_overlap_integral(params, lower=1.0), 0.0, 0),
        )
    est = two_path_closure_weight_average(params, n_samples, seed, workers)
    return est, None


def limit_ratio_report(params: ModelParams, k_grid, n_samples: int = 0,
                       seed: int = 0, workers: int = 1) -> list[RatioRow]:
    """Tabulate convergence of the two scale ratios along a degree grid.

    Always reports triangle_scale(M^-1(k)) / (k^2 * clustering_scaling(k))
    against its closed-form limit.  With n_samples > 0, additionally reports
    the Monte Carlo ratio T(M^-1(k)) / triangle_scale(M^-1(k)) against the
    regime's closure limit (feasible only while the triangle probability is
    large enough to hit).
    """
    if params.kernel is not Kernel.INTERPOLATION:
        raise InvalidParameterError("the ratio report covers the interpolation kernel")
    params.require_long_range()
    a, beta = params.a, params.beta
    k_grid = [float(k) for k in k_grid]
    if any(k2 <= k1 for k1, k2 in zip(k_grid, k_grid[1:])):
        raise DomainError("k_grid must be strictly increasing")
    const = clustering_scale_ratio_constant(params)
    rows = []
    for k in k_grid:
        m_inv = inverse_mean_degree(k, params)
        sigma = triangle_scale(m_inv, a, beta)
        ratio = sigma / (k * k * clustering_scaling(k, a, beta))
        rows.append(RatioRow(k, "scale_ratio", ratio, 0.0, const, ratio / const - 1.0))
    if n_samples > 0:
        target, _alt = closure_limit_targets(params, max(n_samples, 10_000), seed, workers)
        for i, k in enumerate(k_grid):
            m_inv = inverse_mean_degree(k, params)
            sigma = triangle_scale(m_inv, a, beta)
            t_hat = triangle_integral_mc(m_inv, params, n_samples,
                                         seed=seed + 104729 * (i + 1), workers=workers)
            ratio = t_hat.value / sigma
            rows.append(RatioRow(k, "triangle_over_scale", ratio,
                                 t_hat.std_error / sigma, target.value,
                                 ratio / target.value - 1.0))
    return rows
