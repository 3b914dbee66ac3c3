"""Core definitions for spatial inhomogeneous random graphs (SIRGs).

Vertices carry a position in R^d and an i.i.d. Pareto weight with density
(beta - 1) * w**(-beta) on w > 1.  Conditionally on positions and weights,
each vertex pair {i, j} is linked independently with probability

    kappa(r, s, t) = 1                      if r**d <  g(s, t),
                   = (g(s, t) / r**d)**alpha  otherwise (alpha finite),
                   = 0                      otherwise (alpha infinite),

where r is the spatial distance, alpha is the long-range decay parameter and
g is a symmetric weight kernel.  Two kernels are supported:

* the interpolation kernel  g_a(s, t) = (s v t) * (s ^ t)**a  with a >= 0,
  which recovers the product kernel at a = 1 (GIRG-style graphs), the max
  kernel at a = 0 and the age-based kernel at a = beta - 2;
* the Boolean sum kernel  (s + t)**d  of ball-intersection models.

This module owns the parameter container, the kernels, the weight law, the
classification of the large-degree clustering regimes and every closed-form
constant used by the theory engine: the intensity constant xi_alpha, the
clustering decay law, the growth scales of the conditional mean degree, its
inverse and the expected triangle count, and the limiting clustering
constant.  Everything here is a pure function of its arguments and safe for
concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

__all__ = [
    "SirgError",
    "InvalidParameterError",
    "DomainError",
    "UnsupportedRegimeError",
    "DivergentIntegralError",
    "EstimationError",
    "InsufficientDataError",
    "Kernel",
    "ModelParams",
    "Estimate",
    "RegimeCase",
    "RegimeLabel",
    "ClusteringLimit",
    "unit_ball_volume",
    "xi_alpha",
    "weight_kernel",
    "connection_probability",
    "weight_density",
    "weight_cdf",
    "sample_weights",
    "classify_regime",
    "clustering_scaling",
    "triangle_scale",
    "mean_degree_scale",
    "inverse_degree_scale",
    "mean_degree_growth_constant",
    "typical_weight_growth_constant",
    "clustering_scale_ratio_constant",
    "triangle_envelope",
    "clustering_limit_constant",
]


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class SirgError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(SirgError, ValueError):
    """Model parameters violate their domain constraints."""


class DomainError(InvalidParameterError):
    """A function argument lies outside the operation's domain."""


class UnsupportedRegimeError(InvalidParameterError):
    """(a, beta) sits on a boundary not covered by the scaling laws."""


class DivergentIntegralError(InvalidParameterError):
    """The requested integral or intensity diverges for these parameters."""


class EstimationError(SirgError, RuntimeError):
    """A quadrature or Monte Carlo routine failed to produce an estimate."""


class InsufficientDataError(SirgError, ValueError):
    """Not enough data points to perform the requested fit."""


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

class Kernel(Enum):
    INTERPOLATION = "interp"
    BOOLEAN_SUM = "boolean"


_KERNEL_BY_NAME = {k.value: k for k in Kernel}


@dataclass(frozen=True)
class ModelParams:
    """Parameters of a SIRG.

    d       spatial dimension, >= 1
    alpha   long-range parameter in (0, inf]; use ``math.inf`` for the hard
            threshold kernel.  Every infinite-model quantity (mean degree,
            neighbor intensity, clustering function) additionally requires
            alpha > 1; values in (0, 1] are accepted only so that finite
            boxes can still be sampled.
    beta    Pareto tail parameter, > 2 so the weights have finite mean
    a       interpolation exponent, >= 0 (ignored by the sum kernel)
    kernel  weight kernel family

    The sum kernel additionally requires beta > d so the graph is locally
    finite in the mean.
    """

    d: int
    alpha: float
    beta: float
    a: float = 1.0
    kernel: Kernel = Kernel.INTERPOLATION

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise InvalidParameterError(f"dimension d must be an integer >= 1, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        for name in ("alpha", "beta", "a"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or math.isnan(v):
                raise InvalidParameterError(f"{name} must be a real number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not self.alpha > 0:
            raise InvalidParameterError(f"alpha must be positive, got {self.alpha}")
        if not self.beta > 2:
            raise InvalidParameterError(
                f"beta must exceed 2 (finite-mean weights), got {self.beta}")
        if self.a < 0:
            raise InvalidParameterError(f"a must be >= 0, got {self.a}")
        if not isinstance(self.kernel, Kernel):
            raise InvalidParameterError(f"unknown kernel {self.kernel!r}")
        if self.kernel is Kernel.BOOLEAN_SUM and not self.beta > self.d:
            raise InvalidParameterError(
                f"sum kernel requires beta > d, got beta={self.beta}, d={self.d}")

    def require_long_range(self):
        """Raise unless alpha > 1 (the degree of the root is a.s. finite)."""
        if not self.alpha > 1:
            raise DivergentIntegralError(
                f"alpha must exceed 1 for the infinite model (got {self.alpha}): "
                "the neighbor intensity is not integrable")

    # flat key=value serialization ------------------------------------------

    def to_text(self) -> str:
        return (
            f"d={self.d}\n"
            f"alpha={'inf' if math.isinf(self.alpha) else format(self.alpha, '.17g')}\n"
            f"beta={format(self.beta, '.17g')}\n"
            f"a={format(self.a, '.17g')}\n"
            f"kernel={self.kernel.value}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "ModelParams":
        fields: dict[str, str] = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(f"expected key=value, got {raw!r}")
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
        return cls.from_mapping(fields)

    @classmethod
    def from_mapping(cls, fields) -> "ModelParams":
        missing = [k for k in ("d", "alpha", "beta") if k not in fields]
        if missing:
            raise InvalidParameterError(f"missing model parameter(s): {', '.join(missing)}")
        kernel_name = fields.get("kernel", "interp")
        if kernel_name not in _KERNEL_BY_NAME:
            raise InvalidParameterError(
                f"kernel must be one of {sorted(_KERNEL_BY_NAME)}, got {kernel_name!r}")
        try:
            return cls(
                d=int(fields["d"]),
                alpha=float(fields["alpha"]),
                beta=float(fields["beta"]),
                a=float(fields.get("a", 1.0)),
                kernel=_KERNEL_BY_NAME[kernel_name],
            )
        except ValueError as exc:
            if isinstance(exc, InvalidParameterError):
                raise
            raise InvalidParameterError(str(exc)) from exc


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo value with its standard error.

    std_error is the sample standard deviation divided by sqrt(n_samples);
    deterministic quantities use std_error = 0 and n_samples = 0.
    """

    value: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.std_error < 0:
            raise InvalidParameterError("std_error must be >= 0")
        if self.n_samples < 0:
            raise InvalidParameterError("n_samples must be >= 0")

    def scaled(self, factor: float) -> "Estimate":
        return Estimate(self.value * factor, self.std_error * abs(factor), self.n_samples)


# ---------------------------------------------------------------------------
# Kernels and weights
# ---------------------------------------------------------------------------

def unit_ball_volume(d: int) -> float:
    """Lebesgue volume of the unit ball in R^d: pi^{d/2} / Gamma(d/2 + 1)."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidParameterError(f"dimension must be an integer >= 1, got {d!r}")
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0))


def xi_alpha(params: ModelParams) -> float:
    """Intensity constant alpha * omega_d * (beta - 1) / (alpha - 1).

    At alpha = inf this degenerates to omega_d * (beta - 1).  It is the
    proportionality constant between the mean degree of a weight-w root and
    the weight integral of the kernel.
    """
    params.require_long_range()
    om = unit_ball_volume(params.d)
    if math.isinf(params.alpha):
        return om * (params.beta - 1.0)
    return params.alpha * om * (params.beta - 1.0) / (params.alpha - 1.0)


def weight_kernel(s, t, params: ModelParams):
    """Symmetric weight kernel g(s, t); accepts scalars or arrays."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s <= 0) or np.any(t <= 0):
        raise DomainError("weight kernel arguments must be positive")
    if params.kernel is Kernel.BOOLEAN_SUM:
        out = (s + t) ** params.d
    else:
        out = np.maximum(s, t) * np.minimum(s, t) ** params.a
    return out if out.ndim else float(out)


def connection_probability(r, w1, w2, params: ModelParams):
    """Edge probability kappa(r, w1, w2) for distance r >= 0.

    Inside the ball r**d < g(w1, w2) the edge is certain; outside it decays
    as (g / r**d)**alpha, degenerating to a hard threshold at alpha = inf.
    Accepts scalars or broadcastable arrays; weights may be any positive
    reals (rescaled arguments below 1 are legitimate here).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("distance must be >= 0")
    g = np.asarray(weight_kernel(w1, w2, params), dtype=float)
    rd = r ** params.d
    inside = rd < g
    if math.isinf(params.alpha):
        out = np.where(inside, 1.0, 0.0)
    else:
        safe_rd = np.where(inside, 1.0, rd)
        out = np.where(inside, 1.0, (g / safe_rd) ** params.alpha)
    return out if out.ndim else float(out)


def weight_density(w, beta: float):
    """Pareto weight density (beta - 1) * w**(-beta) on w > 1, zero below."""
    if not beta > 2:
        raise InvalidParameterError(f"beta must exceed 2, got {beta}")
    w = np.asarray(w, dtype=float)
    out = np.where(w > 1.0, (beta - 1.0) * w ** (-beta), 0.0)
    return out if out.ndim else float(out)


def weight_cdf(w, beta: float):
    """CDF 1 - w**(1 - beta) of the Pareto weight law."""
    if not beta > 2:
        raise InvalidParameterError(f"beta must exceed 2, got {beta}")
    w = np.asarray(w, dtype=float)
    out = np.where(w > 1.0, 1.0 - w ** (1.0 - beta), 0.0)
    return out if out.ndim else float(out)


def sample_weights(rng: np.random.Generator, beta: float, size=None):
    """Draw Pareto weights via inversion: W = U**(-1 / (beta - 1))."""
    if not beta > 2:
        raise InvalidParameterError(f"beta must exceed 2, got {beta}")
    u = rng.random(size)
    return u ** (-1.0 / (beta - 1.0))


# ---------------------------------------------------------------------------
# Regime classification and scaling laws
# ---------------------------------------------------------------------------

class RegimeCase(Enum):
    INVERSE_LINEAR = "inverse_linear"          # decay 1/k
    CRITICAL_LOG = "critical_log"              # decay log(k)/k
    POLYNOMIAL = "polynomial"                  # decay k**(2a+2-2beta)
    CRITICAL_LOGSQ_INV = "critical_logsq_inv"  # decay 1/log(k)^2
    CONSTANT = "constant"                      # no decay


@dataclass(frozen=True)
class RegimeLabel:
    """Clustering decay regime of an (a, beta) pair.

    exponent is the power of k in the decay law (log factors are carried by
    the case itself, so both log cases report the pure-power part: -1 for
    log(k)/k and 0 for 1/log(k)^2).
    """

    case: RegimeCase
    exponent: float
    infinite_mean_degree: bool


def classify_regime(a: float, beta: float) -> RegimeLabel:
    """Classify the large-k decay of the clustering function.

    The five cases partition {beta > 2, a >= 0}: 1/k above the critical line
    beta = a + 3/2, log(k)/k on it, a polynomial law between the two critical
    lines, 1/log(k)^2 on beta = a + 1 and a constant below.  Boundary points
    whose case is only defined for larger a (beta = a + 3/2 with a <= 1/2,
    beta = a + 1 with a <= 1) are rejected rather than extrapolated.
    """
    if not (isinstance(beta, (int, float, np.floating, np.integer)) and beta > 2):
        raise InvalidParameterError(f"beta must exceed 2, got {beta!r}")
    if not (isinstance(a, (int, float, np.floating, np.integer)) and a >= 0):
        raise InvalidParameterError(f"a must be >= 0, got {a!r}")
    a = float(a)
    beta = float(beta)
    infinite_mean = beta < (a + 3.0) / 2.0
    if beta == a + 1.5:
        if a <= 0.5:
            raise UnsupportedRegimeError(
                f"beta = a + 3/2 is only classified for a > 1/2 (got a={a})")
        return RegimeLabel(RegimeCase.CRITICAL_LOG, -1.0, infinite_mean)
    if beta > max(a + 1.5, 2.0):
        return RegimeLabel(RegimeCase.INVERSE_LINEAR, -1.0, infinite_mean)
    if beta == a + 1.0:
        if a <= 1.0:
            raise UnsupportedRegimeError(
                f"beta = a + 1 is only classified for a > 1 (got a={a})")
        return RegimeLabel(RegimeCase.CRITICAL_LOGSQ_INV, 0.0, infinite_mean)
    if a + 1.0 < beta < a + 1.5:
        return RegimeLabel(RegimeCase.POLYNOMIAL, 2.0 * a + 2.0 - 2.0 * beta, infinite_mean)
    # remaining region: 2 < beta < a + 1, hence a > 1
    return RegimeLabel(RegimeCase.CONSTANT, 0.0, infinite_mean)


def clustering_scaling(k, a: float, beta: float) -> float:
    """Decay law of the clustering function at degree k (k >= 2)."""
    k = float(k)
    if not k >= 2:
        raise DomainError(f"k must be >= 2, got {k}")
    label = classify_regime(a, beta)
    if label.case is RegimeCase.INVERSE_LINEAR:
        return 1.0 / k
    if label.case is RegimeCase.CRITICAL_LOG:
        return math.log(k) / k
    if label.case is RegimeCase.POLYNOMIAL:
        return k ** (2.0 * a + 2.0 - 2.0 * beta)
    if label.case is RegimeCase.CRITICAL_LOGSQ_INV:
        return math.log(k) ** (-2.0)
    return 1.0


def triangle_scale(w, a: float, beta: float) -> float:
    """Growth scale of the expected rooted triangle count at root weight w.

    w above the beta = a + 3/2 line, w*log(w) on it, w**(4+2a-2beta) below.
    """
    w = float(w)
    if not w > 1:
        raise DomainError(f"w must exceed 1, got {w}")
    label = classify_regime(a, beta)
    if label.case is RegimeCase.INVERSE_LINEAR:
        return w
    if label.case is RegimeCase.CRITICAL_LOG:
        return w * math.log(w)
    return w ** (4.0 + 2.0 * a - 2.0 * beta)


def _degree_regime(a: float, beta: float) -> int:
    """0: beta > a+1 (linear), 1: beta = a+1 (log), 2: beta < a+1 (polynomial)."""
    classify_regime(a, beta)  # validates, rejects uncovered boundaries
    if beta > a + 1.0:
        return 0
    if beta == a + 1.0:
        return 1
    return 2


def mean_degree_scale(w, a: float, beta: float) -> float:
    """Growth scale of the conditional mean degree at root weight w."""
    w = float(w)
    if not w > 1:
        raise DomainError(f"w must exceed 1, got {w}")
    case = _degree_regime(a, beta)
    if case == 0:
        return w
    if case == 1:
        return w * math.log(w)
    return w ** (2.0 + a - beta)


def inverse_degree_scale(k, a: float, beta: float) -> float:
    """Growth scale of the typical root weight at degree k."""
    k = float(k)
    if not k >= 2:
        raise DomainError(f"k must be >= 2, got {k}")
    case = _degree_regime(a, beta)
    if case == 0:
        return k
    if case == 1:
        return k / math.log(k)
    return k ** (1.0 / (2.0 + a - beta))


def _require_interpolation(params: ModelParams, what: str):
    if params.kernel is not Kernel.INTERPOLATION:
        raise InvalidParameterError(f"{what} is defined for the interpolation kernel only")


def mean_degree_growth_constant(params: ModelParams) -> float:
    """Limit of mean_degree(w) / mean_degree_scale(w) as w grows."""
    _require_interpolation(params, "the mean-degree growth constant")
    xi = xi_alpha(params)
    a, beta = params.a, params.beta
    case = _degree_regime(a, beta)
    if case == 0:
        return xi / (beta - a - 1.0)
    if case == 1:
        return xi
    return (a - 1.0) * xi / ((beta - 2.0) * (a + 1.0 - beta))


def typical_weight_growth_constant(params: ModelParams) -> float:
    """Limit of inverse_mean_degree(k) / inverse_degree_scale(k)."""
    _require_interpolation(params, "the typical-weight growth constant")
    xi = xi_alpha(params)
    a, beta = params.a, params.beta
    case = _degree_regime(a, beta)
    if case == 0:
        return (beta - a - 1.0) / xi
    if case == 1:
        return 1.0 / xi
    return ((beta - 2.0) * (a + 1.0 - beta) / ((a - 1.0) * xi)) ** (1.0 / (2.0 + a - beta))


def clustering_scale_ratio_constant(params: ModelParams) -> float:
    """Limit of triangle_scale(M^-1(k)) / (k^2 * clustering_scaling(k)).

    Together with the limit of T(w)/triangle_scale(w) this factorizes the
    limiting clustering constant.
    """
    _require_interpolation(params, "the clustering scale ratio constant")
    xi = xi_alpha(params)
    a, beta = params.a, params.beta
    label = classify_regime(a, beta)
    if label.case is RegimeCase.INVERSE_LINEAR:
        return (beta - a - 1.0) / xi
    if label.case is RegimeCase.CRITICAL_LOG:
        return 1.0 / (2.0 * xi)
    if label.case is RegimeCase.POLYNOMIAL:
        return ((beta - a - 1.0) / xi) ** (4.0 + 2.0 * a - 2.0 * beta)
    if label.case is RegimeCase.CRITICAL_LOGSQ_INV:
        return xi ** (-2.0)
    return ((1.0 + a - beta) * (beta - 2.0) / ((a - 1.0) * xi)) ** 2


def triangle_envelope(w, w1, w2, params: ModelParams):
    """g(w1, w2) * min(g(w, w1), g(w, w2)).

    The envelope whose weight-tail integrability drives the phase transition
    of the triangle integral; it dominates both triangle bounds.
    """
    g12 = weight_kernel(w1, w2, params)
    return g12 * np.minimum(weight_kernel(w, w1, params), weight_kernel(w, w2, params))


# ---------------------------------------------------------------------------
# Limiting clustering constant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClusteringLimit:
    """Limiting constant of clustering_function(k) / clustering_scaling(k).

    In the log(k)/k regime two inequivalent candidate prefactors circulate,
    (2a+1)/(4 xi) and 1/(2 xi); both are reported (value / alt_value) and
    Monte Carlo has to discriminate.  Everywhere else alt_value is None.
    """

    value: Estimate
    alt_value: Optional[Estimate]
    case: RegimeCase


def clustering_limit_constant(params: ModelParams, n_samples: int = 400_000,
                              seed: int = 0, workers: int = 1) -> ClusteringLimit:
    """Evaluate the limiting clustering constant for these parameters.

    The weight integrals are delegated to the theory engine: the pair
    overlap integral (quadrature over its closed form) above the critical
    line and the two-path closure integral (importance-sampled Monte Carlo)
    below it.  For the sum kernel the decay is inverse linear with prefactor
    (beta - 1) / xi.
    """
    from . import theory  # deferred: theory builds on this module

    xi = xi_alpha(params)
    a, beta = params.a, params.beta
    if params.kernel is Kernel.BOOLEAN_SUM:
        i2 = theory.pair_overlap_weight_average(params)
        return ClusteringLimit(
            Estimate((beta - 1.0) / xi * i2, 0.0, 0), None, RegimeCase.INVERSE_LINEAR)

    label = classify_regime(a, beta)
    if label.case is RegimeCase.INVERSE_LINEAR:
        i2 = theory.pair_overlap_weight_average(params)
        return ClusteringLimit(
            Estimate((beta - a - 1.0) / xi * i2, 0.0, 0), None, label.case)
    if label.case is RegimeCase.CRITICAL_LOG:
        j = theory.critical_overlap_integral(params, lower=0.0)
        return ClusteringLimit(
            Estimate((2.0 * a + 1.0) / (4.0 * xi) * j, 0.0, 0),
            Estimate(1.0 / (2.0 * xi) * j, 0.0, 0),
            label.case,
        )
    s1 = theory.two_path_closure_weight_average(params, n_samples=n_samples,
                                                seed=seed, workers=workers)
    if label.case is RegimeCase.POLYNOMIAL:
        pref = ((beta - a - 1.0) / xi) ** (4.0 + 2.0 * a - 2.0 * beta)
    elif label.case is RegimeCase.CRITICAL_LOGSQ_INV:
        pref = xi ** (-2.0)
    else:
        pref = ((1.0 + a - beta) * (beta - 2.0) / ((a - 1.0) * xi)) ** 2
    return ClusteringLimit(s1.scaled(pref), None, label.case)
