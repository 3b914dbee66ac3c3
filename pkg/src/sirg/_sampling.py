"""Shared low-level sampling primitives.

The neighbors of a weight-w root form an inhomogeneous Poisson process on
R^d x (1, inf) with intensity kappa(||x||, w, v) * f_W(v).  Its normalized
marginals factor into

* a weight draw with density proportional to g(w, v) * v**(-beta) on
  (1, inf), handled by exact piecewise-power inversion, and
* given the weight, a radial draw from the normalized profile of
  kappa(.; G): the ball volume u = r**d is uniform on (0, G) with
  probability (alpha-1)/alpha and Pareto-tailed, u = G * U**(-1/(alpha-1)),
  with probability 1/alpha (uniform only at alpha = inf);

together with a uniform direction.  Nothing is truncated: both branches use
exact inverse CDFs.  These primitives are consumed by the theory engine
(importance sampling) and by the neighborhood sampler.
"""

from __future__ import annotations

import math

import numpy as np

from .model import (
    DivergentIntegralError,
    DomainError,
    Kernel,
    ModelParams,
    weight_kernel,
)


def power_integral(p: float, lo: float, hi: float) -> float:
    """Integral of u**p over (lo, hi), with the log branch at p = -1."""
    if abs(p + 1.0) < 1e-12:
        return math.log(hi / lo)
    return (hi ** (p + 1.0) - lo ** (p + 1.0)) / (p + 1.0)


def sample_directions(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    """m uniform directions on the unit sphere in R^d, shape (m, d)."""
    if d == 1:
        return (2.0 * rng.integers(0, 2, size=m) - 1.0).reshape(m, 1)
    g = rng.standard_normal((m, d))
    norms = np.linalg.norm(g, axis=1)
    # a zero row has probability 0; guard against denormal flushes anyway
    norms[norms == 0.0] = 1.0
    return g / norms[:, None]


def sample_kernel_points(rng: np.random.Generator, m: int, mass_scale,
                         params: ModelParams) -> np.ndarray:
    """m points from the normalized spatial profile of kappa(.; G).

    mass_scale is the kernel value G = g(., .), scalar or length-m array.
    """
    g = np.broadcast_to(np.asarray(mass_scale, dtype=float), (m,))
    u = rng.random(m)
    if math.isinf(params.alpha):
        vol = g * u
    else:
        tail = rng.random(m) < 1.0 / params.alpha
        vol = g * np.where(tail, u ** (-1.0 / (params.alpha - 1.0)), u)
    radii = vol ** (1.0 / params.d)
    return radii[:, None] * sample_directions(rng, m, params.d)


# --- neighbor weight law ----------------------------------------------------

def _interp_piece_masses(w, a: float, beta: float):
    """Masses of g(w, v) * v**(-beta) on (1, w] and (w, inf)."""
    w = np.asarray(w, dtype=float)
    q = a + 1.0 - beta
    if abs(q) < 1e-9:
        below = w * np.log(w)
    else:
        below = w * (w ** q - 1.0) / q
    above = w ** (a + 2.0 - beta) / (beta - 2.0)
    return below, above


def _boolean_component_masses(w, d: int, beta: float):
    """Masses of the d+1 Pareto components of (w + v)**d * v**(-beta)."""
    from math import comb

    w = np.asarray(w, dtype=float)
    return [comb(d, j) * w ** (d - j) / (beta - 1.0 - j) for j in range(d + 1)]


def neighbor_intensity_mass(w, params: ModelParams):
    """Integral of g(w, v) * v**(-beta) dv over (1, inf).

    Multiplied by xi_alpha this is the conditional mean degree; the theory
    engine owns that wrapper.
    """
    if params.kernel is Kernel.BOOLEAN_SUM:
        if not params.beta > params.d + 1:
            raise DivergentIntegralError(
                "the sum-kernel neighbor intensity needs beta > d + 1")
        return sum(_boolean_component_masses(w, params.d, params.beta))
    below, above = _interp_piece_masses(w, params.a, params.beta)
    return below + above


def sample_neighbor_weights(rng: np.random.Generator, m: int, w,
                            params: ModelParams) -> np.ndarray:
    """m draws from the density proportional to g(w, v) * v**(-beta), v > 1.

    w is the root weight, scalar or length-m array (one draw per entry).
    """
    w = np.broadcast_to(np.asarray(w, dtype=float), (m,)).copy()
    if np.any(w < 1.0):
        raise DomainError("root weight must be >= 1")
    beta = params.beta
    u = rng.random(m)
    if params.kernel is Kernel.BOOLEAN_SUM:
        masses = np.stack(_boolean_component_masses(w, params.d, beta))  # (d+1, m)
        cdf = np.cumsum(masses, axis=0)
        pick = rng.random(m) * cdf[-1]
        component = (pick[None, :] > cdf).sum(axis=0)
        shape = beta - 1.0 - component
        return u ** (-1.0 / shape)

    a = params.a
    below, above = _interp_piece_masses(w, a, beta)
    take_below = rng.random(m) * (below + above) < below
    out = np.empty(m)
    # below-w piece: density ~ v**(a - beta) on (1, w]
    if np.any(take_below):
        ub, wb = u[take_below], w[take_below]
        q = a + 1.0 - beta
        if abs(q) < 1e-9:
            out[take_below] = wb ** ub
        else:
            out[take_below] = (1.0 + ub * (wb ** q - 1.0)) ** (1.0 / q)
    # above-w piece: Pareto tail of exponent beta - 2 started at w
    rest = ~take_below
    if np.any(rest):
        out[rest] = w[rest] * u[rest] ** (-1.0 / (beta - 2.0))
    return out


def neighbor_weight_cdf(v, w: float, params: ModelParams):
    """Closed-form CDF of the neighbor weight law (interpolation kernel)."""
    if params.kernel is not Kernel.INTERPOLATION:
        raise DomainError("closed-form neighbor weight CDF covers the interpolation kernel")
    v = np.asarray(v, dtype=float)
    a, beta = params.a, params.beta
    below, above = _interp_piece_masses(w, a, beta)
    total = below + above
    vb = np.clip(v, 1.0, w)
    if abs(beta - a - 1.0) < 1e-9:
        part_below = w * np.log(vb)
    else:
        q = a + 1.0 - beta
        part_below = w * (vb ** q - 1.0) / q
    va = np.maximum(v, w)
    part_above = w ** a * (w ** (2.0 - beta) - va ** (2.0 - beta)) / (beta - 2.0)
    out = np.where(v <= 1.0, 0.0, (part_below + part_above) / total)
    return out if out.ndim else float(out)


def sample_neighbors(rng: np.random.Generator, m: int, w,
                     params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """m (location, weight) pairs from the normalized neighbor intensity.

    Returns (locations (m, d), weights (m,)).
    """
    weights = sample_neighbor_weights(rng, m, w, params)
    g = weight_kernel(np.broadcast_to(np.asarray(w, dtype=float), (m,)), weights, params)
    points = sample_kernel_points(rng, m, g, params)
    return points, weights
