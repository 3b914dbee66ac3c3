"""Spatial inhomogeneous random graphs: finite-graph simulation and an
infinite-model theory engine for the clustering spectrum."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    ClusteringLimit,
    DivergentIntegralError,
    DomainError,
    Estimate,
    EstimationError,
    InsufficientDataError,
    InvalidParameterError,
    Kernel,
    ModelParams,
    RegimeCase,
    RegimeLabel,
    SirgError,
    UnsupportedRegimeError,
    classify_regime,
    clustering_limit_constant,
    clustering_scaling,
    connection_probability,
    sample_weights,
    unit_ball_volume,
    weight_kernel,
    xi_alpha,
)
