import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from sirg.model import Kernel, ModelParams

settings.register_profile(
    "sirg",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("sirg")


def finite_alphas():
    return st.one_of(st.just(math.inf), st.floats(1.05, 8.0))


@st.composite
def model_params(draw, kernels=(Kernel.INTERPOLATION,), d_max=3):
    kernel = draw(st.sampled_from(list(kernels)))
    d = draw(st.integers(1, d_max))
    alpha = draw(finite_alphas())
    if kernel is Kernel.BOOLEAN_SUM:
        beta = draw(st.floats(d + 1.05, 8.0))
        a = 0.0
    else:
        beta = draw(st.floats(2.05, 8.0))
        a = draw(st.floats(0.0, 4.0))
    return ModelParams(d=d, alpha=alpha, beta=beta, a=a, kernel=kernel)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240613)
