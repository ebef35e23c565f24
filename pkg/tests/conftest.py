import numpy as np
import pytest

from funcineq import measures


def random_logconcave_model(rng: np.random.Generator):
    """A random 1D log-concave measure (possibly dilated)."""
    kind = int(rng.integers(4))
    if kind == 0:
        m = measures.gaussian(float(rng.uniform(0.5, 2.0)))
    elif kind == 1:
        m = measures.subbotin(float(rng.uniform(1.0, 3.0)))
    elif kind == 2:
        m = measures.exponential(float(rng.uniform(0.7, 2.0)))
    else:
        a = float(rng.uniform(-1.5, 0.0))
        m = measures.uniform(a, a + float(rng.uniform(0.5, 3.0)))
    if rng.random() < 0.4 and m.family != "uniform":
        m = measures.dilate(m, float(rng.uniform(0.5, 2.0)))
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
