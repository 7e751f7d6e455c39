import numpy as np
import pytest
from hypothesis import strategies as st

from tailgap import ParetoMixture


@pytest.fixture
def two_state():
    return ParetoMixture.from_arrays([1.0, 3.0], [0.5, 0.5], 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20121015)


@st.composite
def mixtures(draw, max_states=5, alpha_lo=0.5, alpha_hi=5.0):
    n = draw(st.integers(1, max_states))
    alphas = draw(
        st.lists(
            st.floats(alpha_lo, alpha_hi, allow_nan=False).map(lambda a: round(a, 3)),
            min_size=n,
            max_size=n,
            unique=True,
        )
    )
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n))
    x_min = draw(st.sampled_from([0.5, 1.0, 2.0, 10.0]))
    total = sum(raw)
    return ParetoMixture.from_arrays(alphas, [w / total for w in raw], x_min)
