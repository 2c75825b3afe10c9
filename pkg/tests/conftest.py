import math

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from qsdbounds.states import DensityMatrix, Example2Params, StatePair, build_example2

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")


@st.composite
def bloch_vectors(draw, max_radius=1.0):
    r = draw(st.floats(0.0, max_radius))
    theta = draw(st.floats(0.0, math.pi))
    phi = draw(st.floats(0.0, 2 * math.pi))
    return np.array([r * math.sin(theta) * math.cos(phi), r * math.sin(theta) * math.sin(phi), r * math.cos(theta)])


def qubit_state(r) -> DensityMatrix:
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0, -1.0]).astype(complex)
    m = 0.5 * (np.eye(2) + r[0] * sx + r[1] * sy + r[2] * sz)
    # keep the spectrum inside [0, 1] after rounding
    return DensityMatrix(m)


@st.composite
def qubit_pairs(draw, q=None):
    prior = draw(st.floats(0.05, 0.95)) if q is None else q
    return StatePair(qubit_state(draw(bloch_vectors(0.999))), qubit_state(draw(bloch_vectors(0.999))), prior)


@pytest.fixture(scope="session")
def fig7_pair() -> StatePair:
    return build_example2(Example2Params(0.1, math.pi / 4))
