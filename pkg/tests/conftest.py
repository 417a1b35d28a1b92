import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from headrot.so3 import RotationMatrix, quaternion_to_matrix

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# (pitch, yaw, roll) degrees of the three poses in the 300W-LP drawing comparison figure
TABLE1 = {
    "left": (6.208, 5.876, -1.694),
    "middle": (-17.325, -49.589, 11.423),
    "right": (-7.601, -54.009, 4.450),
}

HELEN = (-16.090911401458296, -89.9985818251308, -6.854511900533989)


@st.composite
def rotations(draw):
    """Haar-ish rotations from non-degenerate quaternions."""
    q = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4))
    n = math.sqrt(sum(v * v for v in q))
    if n < 1e-3:
        q, n = [1.0, 0.0, 0.0, 0.0], 1.0
    return RotationMatrix(quaternion_to_matrix([v / n for v in q]))


angles = st.floats(-math.pi, math.pi, exclude_min=True, allow_nan=False)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
