import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from headrot.errors import InvalidInputError
from headrot.so3 import (
    Axis,
    Handedness,
    RotationMatrix,
    compose,
    elemental,
    frobenius_distance,
    geodesic_distance,
    inverse,
    random_rotation,
)

from .conftest import rotations

R, L = Handedness.RIGHT, Handedness.LEFT


def test_elemental_zero_is_identity():
    assert elemental(Axis.X, R, 0.0) == RotationMatrix.identity()


def test_elemental_z_quarter_turn():
    np.testing.assert_allclose(elemental(Axis.Z, R, math.pi / 2).m, [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-16)


def test_left_is_transpose_of_right():
    np.testing.assert_array_equal(elemental(Axis.Y, L, 0.3).m, elemental(Axis.Y, R, 0.3).m.T)


@pytest.mark.parametrize("axis", list(Axis))
def test_left_equals_right_negated(axis, rng):
    for t in rng.uniform(-10, 10, 1000):
        left = elemental(axis, L, t).m
        assert np.max(np.abs(left - elemental(axis, R, t).m.T)) <= 1e-15
        assert np.max(np.abs(left - elemental(axis, R, -t).m)) <= 1e-15


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_elemental_rejects_non_finite(bad):
    with pytest.raises(InvalidInputError):
        elemental(Axis.X, R, bad)


@pytest.mark.parametrize(
    "m",
    [
        np.eye(2),
        np.diag([1.0, 1.0, 2.0]),
        np.diag([-1.0, 1.0, 1.0]),  # orthonormal but a reflection
        [[1, 0, 0], [0, 1, 0], [0, 0, math.nan]],
    ],
)
def test_rotation_validation(m):
    with pytest.raises(InvalidInputError):
        RotationMatrix(m)


def test_rotation_tolerates_serialization_noise():
    RotationMatrix(np.eye(3) + 1e-11)


def test_rotation_is_read_only():
    r = RotationMatrix.identity()
    with pytest.raises(ValueError):
        r.m[0, 0] = 2.0


def test_compose_identity_and_inverse(rng):
    r = random_rotation(rng)
    assert frobenius_distance(compose(RotationMatrix.identity(), r), r) == 0.0
    assert frobenius_distance(compose(r, inverse(r)), RotationMatrix.identity()) <= 1e-12


def test_compose_does_not_commute():
    a, b = elemental(Axis.Z, R, 0.2), elemental(Axis.Y, R, 0.5)
    assert frobenius_distance(compose(a, b), compose(b, a)) > 1e-3


def test_inverse_examples(rng):
    assert inverse(RotationMatrix.identity()) == RotationMatrix.identity()
    assert frobenius_distance(inverse(elemental(Axis.X, R, 0.7)), elemental(Axis.X, R, -0.7)) <= 1e-16
    r = random_rotation(rng)
    assert inverse(inverse(r)) == r


def test_frobenius_examples(rng):
    r = random_rotation(rng)
    assert frobenius_distance(r, r) == 0.0
    assert frobenius_distance(RotationMatrix.identity(), RotationMatrix(np.diag([-1.0, -1.0, 1.0]))) == pytest.approx(
        math.sqrt(8), abs=1e-15
    )


def test_geodesic_examples(rng):
    r = random_rotation(rng)
    assert geodesic_distance(r, r) <= 1e-15
    assert geodesic_distance(RotationMatrix.identity(), elemental(Axis.Z, R, math.pi / 2)) == pytest.approx(math.pi / 2)


@given(rotations(), rotations(), rotations())
def test_compose_associative(a, b, c):
    assert frobenius_distance(compose(compose(a, b), c), compose(a, compose(b, c))) <= 1e-12


@given(rotations(), rotations(), rotations())
def test_metrics_bi_invariant(a, b, c):
    assert abs(frobenius_distance(compose(c, a), compose(c, b)) - frobenius_distance(a, b)) <= 1e-12
    assert abs(geodesic_distance(compose(c, a), compose(c, b)) - geodesic_distance(a, b)) <= 1e-12
    assert abs(geodesic_distance(inverse(a), inverse(b)) - geodesic_distance(a, b)) <= 1e-12


@given(rotations(), rotations())
def test_metrics_symmetric(a, b):
    assert frobenius_distance(a, b) == frobenius_distance(b, a)
    assert 0.0 <= geodesic_distance(a, b) <= math.pi


@given(st.integers(0, 2**32 - 1))
def test_random_rotation_valid(seed):
    r = random_rotation(np.random.default_rng(seed))
    assert abs(np.linalg.det(r.m) - 1) < 1e-12


def test_geodesic_half_turn():
    assert geodesic_distance(RotationMatrix.identity(), RotationMatrix(np.diag([-1.0, -1.0, 1.0]))) == math.pi
