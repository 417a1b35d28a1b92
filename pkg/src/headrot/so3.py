"""3x3 rotation arithmetic.

Conventions fixed for the whole package:

* matrices are stored row-major as ``(3, 3)`` float64 arrays;
* a rotation acts on a row vector ``v`` as ``(R @ v.T).T``, i.e. columns of
  ``R`` are the rotated body axes;
* an elemental rotation is parameterised by its axis and a handedness. The
  right-handed matrices are the usual ones; a left-handed rotation by ``t``
  is the right-handed rotation by ``-t`` (the transpose).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

ORTHO_TOL = 1e-9
DET_TOL = 1e-9

_EYE = np.eye(3)
_EYE.flags.writeable = False


class Axis(enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def index(self) -> int:
        return "XYZ".index(self.value)


class Handedness(enum.Enum):
    RIGHT = "right"
    LEFT = "left"

    @property
    def sign(self) -> str:
        return "+" if self is Handedness.RIGHT else "-"


def _det3(m) -> float:
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def orthonormality_error(m) -> float:
    """Frobenius norm of ``m.T @ m - I``."""
    # scalar arithmetic: several times faster than numpy at this size
    (a, b, c), (d, e, f), (g, h, i) = np.asarray(m, dtype=np.float64).tolist()
    s00, s11, s22 = a * a + d * d + g * g - 1, b * b + e * e + h * h - 1, c * c + f * f + i * i - 1
    s01, s02, s12 = a * b + d * e + g * h, a * c + d * f + g * i, b * c + e * f + h * i
    return math.sqrt(s00 * s00 + s11 * s11 + s22 * s22 + 2 * (s01 * s01 + s02 * s02 + s12 * s12))


@dataclass(frozen=True, eq=False)
class RotationMatrix:
    """An element of SO(3), validated on construction.

    ``m`` is a read-only copy of the input. Raises :class:`InvalidInputError`
    if the input is not a finite orthonormal 3x3 matrix with determinant +1
    (both within 1e-9).
    """

    m: np.ndarray

    def __post_init__(self):
        arr = np.array(self.m, dtype=np.float64)
        if arr.shape != (3, 3):
            raise InvalidInputError(f"rotation must be 3x3, got shape {arr.shape}")
        err = orthonormality_error(arr)
        # NaN/inf propagate into err, so the negated comparison also rejects them
        if not err <= ORTHO_TOL:
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError("rotation has non-finite entries")
            raise InvalidInputError(f"matrix is not orthonormal (|M^T M - I|_F = {err:.3e})")
        det = _det3(arr.tolist())
        if abs(det - 1.0) > DET_TOL:
            raise InvalidInputError(f"matrix determinant is {det!r}, expected +1")
        arr.flags.writeable = False
        object.__setattr__(self, "m", arr)

    @classmethod
    def identity(cls) -> RotationMatrix:
        return cls(_EYE)

    @property
    def T(self) -> RotationMatrix:
        return inverse(self)

    def __matmul__(self, other):
        if isinstance(other, RotationMatrix):
            return compose(self, other)
        return self.m @ np.asarray(other)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.m, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, RotationMatrix):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    def __hash__(self):
        return hash(self.m.tobytes())

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(f"{v:.6g}" for v in row) + "]" for row in self.m)
        return f"RotationMatrix([{rows}])"

    def tolist(self) -> list[list[float]]:
        return self.m.tolist()

    def flat(self) -> list[float]:
        """Row-major list of the 9 entries."""
        return self.m.reshape(-1).tolist()


def as_rotation(r) -> RotationMatrix:
    """Coerce arrays / nested lists / RotationMatrix into a validated RotationMatrix."""
    if isinstance(r, RotationMatrix):
        return r
    return RotationMatrix(r)


def elemental_array(axis: Axis, handedness: Handedness, angle: float) -> np.ndarray:
    """Unvalidated ``(3, 3)`` array behind :func:`elemental`."""
    c, s = math.cos(angle), math.sin(angle)
    if handedness is Handedness.LEFT:
        s = -s
    if axis is Axis.X:
        m = [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
    elif axis is Axis.Y:
        m = [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
    else:
        m = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
    return np.array(m)


def elemental(axis: Axis, handedness: Handedness, angle: float) -> RotationMatrix:
    """Single-axis rotation by ``angle`` radians."""
    angle = float(angle)
    if not math.isfinite(angle):
        raise InvalidInputError(f"angle must be finite, got {angle!r}")
    return RotationMatrix(elemental_array(Axis(axis), Handedness(handedness), angle))


def compose(a: RotationMatrix, b: RotationMatrix) -> RotationMatrix:
    """Matrix product ``a @ b`` (apply ``b`` first to a column vector)."""
    return RotationMatrix(as_rotation(a).m @ as_rotation(b).m)


def inverse(r: RotationMatrix) -> RotationMatrix:
    return RotationMatrix(as_rotation(r).m.T)


def frobenius_distance(a, b) -> float:
    a = a.m if isinstance(a, RotationMatrix) else np.asarray(a, dtype=np.float64)
    b = b.m if isinstance(b, RotationMatrix) else np.asarray(b, dtype=np.float64)
    d = a - b
    return float(np.sqrt(np.sum(d * d)))


def geodesic_distance(a: RotationMatrix, b: RotationMatrix) -> float:
    """Angle in radians of the relative rotation ``a.T @ b``, in [0, pi].

    Uses atan2 of the skew and trace parts rather than a clamped arccos of
    the trace alone, which loses half the digits near 0.
    """
    a, b = as_rotation(a), as_rotation(b)
    m = a.m.T @ b.m
    cos_angle = (m[0, 0] + m[1, 1] + m[2, 2] - 1.0) / 2.0
    sin_angle = math.hypot(m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]) / 2.0
    return math.atan2(sin_angle, cos_angle)


def random_rotation(rng: np.random.Generator) -> RotationMatrix:
    """Haar-uniform rotation from a unit quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    return RotationMatrix(quaternion_to_matrix(q))


def quaternion_to_matrix(q) -> np.ndarray:
    """Rotation matrix of a unit quaternion ``(w, x, y, z)``."""
    w, x, y, z = (float(v) for v in q)
    return np.array(
        [
            [w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (y * x + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)],
            [2 * (z * x - w * y), 2 * (z * y + w * x), w * w - x * x - y * y + z * z],
        ]
    )
