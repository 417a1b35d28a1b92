"""Move rotations and Euler triples between rotation systems.

A conversion is a similarity transform ``t @ R @ t.T`` by a signed
permutation matrix ``t`` (a change of coordinate frame). 6D-RepNet is the
exception: it lives in 300W-LP's frame but its matrices are inverses of
300W-LP's, so that pair is registered with ``inverse_relation`` set and the
converted matrix is transposed.

Errors are measured on matrices only. Angle triples from two different
systems are never compared directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conventions import EulerAngles, RotationConvention, euler_to_matrix, get_convention
from .errors import InvalidInputError, UnsupportedError
from .extract import ExtractionResult, extract, representative
from .so3 import RotationMatrix, as_rotation, frobenius_distance

_T_W2S = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class BasisChange:
    t: np.ndarray
    from_convention: str
    to_convention: str
    inverse_relation: bool = False

    def __post_init__(self):
        t = np.array(self.t, dtype=np.float64)
        if t.shape != (3, 3) or not np.all(np.isin(t, (-1.0, 0.0, 1.0))):
            raise InvalidInputError("basis change must be a 3x3 matrix with entries in {-1, 0, 1}")
        if not np.array_equal(t.T @ t, np.eye(3)):
            raise InvalidInputError("basis change must be orthogonal")
        t.flags.writeable = False
        object.__setattr__(self, "t", t)

    def reversed(self) -> BasisChange:
        return BasisChange(self.t.T, self.to_convention, self.from_convention, self.inverse_relation)

    def apply_vector(self, v) -> np.ndarray:
        return self.t @ np.asarray(v, dtype=np.float64)


def basis_w2s() -> BasisChange:
    """300W-LP frame -> Wikipedia/SciPy frame."""
    return BasisChange(_T_W2S, "W300LP", "WIKI_ZYX")


def basis_s2w() -> BasisChange:
    return basis_w2s().reversed()


def _identity(a: str, b: str, inverse_relation: bool = False) -> BasisChange:
    return BasisChange(np.eye(3), a, b, inverse_relation)


def _build_registry() -> dict[tuple[str, str], BasisChange]:
    reg = {}
    forward = [
        basis_w2s(),
        _identity("W300LP", "REPNET6D", inverse_relation=True),
        # same frame, different Euler parameterisation
        _identity("W300LP", "TDDFA_V2"),
        _identity("W300LP", "WHENET_PANOPTIC"),
    ]
    for change in forward:
        reg[(change.from_convention, change.to_convention)] = change
        reg[(change.to_convention, change.from_convention)] = change.reversed()
    return reg


_REGISTRY = _build_registry()


def basis_change(source, target) -> BasisChange:
    """Registered change between two conventions (identity when they coincide)."""
    src, dst = get_convention(source).name, get_convention(target).name
    if src == dst:
        return _identity(src, dst)
    try:
        return _REGISTRY[(src, dst)]
    except KeyError:
        raise UnsupportedError(f"no registered conversion {src} -> {dst}") from None


def registered_pairs() -> list[tuple[str, str]]:
    return sorted(_REGISTRY)


def convert_rotation(r, change: BasisChange) -> RotationMatrix:
    m = change.t @ as_rotation(r).m @ change.t.T
    if change.inverse_relation:
        m = m.T
    return RotationMatrix(m)


def convert_euler(angles: EulerAngles, to) -> ExtractionResult:
    """Rebuild the matrix, change frame, extract under the target system."""
    target = get_convention(to)
    change = basis_change(angles.convention, target)
    return extract(convert_rotation(euler_to_matrix(angles), change), target)


def roundtrip_error(angles: EulerAngles, to) -> float:
    """Frobenius distance between the source matrix and the back-converted one.

    The target triple used is the first solution admissible in the target
    system's ranges.
    """
    target = get_convention(to)
    change = basis_change(angles.convention, target)
    original = euler_to_matrix(angles)
    result = extract(convert_rotation(original, change), target)
    chosen = representative(result)
    if chosen is None:
        raise UnsupportedError(f"no solution within {target.name}'s angle ranges")
    back = convert_rotation(euler_to_matrix(chosen), change.reversed())
    return frobenius_distance(original, back)
