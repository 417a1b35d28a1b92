"""Euler-angle rotation systems as data.

A :class:`RotationConvention` lists three elemental rotations in matrix
multiplication order (leftmost factor first). That one list fixes both the
axis sequence and, by reading it left-to-right or right-to-left, the
intrinsic or extrinsic interpretation, so no separate flag is stored.

Five systems ship with the package:

========================  ===============================================
``WIKI_ZYX``              Rz(yaw) Ry(pitch) Rx(roll), all right-handed
``W300LP``                Rx(pitch) Ry(yaw) Rz(roll), all left-handed
``TDDFA_V2``              Rz(roll, right) Ry(yaw, left) Rx(pitch, right)
``REPNET6D``              Rz(roll) Ry(yaw) Rx(pitch), all right-handed
``WHENET_PANOPTIC``       same matrices as ``W300LP``; pitch and roll
                          restricted to the open interval (-90, 90) deg
========================  ===============================================
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import AngleRangeError, FormatError, InvalidInputError, UnsupportedError
from .so3 import Axis, Handedness, RotationMatrix, elemental, elemental_array


class AngleRole(enum.Enum):
    PITCH = "pitch"
    YAW = "yaw"
    ROLL = "roll"


ROLES = (AngleRole.PITCH, AngleRole.YAW, AngleRole.ROLL)


@dataclass(frozen=True)
class ElementalSpec:
    axis: Axis
    handedness: Handedness
    role: AngleRole

    def __str__(self):
        return f"{self.axis.value}{self.handedness.sign}{self.role.value}"

    @classmethod
    def parse(cls, text: str) -> ElementalSpec:
        """Parse ``"Z+yaw"`` / ``"X-pitch"`` (``+`` right-handed, ``-`` left-handed)."""
        m = re.fullmatch(r"\s*([XYZxyz])\s*([+-])\s*(pitch|yaw|roll)\s*", text)
        if m is None:
            raise FormatError(f"bad elemental spec {text!r}; expected e.g. 'Z+yaw'")
        hand = Handedness.RIGHT if m.group(2) == "+" else Handedness.LEFT
        return cls(Axis(m.group(1).upper()), hand, AngleRole(m.group(3)))

    def matrix(self, angle: float) -> RotationMatrix:
        return elemental(self.axis, self.handedness, angle)


@dataclass(frozen=True)
class AngleRange:
    """Interval in radians; open/closed per end."""

    low: float = -math.pi
    high: float = math.pi
    low_closed: bool = False
    high_closed: bool = True

    def __contains__(self, angle: float) -> bool:
        lo_ok = angle >= self.low if self.low_closed else angle > self.low
        hi_ok = angle <= self.high if self.high_closed else angle < self.high
        return lo_ok and hi_ok

    def to_text(self) -> str:
        """Interval notation in degrees, e.g. ``"(-180, 180]"``."""
        lo = "[" if self.low_closed else "("
        hi = "]" if self.high_closed else ")"
        return f"{lo}{math.degrees(self.low):.12g}, {math.degrees(self.high):.12g}{hi}"

    @classmethod
    def parse(cls, text: str) -> AngleRange:
        m = re.fullmatch(r"\s*([\[(])\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*([\])])\s*", text)
        if m is None:
            raise FormatError(f"bad angle range {text!r}; expected e.g. '(-180, 180]'")
        return cls(
            math.radians(float(m.group(2))),
            math.radians(float(m.group(3))),
            m.group(1) == "[",
            m.group(4) == "]",
        )


FULL_RANGE = AngleRange()
HALF_OPEN = AngleRange(-math.pi / 2, math.pi / 2, False, False)


@dataclass(frozen=True, repr=False)
class RotationConvention:
    name: str
    sequence: tuple[ElementalSpec, ElementalSpec, ElementalSpec]
    frame_note: str = ""
    angle_ranges: Mapping[AngleRole, AngleRange] = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        seq = tuple(self.sequence)
        if len(seq) != 3:
            raise InvalidInputError(f"{self.name}: a convention needs exactly 3 elemental rotations")
        if len({s.axis for s in seq}) != 3:
            raise InvalidInputError(f"{self.name}: elemental rotations must use 3 distinct axes")
        if len({s.role for s in seq}) != 3:
            raise InvalidInputError(f"{self.name}: elemental rotations must use 3 distinct angle roles")
        ranges = {role: FULL_RANGE for role in ROLES}
        ranges.update(self.angle_ranges or {})
        object.__setattr__(self, "sequence", seq)
        object.__setattr__(self, "angle_ranges", ranges)

    def __repr__(self):
        return f"RotationConvention({self.name!r}, {self.sequence_text()})"

    def range_of(self, role: AngleRole) -> AngleRange:
        return self.angle_ranges[role]

    def sequence_text(self) -> list[str]:
        return [str(s) for s in self.sequence]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "sequence": self.sequence_text(),
            "frame_note": self.frame_note,
            "angle_ranges_deg": {role.value: self.angle_ranges[role].to_text() for role in ROLES},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> RotationConvention:
        try:
            seq = tuple(ElementalSpec.parse(s) for s in d["sequence"])
            ranges = {AngleRole(k): AngleRange.parse(v) for k, v in d.get("angle_ranges_deg", {}).items()}
            return cls(d["name"], seq, d.get("frame_note", ""), ranges)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad convention record: {exc}") from exc


def _seq(*texts: str) -> tuple:
    return tuple(ElementalSpec.parse(t) for t in texts)


WIKI_ZYX = RotationConvention(
    "WIKI_ZYX",
    _seq("Z+yaw", "Y+pitch", "X+roll"),
    "Right-handed frame shared by Wikipedia and SciPy ('ZYX' intrinsic); "
    "X points out of the nose, Z up.",
)
W300LP = RotationConvention(
    "W300LP",
    _seq("X-pitch", "Y-yaw", "Z-roll"),
    "300W-LP / BFM frame: X toward the subject's left, Y up, Z out of the face; "
    "intrinsic X-Y-Z (pitch-yaw-roll) with left-handed elemental rotations.",
)
TDDFA_V2 = RotationConvention(
    "TDDFA_V2",
    _seq("Z+roll", "Y-yaw", "X+pitch"),
    "300W-LP frame; the mixed-handedness system implied by 3DDFA_v2's matrix2angle().",
)
REPNET6D = RotationConvention(
    "REPNET6D",
    _seq("Z+roll", "Y+yaw", "X+pitch"),
    "300W-LP frame; 6D-RepNet's get_R(). Its matrices are the transposes of W300LP's "
    "for the same (pitch, yaw, roll).",
)
WHENET_PANOPTIC = RotationConvention(
    "WHENET_PANOPTIC",
    W300LP.sequence,
    "W300LP matrices with WHENet's select_euler() bounds: |pitch|, |roll| < 90 deg.",
    {AngleRole.PITCH: HALF_OPEN, AngleRole.ROLL: HALF_OPEN},
)

_BUILTINS = (WIKI_ZYX, W300LP, TDDFA_V2, REPNET6D, WHENET_PANOPTIC)


def builtin_conventions() -> list[RotationConvention]:
    return list(_BUILTINS)


class ConventionRegistry(Mapping[str, RotationConvention]):
    """Immutable name -> convention map. ``extended`` returns a new registry."""

    def __init__(self, conventions: Iterable[RotationConvention]):
        self._by_name: dict[str, RotationConvention] = {}
        for conv in conventions:
            if conv.name in self._by_name:
                raise InvalidInputError(f"duplicate convention name {conv.name!r}")
            self._by_name[conv.name] = conv

    def __getitem__(self, name: str) -> RotationConvention:
        try:
            return self._by_name[name]
        except KeyError:
            known = ", ".join(self._by_name)
            raise UnsupportedError(f"unknown convention {name!r} (known: {known})") from None

    # Mapping's defaults expect KeyError from __getitem__
    def __contains__(self, name) -> bool:
        return name in self._by_name

    def get(self, name, default=None):
        return self._by_name.get(name, default)

    def __iter__(self):
        return iter(self._by_name)

    def __len__(self):
        return len(self._by_name)

    def extended(self, conventions: Iterable[RotationConvention]) -> ConventionRegistry:
        return ConventionRegistry([*self._by_name.values(), *conventions])

    def to_json(self) -> str:
        return json.dumps([c.to_dict() for c in self._by_name.values()], indent=2)

    @classmethod
    def from_json(cls, text: str) -> ConventionRegistry:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, list):
            raise FormatError("convention document must be a JSON list")
        return cls(RotationConvention.from_dict(d) for d in data)


BUILTINS = ConventionRegistry(_BUILTINS)


def get_convention(name) -> RotationConvention:
    if isinstance(name, RotationConvention):
        return name
    return BUILTINS[name]


def _wrap_neg_pi(a: float) -> float:
    # keeps the (-pi, pi] convention when arctan2 hands back exactly -pi
    return math.pi if a == -math.pi else a


_ANGLE_FIELDS = ("pitch", "yaw", "roll")


@dataclass(frozen=True)
class EulerAngles:
    """(pitch, yaw, roll) in radians, meaningful only within ``convention``."""

    pitch: float
    yaw: float
    roll: float
    convention: RotationConvention = W300LP

    def __post_init__(self):
        for name in _ANGLE_FIELDS:
            a = float(getattr(self, name))
            if not math.isfinite(a):
                raise InvalidInputError(f"{name} must be finite, got {a!r}")
            if not -math.pi < a <= math.pi:
                raise AngleRangeError(f"{name}={a!r} rad is outside (-pi, pi]")
            object.__setattr__(self, name, a)

    @classmethod
    def from_degrees(cls, pitch, yaw, roll, convention=W300LP) -> EulerAngles:
        return cls(math.radians(pitch), math.radians(yaw), math.radians(roll), get_convention(convention))

    def degrees(self) -> tuple[float, float, float]:
        return math.degrees(self.pitch), math.degrees(self.yaw), math.degrees(self.roll)

    def as_tuple(self) -> tuple[float, float, float]:
        return self.pitch, self.yaw, self.roll

    def get(self, role: AngleRole) -> float:
        return getattr(self, role.value)

    def retag(self, convention: RotationConvention) -> EulerAngles:
        return EulerAngles(self.pitch, self.yaw, self.roll, convention)

    def in_range(self) -> bool:
        return all(self.get(role) in self.convention.range_of(role) for role in ROLES)


def sequence_matrix(sequence, angles: Mapping[AngleRole, float]) -> np.ndarray:
    """Raw product of the elemental matrices, no range checks."""
    a, b, c = (elemental_array(s.axis, s.handedness, angles[s.role]) for s in sequence)
    return a @ b @ c


def euler_to_matrix(angles: EulerAngles) -> RotationMatrix:
    """Rotation matrix of ``angles`` under their convention.

    Raises :class:`AngleRangeError` if any angle lies outside the
    convention's declared range.
    """
    conv = angles.convention
    vals = dict(zip(ROLES, (angles.pitch, angles.yaw, angles.roll)))
    for role, a in vals.items():
        if a not in conv.range_of(role):
            raise AngleRangeError(
                f"{conv.name}: {role.value}={math.degrees(a):.9g} deg outside {conv.range_of(role).to_text()}"
            )
    return RotationMatrix(sequence_matrix(conv.sequence, vals))


# Expanded closed forms, written out entry by entry (independent of the
# elemental-product code path above).
def _wiki_closed_form(p, y, r):
    cy, sy, cp, sp, cr, sr = np.cos(y), np.sin(y), np.cos(p), np.sin(p), np.cos(r), np.sin(r)
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def _w300lp_closed_form(p, y, r):
    cy, sy, cp, sp, cr, sr = np.cos(y), np.sin(y), np.cos(p), np.sin(p), np.cos(r), np.sin(r)
    return np.array(
        [
            [cy * cr, cy * sr, -sy],
            [-cp * sr + sp * sy * cr, cp * cr + sp * sy * sr, sp * cy],
            [sp * sr + cp * sy * cr, -sp * cr + cp * sy * sr, cp * cy],
        ]
    )


CLOSED_FORMS = {"WIKI_ZYX": _wiki_closed_form, "W300LP": _w300lp_closed_form}


def matrix_entry_formula_check(convention: RotationConvention, samples: int = 1000, seed: int = 0, tol: float = 1e-12) -> bool:
    """Compare ``euler_to_matrix`` against the expanded matrix for the named system.

    Only ``WIKI_ZYX`` and ``W300LP`` have expanded forms; the lookup is by
    name, so a convention that borrows one of those names but carries a
    different sequence fails the check.
    """
    try:
        closed = CLOSED_FORMS[convention.name]
    except KeyError:
        raise UnsupportedError(f"no expanded closed form for {convention.name!r}") from None
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        p, y, r = (_wrap_neg_pi(float(v)) for v in rng.uniform(-math.pi, math.pi, 3))
        angles = EulerAngles(p, y, r, convention)
        try:
            numeric = euler_to_matrix(angles)
        except AngleRangeError:
            continue
        if np.max(np.abs(numeric.m - closed(p, y, r))) > tol:
            return False
    return True
