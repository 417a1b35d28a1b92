"""Closed-form Euler angles from rotation matrices.

Every non-degenerate rotation has exactly two Euler triples in (-pi, pi]^3
for a Tait-Bryan system; they differ by pi in the outer two angles and
reflect the middle angle about +-pi/2. Extractors return both, the first
one having its middle angle in [-pi/2, pi/2].

When the middle angle sits at +-pi/2 (gimbal lock), only the sum or the
difference of the outer two angles is determined. The extractors then
return one canonical split with both halves in [-pi/2, pi/2] and set
``gimbal_lock``.

Gimbal detection compares the cosine of the middle angle, computed as the
norm of the two matrix entries that carry it, against
:data:`GIMBAL_COS_TOL`. The bound is the cosine equivalent of WHENet's
``|sin| > 0.9999999`` test (sqrt(1 - 0.9999999**2) ~= 4.47e-4). It is wide
enough to catch annotated near-lock labels such as 300W-LP's
HELEN_2375918801_1_14 (|cos(yaw)| ~= 2.5e-5) while staying far below any
pose a random rotation hits with noticeable probability (P ~= 1e-7).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .conventions import (
    REPNET6D,
    TDDFA_V2,
    W300LP,
    WHENET_PANOPTIC,
    WIKI_ZYX,
    EulerAngles,
    RotationConvention,
    get_convention,
)
from .errors import InvalidInputError, UnsupportedError
from .so3 import RotationMatrix, as_rotation

GIMBAL_COS_TOL = math.sqrt(1.0 - 0.9999999**2)
REPNET_SINGULAR_TOL = 1e-6

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class ExtractionResult:
    primary: EulerAngles
    secondary: Optional[EulerAngles] = None
    gimbal_lock: bool = False
    constraint_note: Optional[str] = None

    def __post_init__(self):
        if self.gimbal_lock and self.secondary is not None:
            raise InvalidInputError("a gimbal-lock result carries a single canonical solution")

    @property
    def solutions(self) -> list[EulerAngles]:
        return [self.primary] if self.secondary is None else [self.primary, self.secondary]

    def retag(self, convention: RotationConvention) -> ExtractionResult:
        if self.primary.convention is convention:
            return self
        return ExtractionResult(
            self.primary.retag(convention),
            None if self.secondary is None else self.secondary.retag(convention),
            self.gimbal_lock,
            self.constraint_note,
        )


def _pi_wrap(a: float) -> float:
    return math.pi if a == -math.pi else a


def _flip_outer(a: float) -> float:
    # a -/+ pi, staying inside (-pi, pi]
    return _pi_wrap(a - math.pi if a >= 0 else a + math.pi)


def _reflect_middle(m: float) -> float:
    return math.pi - m if m >= 0 else -math.pi - m


def _clamped_asin(x: float) -> float:
    return math.asin(min(1.0, max(-1.0, x)))


def _pair(conv, p1, y1, r1, p2, y2, r2) -> ExtractionResult:
    first = EulerAngles(_pi_wrap(p1), _pi_wrap(y1), _pi_wrap(r1), conv)
    return ExtractionResult(first, EulerAngles(_pi_wrap(p2), _pi_wrap(y2), _pi_wrap(r2), conv))


def _locked(conv, p, y, r, note) -> ExtractionResult:
    return ExtractionResult(EulerAngles(_pi_wrap(p), y, _pi_wrap(r), conv), None, True, note)


def extract_300wlp(r) -> ExtractionResult:
    """Pitch, yaw, roll of a 300W-LP matrix ``Rx_l(p) Ry_l(y) Rz_l(r)``.

    The primary solution has yaw = arcsin(-R[0,2]) in [-pi/2, pi/2], the
    branch 300W-LP itself labels with. Pitch and roll use the cos(yaw)-scaled
    two-argument arctangent so the sign of cos(yaw) does not shift them by
    pi. At yaw = +pi/2 only p - r is fixed (p = -r is returned); at
    yaw = -pi/2 only p + r is fixed (p = r is returned).
    """
    R = as_rotation(r).m.tolist()
    cos_y = math.hypot(R[1][2], R[2][2])
    if cos_y < GIMBAL_COS_TOL:
        if -R[0][2] > 0:
            diff = math.atan2(R[1][0], R[1][1])
            p = diff / 2
            return _locked(W300LP, p, HALF_PI, -p, f"yaw=+90 deg: p - r = {math.degrees(diff)!r} deg determined; split p = -r")
        total = math.atan2(-R[1][0], R[1][1])
        p = total / 2
        return _locked(W300LP, p, -HALF_PI, p, f"yaw=-90 deg: p + r = {math.degrees(total)!r} deg determined; split p = r")

    y1 = _clamped_asin(-R[0][2])
    y2 = _reflect_middle(y1)
    cy1 = math.cos(y1)
    p1 = math.atan2(R[1][2] / cy1, R[2][2] / cy1)
    r1 = math.atan2(R[0][1] / cy1, R[0][0] / cy1)
    return _pair(W300LP, p1, y1, r1, _flip_outer(p1), y2, _flip_outer(r1))


def extract_wiki_zyx(r) -> ExtractionResult:
    """Pitch, yaw, roll of a right-handed intrinsic ZYX matrix ``Rz(y) Ry(p) Rx(r)``.

    Pivots on R[2,0] = -sin(pitch). At pitch = +pi/2 only r - y is fixed
    (y = -r returned); at pitch = -pi/2 only r + y is fixed (y = r).
    """
    R = as_rotation(r).m.tolist()
    cos_p = math.hypot(R[2][1], R[2][2])
    if cos_p < GIMBAL_COS_TOL:
        if R[2][0] < 0:
            diff = math.atan2(R[0][1], R[0][2])
            roll = diff / 2
            return _locked(WIKI_ZYX, HALF_PI, -roll, roll, f"pitch=+90 deg: r - y = {math.degrees(diff)!r} deg determined; split y = -r")
        total = math.atan2(-R[0][1], -R[0][2])
        roll = total / 2
        return _locked(WIKI_ZYX, -HALF_PI, roll, roll, f"pitch=-90 deg: r + y = {math.degrees(total)!r} deg determined; split y = r")

    p1 = -_clamped_asin(R[2][0])
    p2 = _reflect_middle(p1)
    cp1 = math.cos(p1)
    r1 = math.atan2(R[2][1] / cp1, R[2][2] / cp1)
    y1 = math.atan2(R[1][0] / cp1, R[0][0] / cp1)
    return _pair(WIKI_ZYX, p1, y1, r1, p2, _flip_outer(y1), _flip_outer(r1))


def extract_tddfa_v2(r) -> ExtractionResult:
    """Pitch, yaw, roll of 3DDFA_v2's ``Rz_r(r) Ry_l(y) Rx_r(p)``.

    Row 2 is (sin y, sin p cos y, cos p cos y) and column 0 is
    (cos r cos y, sin r cos y, sin y). At yaw = +pi/2 the top-left block
    carries p + r (p = r returned); at yaw = -pi/2 it carries p - r
    (p = -r returned).
    """
    R = as_rotation(r).m.tolist()
    cos_y = math.hypot(R[2][1], R[2][2])
    if cos_y < GIMBAL_COS_TOL:
        if R[2][0] > 0:
            total = math.atan2(-R[0][1], R[1][1])
            p = total / 2
            return _locked(TDDFA_V2, p, HALF_PI, p, f"yaw=+90 deg: p + r = {math.degrees(total)!r} deg determined; split p = r")
        diff = math.atan2(R[0][1], R[1][1])
        p = diff / 2
        return _locked(TDDFA_V2, p, -HALF_PI, -p, f"yaw=-90 deg: p - r = {math.degrees(diff)!r} deg determined; split p = -r")

    y1 = _clamped_asin(R[2][0])
    y2 = _reflect_middle(y1)
    cy1 = math.cos(y1)
    p1 = math.atan2(R[2][1] / cy1, R[2][2] / cy1)
    r1 = math.atan2(R[1][0] / cy1, R[0][0] / cy1)
    return _pair(TDDFA_V2, p1, y1, r1, _flip_outer(p1), y2, _flip_outer(r1))


def extract_repnet(r) -> EulerAngles:
    """6D-RepNet's single-solution extraction, transcribed from its batch code.

    ``r`` is a matrix in 6D-RepNet's own system (``Rz(r) Ry(y) Rx(p)``,
    right-handed), i.e. the transpose of the 300W-LP matrix for the same
    angles. sy = sqrt(R00^2 + R10^2) = |cos(yaw)| pins yaw to [-pi/2, pi/2],
    so away from the singular branch the result equals the 300W-LP primary.
    Below sy = 1e-6 roll is forced to 0.
    """
    R = as_rotation(r).m.tolist()
    sy = math.sqrt(R[0][0] * R[0][0] + R[1][0] * R[1][0])
    if sy < REPNET_SINGULAR_TOL:
        x = math.atan2(-R[1][2], R[1][1])
        y = math.atan2(-R[2][0], sy)
        z = 0.0
    else:
        x = math.atan2(R[2][1], R[2][2])
        y = math.atan2(-R[2][0], sy)
        z = math.atan2(R[1][0], R[0][0])
    return EulerAngles(_pi_wrap(x), y, _pi_wrap(z), REPNET6D)


def _repnet_full(r) -> ExtractionResult:
    # R6d(p, y, r) == R_W(p, y, r).T, so both solutions carry over unchanged
    return extract_300wlp(as_rotation(r).m.T).retag(REPNET6D)


_EXTRACTORS = {
    WIKI_ZYX.sequence: extract_wiki_zyx,
    W300LP.sequence: extract_300wlp,
    TDDFA_V2.sequence: extract_tddfa_v2,
    REPNET6D.sequence: _repnet_full,
}


def extract(r, convention) -> ExtractionResult:
    """Dispatch on the convention's elemental sequence; results are tagged with ``convention``."""
    conv = get_convention(convention)
    try:
        fn = _EXTRACTORS[conv.sequence]
    except KeyError:
        raise UnsupportedError(
            f"no closed-form extraction for sequence {conv.sequence_text()} ({conv.name})"
        ) from None
    return fn(r).retag(conv)


def whenet_select_euler(result: ExtractionResult) -> Optional[EulerAngles]:
    """WHENet's solution pick: the first triple with |pitch| and |roll| below 90 deg.

    Returns None where WHENet would emit its -999 sentinel. The chosen
    triple is re-tagged as ``WHENET_PANOPTIC``.
    """
    for sol in result.solutions:
        yaw = sol.yaw - 2 * math.pi if sol.yaw > math.pi else sol.yaw
        if abs(sol.pitch) < HALF_PI and abs(sol.roll) < HALF_PI:
            return EulerAngles(sol.pitch, yaw, sol.roll, WHENET_PANOPTIC)
    return None


def representative(result: ExtractionResult, convention=None) -> Optional[EulerAngles]:
    """First solution admissible under ``convention``'s angle ranges (default: the result's own)."""
    conv = get_convention(convention) if convention is not None else result.primary.convention
    for sol in result.solutions:
        tagged = sol.retag(conv)
        if tagged.in_range():
            return tagged
    return None
