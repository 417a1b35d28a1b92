"""Rotation labels under 2D image rotations and flips.

All formulas are stated in 300W-LP's frame (x right, y up, z toward the
viewer). Labels in other conventions are converted there and back.

* Rotating the image counter-clockwise by ``phi`` left-multiplies the label
  by the z-rotation ``[[c, -s, 0], [s, c, 0], [0, 0, 1]]``.
* Flipping the image about the line L_theta through the center at angle
  ``theta`` from the horizontal gives
  ``[[cos 2t, sin 2t, 0], [sin 2t, -cos 2t, 0], [0, 0, 1]] @ R @ diag(-1, 1, 1)``.
  The right factor re-labels the mirrored left-face axis. ``theta`` must lie
  in [0, pi/2]; other lines are reached through :func:`flip_pose_any`.

Image-space geometry (boxes, points) uses raster coordinates, y down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .annotations import PoseAnnotation, consistent_cache
from .conventions import W300LP
from .convert import basis_change, convert_rotation
from .errors import AngleRangeError, DegenerateGeometryError, InvalidInputError
from .so3 import RotationMatrix, as_rotation

_MIRROR_X = np.diag([-1.0, 1.0, 1.0])
_BOTH_AXES = np.diag([-1.0, -1.0, 1.0])


def _finite(angle, what="angle") -> float:
    angle = float(angle)
    if not math.isfinite(angle):
        raise InvalidInputError(f"{what} must be finite, got {angle!r}")
    return angle


def _check_flip_angle(theta) -> float:
    theta = _finite(theta, "flip angle")
    if not 0.0 <= theta <= math.pi / 2:
        raise AngleRangeError(f"flip angle {math.degrees(theta):.9g} deg outside [0, 90]")
    return theta


def rotation_matrix_2d_ccw(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def flip_matrix(theta: float) -> np.ndarray:
    """Left factor of the flip product (det -1)."""
    c, s = math.cos(2 * theta), math.sin(2 * theta)
    return np.array([[c, s, 0.0], [s, -c, 0.0], [0.0, 0.0, 1.0]])


def rotate_pose(r, phi: float) -> RotationMatrix:
    """Label after rotating the image counter-clockwise by ``phi`` radians."""
    return RotationMatrix(rotation_matrix_2d_ccw(_finite(phi)) @ as_rotation(r).m)


def flip_pose(r, theta: float) -> RotationMatrix:
    """Label after flipping the image about L_theta, ``theta`` in [0, pi/2]."""
    theta = _check_flip_angle(theta)
    return RotationMatrix(flip_matrix(theta) @ as_rotation(r).m @ _MIRROR_X)


def flip_pose_any(r, theta: float) -> RotationMatrix:
    """Flip about L_theta for any real ``theta``.

    L_theta only depends on theta mod pi. Angles outside [0, pi/2] are
    reduced through ``flip(theta) = rotate(flip(pi/2), 2 theta - pi)``.
    """
    theta = math.fmod(_finite(theta), math.pi)
    if theta < 0:
        theta += math.pi
    if theta <= math.pi / 2:
        return flip_pose(r, theta)
    return rotate_pose(flip_pose(r, math.pi / 2), 2 * theta - math.pi)


# Named special cases


def horizontal_flip(r) -> RotationMatrix:
    """Mirror left-right (about the vertical line)."""
    return flip_pose(r, math.pi / 2)


def vertical_flip(r) -> RotationMatrix:
    """Mirror top-bottom (about the horizontal line)."""
    return flip_pose(r, 0.0)


def both_axes_flip(r) -> RotationMatrix:
    """Both mirrors at once; the same as a half-turn."""
    return RotationMatrix(_BOTH_AXES @ as_rotation(r).m)


def diagonal_flip(r) -> RotationMatrix:
    return flip_pose(r, math.pi / 4)


def rotate_45_ccw(r) -> RotationMatrix:
    """Counter-clockwise image rotation by 45 degrees."""
    return rotate_pose(r, math.pi / 4)


def standard_ops() -> dict:
    return {
        "horizontal_flip": horizontal_flip,
        "vertical_flip": vertical_flip,
        "both_axes_flip": both_axes_flip,
        "diagonal_flip": diagonal_flip,
        "rotate_45_ccw": rotate_45_ccw,
    }


# Operation objects used by pipelines and the CLI


@dataclass(frozen=True)
class Rotate:
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", _finite(self.phi))

    def apply_rotation(self, r) -> RotationMatrix:
        return rotate_pose(r, self.phi)

    def point_map(self) -> np.ndarray:
        # ccw on screen, y down
        c, s = math.cos(self.phi), math.sin(self.phi)
        return np.array([[c, s], [-s, c]])


@dataclass(frozen=True)
class FlipAboutLine:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_flip_angle(self.theta))

    def apply_rotation(self, r) -> RotationMatrix:
        return flip_pose(r, self.theta)

    def point_map(self) -> np.ndarray:
        c, s = math.cos(2 * self.theta), math.sin(2 * self.theta)
        return np.array([[c, -s], [-s, -c]])


@dataclass(frozen=True)
class BothAxesFlip:
    def apply_rotation(self, r) -> RotationMatrix:
        return both_axes_flip(r)

    def point_map(self) -> np.ndarray:
        return -np.eye(2)


@dataclass(frozen=True)
class PixelOnly:
    """Photometric changes (blur, color jitter, ...): labels pass through."""

    name: str = "pixel"

    def apply_rotation(self, r) -> RotationMatrix:
        return as_rotation(r)

    def point_map(self) -> np.ndarray:
        return np.eye(2)


AugmentOp = Rotate | FlipAboutLine | BothAxesFlip | PixelOnly


def _check_image_size(image_size) -> tuple[float, float]:
    w, h = (float(v) for v in image_size)
    if not (w > 0 and h > 0 and math.isfinite(w) and math.isfinite(h)):
        raise InvalidInputError(f"image size must be positive, got {image_size!r}")
    return w, h


def transform_points(points, op: AugmentOp, image_size) -> np.ndarray:
    """Map pixel coordinates through ``op`` about the image center."""
    w, h = _check_image_size(image_size)
    center = np.array([w / 2, h / 2])
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return (pts - center) @ op.point_map().T + center


def transform_bbox(bbox, op: AugmentOp, image_size):
    """Axis-aligned hull of the mapped corners, clipped to the image."""
    if isinstance(op, PixelOnly):
        return tuple(bbox)
    w, h = _check_image_size(image_size)
    x, y, bw, bh = (float(v) for v in bbox)
    corners = np.array([[x, y], [x + bw, y], [x, y + bh], [x + bw, y + bh]])
    mapped = transform_points(corners, op, image_size)
    x0, y0 = np.clip(mapped.min(axis=0), 0, [w, h])
    x1, y1 = np.clip(mapped.max(axis=0), 0, [w, h])
    # tiny negative widths from rounding are still degenerate
    if x1 - x0 <= 1e-9 or y1 - y0 <= 1e-9:
        raise DegenerateGeometryError(f"bbox {bbox!r} leaves the image under {op!r}")
    return (float(x0), float(y0), float(x1 - x0), float(y1 - y0))


def augment_rotation(r, op: AugmentOp, convention=W300LP) -> RotationMatrix:
    """Apply ``op`` to a label expressed in ``convention``."""
    if isinstance(op, PixelOnly):
        return as_rotation(r)
    to_w = basis_change(convention, W300LP)
    out = op.apply_rotation(convert_rotation(r, to_w))
    return convert_rotation(out, to_w.reversed())


def augment_annotation(ann: PoseAnnotation, op: AugmentOp, image_size) -> PoseAnnotation:
    if isinstance(op, PixelOnly):
        return ann
    rotation = augment_rotation(ann.rotation, op, ann.source_convention)
    bbox = None if ann.bbox is None else transform_bbox(ann.bbox, op, image_size)
    cache = consistent_cache(rotation, ann.source_convention)
    return PoseAnnotation(ann.image_id, rotation, ann.source_convention, bbox, cache)
