"""Three-line and pose-cube drawing geometry.

Image coordinates are raster ones: x to the right, y down, origin top-left.
Camera intrinsics are ignored; the lines are orthographic projections of
the rotated body axes. Colors follow the usual head-pose convention: nose
axis blue, downward (neck) axis green, left-face axis red.

Everything here depends on the rotation matrix only. Euler triples are
accepted solely by the two literal transcriptions of the community drawing
routines, which exist as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import quoteattr

import numpy as np

from .conventions import W300LP, WHENET_PANOPTIC, WIKI_ZYX, get_convention
from .errors import InvalidInputError, UnsupportedError
from .so3 import RotationMatrix, as_rotation

T_S = np.diag([1.0, 1.0, -1.0])
T_W = np.diag([1.0, -1.0, 1.0])

RED, GREEN, BLUE = "#FF0000", "#00FF00", "#0000FF"
STROKE_WIDTH = 4

Point = tuple[float, float]


def _point(p) -> Point:
    x, y = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InvalidInputError(f"point must be finite, got {p!r}")
    return (x, y)


@dataclass(frozen=True)
class LineProjection:
    """Origin and the three line ends: x = red, y = green, z = blue."""

    origin: Point
    x_axis_end: Point
    y_axis_end: Point
    z_axis_end: Point
    size: float

    def __post_init__(self):
        if not (math.isfinite(self.size) and self.size > 0):
            raise InvalidInputError(f"size must be positive, got {self.size!r}")
        for name in ("origin", "x_axis_end", "y_axis_end", "z_axis_end"):
            object.__setattr__(self, name, _point(getattr(self, name)))
        limit = self.size * (1 + 1e-9)
        for end in (self.x_axis_end, self.y_axis_end, self.z_axis_end):
            if math.dist(end, self.origin) > limit:
                raise InvalidInputError("line end lies farther than size from the origin")

    def lines(self) -> list[tuple[Point, Point, str]]:
        return [
            (self.origin, self.x_axis_end, RED),
            (self.origin, self.y_axis_end, GREEN),
            (self.origin, self.z_axis_end, BLUE),
        ]

    def to_dict(self) -> dict:
        return {
            "origin": list(self.origin),
            "x": list(self.x_axis_end),
            "y": list(self.y_axis_end),
            "z": list(self.z_axis_end),
        }

    def max_deviation(self, other: LineProjection) -> float:
        pairs = zip(
            (self.origin, self.x_axis_end, self.y_axis_end, self.z_axis_end),
            (other.origin, other.x_axis_end, other.y_axis_end, other.z_axis_end),
        )
        return max(math.dist(a, b) for a, b in pairs)


CUBE_CORNERS = ("o", "x", "y", "z", "xy", "xz", "yz", "xyz")

# (from, to, color); base red, pillars blue, top green
CUBE_EDGES = (
    ("o", "x", RED), ("o", "y", RED), ("y", "xy", RED), ("x", "xy", RED),
    ("o", "z", BLUE), ("x", "xz", BLUE), ("y", "yz", BLUE), ("xy", "xyz", BLUE),
    ("xz", "xyz", GREEN), ("yz", "xyz", GREEN), ("z", "xz", GREEN), ("z", "yz", GREEN),
)


@dataclass(frozen=True)
class CubeProjection:
    """Eight projected cube corners keyed by the axis offsets summed into them."""

    corners: dict

    def __post_init__(self):
        if set(self.corners) != set(CUBE_CORNERS):
            raise InvalidInputError(f"cube needs corners {CUBE_CORNERS}")
        object.__setattr__(self, "corners", {k: _point(self.corners[k]) for k in CUBE_CORNERS})

    def lines(self) -> list[tuple[Point, Point, str]]:
        return [(self.corners[a], self.corners[b], color) for a, b, color in CUBE_EDGES]

    def to_dict(self) -> dict:
        return {k: list(v) for k, v in self.corners.items()}


def draw_transform_wiki(r) -> RotationMatrix:
    """Conjugate a Wikipedia/SciPy-frame rotation into the Z-down drawing frame."""
    return RotationMatrix(T_S @ as_rotation(r).m @ T_S)


def draw_transform_300wlp(r) -> RotationMatrix:
    """Conjugate a 300W-LP-frame rotation into the image's Y-down frame."""
    return RotationMatrix(T_W @ as_rotation(r).m @ T_W)


def projected_axes(r, convention) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit-size 2D offsets of the red, green and blue lines."""
    conv = get_convention(convention)
    if conv.name in (W300LP.name, WHENET_PANOPTIC.name):
        d = draw_transform_300wlp(r).m
        rows, cols = (0, 1), (0, 1, 2)
    elif conv.name == WIKI_ZYX.name:
        d = draw_transform_wiki(r).m
        # Y is the left-face axis, -Z (column 2 after T_S) points down, X is the nose
        rows, cols = (1, 2), (1, 2, 0)
    else:
        raise UnsupportedError(f"no drawing routine for {conv.name}")
    proj = d[list(rows), :]
    return tuple(proj[:, c] for c in cols)


def _check_size(size) -> float:
    size = float(size)
    if not (math.isfinite(size) and size > 0):
        raise InvalidInputError(f"size must be positive, got {size!r}")
    return size


def three_line_endpoints(r, convention, origin, size) -> LineProjection:
    size = _check_size(size)
    o = np.array(_point(origin))
    red, green, blue = projected_axes(r, convention)
    return LineProjection(tuple(o), tuple(o + size * red), tuple(o + size * green), tuple(o + size * blue), size)


def draw_axis_reference(pitch, yaw, roll, origin, size=100.0) -> LineProjection:
    """The widely copied ``draw_axis`` arithmetic, angles in degrees. Test oracle."""
    from math import cos, sin

    pitch = pitch * math.pi / 180
    yaw = -(yaw * math.pi / 180)
    roll = roll * math.pi / 180
    tdx, tdy = _point(origin)

    x1 = size * (cos(yaw) * cos(roll)) + tdx
    y1 = size * (cos(pitch) * sin(roll) + cos(roll) * sin(pitch) * sin(yaw)) + tdy
    x2 = size * (-cos(yaw) * sin(roll)) + tdx
    y2 = size * (cos(pitch) * cos(roll) - sin(pitch) * sin(yaw) * sin(roll)) + tdy
    x3 = size * (sin(yaw)) + tdx
    y3 = size * (-cos(yaw) * sin(pitch)) + tdy
    return LineProjection((tdx, tdy), (x1, y1), (x2, y2), (x3, y3), size)


def pose_cube_endpoints(pitch, yaw, roll, origin, size=150.0) -> CubeProjection:
    """Corner arithmetic of the community ``plot_pose_cube`` routine, degrees in.

    The cube's near corner sits half a size up and left of ``origin``.
    """
    from math import cos, sin

    p = pitch * math.pi / 180
    y = -(yaw * math.pi / 180)
    r = roll * math.pi / 180
    tdx, tdy = _point(origin)
    face_x = tdx - 0.50 * size
    face_y = tdy - 0.50 * size

    x1 = size * (cos(y) * cos(r)) + face_x
    y1 = size * (cos(p) * sin(r) + cos(r) * sin(p) * sin(y)) + face_y
    x2 = size * (-cos(y) * sin(r)) + face_x
    y2 = size * (cos(p) * cos(r) - sin(p) * sin(y) * sin(r)) + face_y
    x3 = size * (sin(y)) + face_x
    y3 = size * (-cos(y) * sin(p)) + face_y

    return CubeProjection({
        "o": (face_x, face_y),
        "x": (x1, y1),
        "y": (x2, y2),
        "z": (x3, y3),
        "xy": (x1 + x2 - face_x, y1 + y2 - face_y),
        "xz": (x1 + x3 - face_x, y1 + y3 - face_y),
        "yz": (x2 + x3 - face_x, y2 + y3 - face_y),
        "xyz": (x1 + x2 + x3 - 2 * face_x, y1 + y2 + y3 - 2 * face_y),
    })


def cube_from_matrix(r, convention, origin, size=150.0) -> CubeProjection:
    """Pose cube built from the matrix's projected axes instead of Euler angles."""
    size = _check_size(size)
    base = np.array(_point(origin)) - 0.5 * size
    a = dict(zip("xyz", (size * v for v in projected_axes(r, convention))))
    corners = {"o": tuple(base)}
    for name in CUBE_CORNERS[1:]:
        corners[name] = tuple(base + sum(a[c] for c in name))
    return CubeProjection(corners)


def emit_svg(projection, image_size) -> str:
    """Standalone SVG 1.1 document with one ``line`` element per segment."""
    width, height = (int(v) for v in image_size)
    if width <= 0 or height <= 0:
        raise InvalidInputError(f"image size must be positive, got {image_size!r}")
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    for (x1, y1), (x2, y2), color in projection.lines():
        out.append(
            f'  <line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f"stroke={quoteattr(color)} stroke-width=\"{STROKE_WIDTH}\" stroke-linecap=\"round\"/>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
