"""Absolute orientation between matched 3D point sets, and the compound-pose
formulas used to label CMU Panoptic style data.

:func:`horn_align` solves ``min sum |s R m_i + t - o_i|^2`` in closed form
with the unit-quaternion method: the optimal quaternion is the top
eigenvector of a 4x4 symmetric matrix built from the cross-covariance of
the centered sets. Scale is then ``sum o'.(R m') / sum |m'|^2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .conventions import EulerAngles, W300LP, euler_to_matrix
from .errors import DegenerateGeometryError, FormatError, InvalidInputError
from .so3 import RotationMatrix, as_rotation, quaternion_to_matrix

E_REF = np.diag([1.0, -1.0, -1.0])
RANK_TOL = 1e-9

_REFERENCE_POINTS = np.array([
    [-7.308957, 0.913869, 0.000000], [-6.775290, -0.730814, -0.012799],
    [-5.665918, -3.286078, 1.022951], [-5.011779, -4.876396, 1.047961],
    [-4.056931, -5.947019, 1.636229], [-1.833492, -7.056977, 4.061275],
    [0.000000, -7.415691, 4.070434], [1.833492, -7.056977, 4.061275],
    [4.056931, -5.947019, 1.636229], [5.011779, -4.876396, 1.047961],
    [5.665918, -3.286078, 1.022951],
    [6.775290, -0.730814, -0.012799], [7.308957, 0.913869, 0.000000],
    [5.311432, 5.485328, 3.987654], [4.461908, 6.189018, 5.594410],
    [3.550622, 6.185143, 5.712299], [2.542231, 5.862829, 4.687939],
    [1.789930, 5.393625, 4.413414], [2.693583, 5.018237, 5.072837],
    [3.530191, 4.981603, 4.937805], [4.490323, 5.186498, 4.694397],
    [-5.311432, 5.485328, 3.987654], [-4.461908, 6.189018, 5.594410],
    [-3.550622, 6.185143, 5.712299], [-2.542231, 5.862829, 4.687939],
    [-1.789930, 5.393625, 4.413414], [-2.693583, 5.018237, 5.072837],
    [-3.530191, 4.981603, 4.937805], [-4.490323, 5.186498, 4.694397],
    [1.330353, 7.122144, 6.903745], [2.533424, 7.878085, 7.451034],
    [4.861131, 7.878672, 6.601275], [6.137002, 7.271266, 5.200823],
    [6.825897, 6.760612, 4.402142], [-1.330353, 7.122144, 6.903745],
    [-2.533424, 7.878085, 7.451034], [-4.861131, 7.878672, 6.601275],
    [-6.137002, 7.271266, 5.200823], [-6.825897, 6.760612, 4.402142],
    [-2.774015, -2.080775, 5.048531], [-0.509714, -1.571179, 6.566167],
    [0.000000, -1.646444, 6.704956], [0.509714, -1.571179, 6.566167],
    [2.774015, -2.080775, 5.048531], [0.589441, -2.958597, 6.109526],
    [0.000000, -3.116408, 6.097667], [-0.589441, -2.958597, 6.109526],
    [-0.981972, 4.554081, 6.301271], [-0.973987, 1.916389, 7.654050],
    [-2.005628, 1.409845, 6.165652], [-1.930245, 0.424351, 5.914376],
    [-0.746313, 0.348381, 6.263227], [0.000000, 0.000000, 6.763430],
    [0.746313, 0.348381, 6.263227], [1.930245, 0.424351, 5.914376],
    [2.005628, 1.409845, 6.165652], [0.973987, 1.916389, 7.654050],
    [0.981972, 4.554081, 6.301271],
])
_REFERENCE_POINTS.flags.writeable = False


@dataclass(frozen=True)
class KeypointSet:
    """``points`` is an ``(n, 3)`` array, one row per keypoint."""

    points: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidInputError(f"keypoints must have shape (n, 3), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("keypoints must be finite")
        if self.labels is not None and len(self.labels) != len(pts):
            raise InvalidInputError("labels and points differ in length")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def subset(self, idx) -> KeypointSet:
        idx = list(idx)
        labels = None if self.labels is None else tuple(self.labels[i] for i in idx)
        return KeypointSet(self.points[idx], labels)

    def transformed(self, r, scale: float = 1.0, translation=(0.0, 0.0, 0.0)) -> KeypointSet:
        m = as_rotation(r).m if not isinstance(r, np.ndarray) else r
        return KeypointSet(scale * self.points @ m.T + np.asarray(translation, dtype=np.float64), self.labels)

    @classmethod
    def from_json(cls, text: str) -> KeypointSet:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid keypoint JSON: {e.msg}", e.lineno) from None
        labels = None
        if isinstance(obj, dict):
            labels = obj.get("labels")
            obj = obj.get("points")
        try:
            return cls(np.asarray(obj, dtype=np.float64), None if labels is None else tuple(labels))
        except (TypeError, ValueError) as e:
            raise FormatError(f"keypoints must be a list of [x, y, z]: {e}") from None

    def to_json(self) -> str:
        return json.dumps(self.points.tolist())


@dataclass(frozen=True)
class Alignment:
    rotation: RotationMatrix
    scale: float
    translation: np.ndarray
    residual: float

    def apply(self, points: KeypointSet) -> KeypointSet:
        return points.transformed(self.rotation, self.scale, self.translation)

    def to_dict(self) -> dict:
        return {
            "rotation": self.rotation.tolist(),
            "scale": self.scale,
            "translation": [float(v) for v in self.translation],
            "residual": self.residual,
        }


@dataclass(frozen=True)
class CameraExtrinsic:
    r: RotationMatrix
    t: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "r", as_rotation(self.r))
        t = tuple(float(v) for v in self.t)
        if len(t) != 3 or not all(math.isfinite(v) for v in t):
            raise InvalidInputError("camera translation must be 3 finite numbers")
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls) -> CameraExtrinsic:
        return cls(RotationMatrix.identity())

    @classmethod
    def from_json(cls, text: str) -> CameraExtrinsic:
        try:
            obj = json.loads(text)
            r = np.reshape([float(v) for v in np.ravel(obj["R"])], (3, 3))
            t = [float(v) for v in np.ravel(obj.get("t", [0, 0, 0]))]
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid camera JSON: {e.msg}", e.lineno) from None
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"camera JSON needs R (9 numbers) and t (3 numbers): {e}") from None
        return cls(RotationMatrix(r), tuple(t))


def reference_head(scale: float = 0.01, pyr=(10.0, 0.0, 0.0)) -> KeypointSet:
    """WHENet's 58-point standard-pose face model.

    ``pyr`` is (pitch, yaw, roll) in degrees, applied as a 300W-LP rotation
    to the already scaled points. ``reference_head(1.0, (0, 0, 0))`` returns
    the raw listed coordinates.
    """
    pts = _REFERENCE_POINTS * float(scale)
    if any(pyr):
        r = euler_to_matrix(EulerAngles.from_degrees(*pyr, W300LP))
        pts = pts @ r.m.T
    return KeypointSet(pts)


def _centered(a: np.ndarray):
    c = a.mean(axis=0)
    return a - c, c


def horn_align(model: KeypointSet, observed: KeypointSet) -> Alignment:
    """Least-squares similarity taking ``model`` onto ``observed``."""
    m, o = model.points, observed.points
    if len(m) != len(o):
        raise InvalidInputError(f"point counts differ: {len(m)} vs {len(o)}")
    if len(m) < 3:
        raise InvalidInputError(f"need at least 3 points, got {len(m)}")
    mc, m_mean = _centered(m)
    oc, o_mean = _centered(o)
    scale_ref = max(np.abs(mc).max(), np.abs(oc).max(), 1e-300)
    for pts, what in ((mc, "model"), (oc, "observed")):
        sv = np.linalg.svd(pts, compute_uv=False)
        if sv[1] <= RANK_TOL * scale_ref * math.sqrt(len(pts)):
            raise DegenerateGeometryError(f"{what} keypoints are collinear or coincident")

    s = mc.T @ oc  # S_ab = sum m_a o_b
    (sxx, sxy, sxz), (syx, syy, syz), (szx, szy, szz) = s
    n = np.array([
        [sxx + syy + szz, syz - szy, szx - sxz, sxy - syx],
        [syz - szy, sxx - syy - szz, sxy + syx, szx + sxz],
        [szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy],
        [sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz],
    ])
    _, vecs = np.linalg.eigh(n)
    q = vecs[:, -1]
    rot = quaternion_to_matrix(q / np.linalg.norm(q))
    # re-orthonormalise away the last ulp of eigensolver error
    u, _, vt = np.linalg.svd(rot)
    rot = u @ vt

    rm = mc @ rot.T
    scale = float(np.sum(oc * rm) / np.sum(mc * mc))
    if not scale > 0:
        raise DegenerateGeometryError("alignment produced a non-positive scale")
    t = o_mean - scale * (rot @ m_mean)
    resid = o - (scale * m @ rot.T + t)
    rms = float(math.sqrt(np.mean(np.sum(resid * resid, axis=1))))
    return Alignment(RotationMatrix(rot), scale, t, rms)


def filter_by_confidence(model: KeypointSet, observed: KeypointSet, confidence: Sequence[float],
                         threshold: float = 0.1, min_points: int = 6):
    """Keep pairs whose confidence exceeds ``threshold``.

    Returns ``None`` unless more than ``min_points`` pairs survive, the
    way the Panoptic labelling script skips faces.
    """
    conf = np.asarray(confidence, dtype=np.float64)
    if len(conf) != len(model) or len(model) != len(observed):
        raise InvalidInputError("model, observed and confidence lengths differ")
    keep = np.flatnonzero(conf > threshold)
    if len(keep) <= min_points:
        return None
    return model.subset(keep), observed.subset(keep)


def whenet_compound_pose(horn_r, cam: CameraExtrinsic) -> RotationMatrix:
    """WHENet's original label: ``E_ref (C R_horn) E_ref^-1``."""
    cr = cam.r.m @ as_rotation(horn_r).m
    return RotationMatrix(E_REF @ cr @ E_REF.T)


def panoptic_pose(horn_r, cam: CameraExtrinsic) -> RotationMatrix:
    """Corrected label ``E_ref C R_horn``, already in 300W-LP's system."""
    return RotationMatrix(E_REF @ cam.r.m @ as_rotation(horn_r).m)


def synthetic_openpose_observation(pose, model: Optional[KeypointSet] = None,
                                   scale: float = 1.0, translation=(0.0, 0.0, 0.0)) -> KeypointSet:
    """Keypoints of ``model`` posed by a 300W-LP rotation, seen in OpenPose's frame.

    OpenPose's standard head is the reference head turned by pi about X,
    i.e. ``E_ref^-1`` applied after the pose.
    """
    model = reference_head() if model is None else model
    return model.transformed(E_REF.T @ as_rotation(pose).m, scale, translation)
