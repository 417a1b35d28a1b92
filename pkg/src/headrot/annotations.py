"""Pose-annotation records and their JSON / CSV files.

The rotation matrix is the canonical label. Euler angles travel alongside
as a cache, always interpreted under the record's convention.

JSON documents are a list of objects::

    {"image_id": "img1.jpg", "convention": "W300LP",
     "rotation": [9 numbers, row-major],          # optional if euler_deg given
     "euler_deg": {"pitch": .., "yaw": .., "roll": ..},   # optional
     "bbox": [x, y, w, h]}                         # optional

CSV rows are ``image_id,pitch_deg,yaw_deg,roll_deg,convention`` optionally
followed by ``bbox_x,bbox_y,bbox_w,bbox_h``; a header row is optional.
CSV stores degrees with 12 significant digits, so matrices survive a CSV
round trip only to about 1e-11. Use JSON when exactness matters.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .conventions import EulerAngles, RotationConvention, euler_to_matrix, get_convention
from .errors import FormatError, HeadRotError, UnsupportedError, ValidationError
from .extract import extract, representative
from .so3 import RotationMatrix, as_rotation, frobenius_distance

CACHE_TOL = 1e-9
CSV_COLUMNS = ("image_id", "pitch_deg", "yaw_deg", "roll_deg", "convention")
CSV_BBOX_COLUMNS = ("bbox_x", "bbox_y", "bbox_w", "bbox_h")
FORMATS = ("json", "csv")

BBox = tuple[float, float, float, float]


def consistent_cache(rotation, convention) -> Optional[EulerAngles]:
    """Extracted triple fit to serve as a cache, or None.

    Inside the gimbal band the extracted split only approximates the matrix,
    so it is not cached.
    """
    sol = representative(extract(rotation, convention))
    if sol is None or frobenius_distance(euler_to_matrix(sol), rotation) > CACHE_TOL:
        return None
    return sol


def _check_bbox(bbox) -> Optional[BBox]:
    if bbox is None:
        return None
    vals = tuple(float(v) for v in bbox)
    if len(vals) != 4 or not all(math.isfinite(v) for v in vals):
        raise ValueError(f"bbox must be 4 finite numbers, got {bbox!r}")
    if vals[2] <= 0 or vals[3] <= 0:
        raise ValueError(f"bbox width and height must be positive, got {vals!r}")
    return vals


@dataclass(frozen=True)
class PoseAnnotation:
    image_id: str
    rotation: RotationMatrix
    source_convention: str
    bbox: Optional[BBox] = None
    euler_cache: Optional[EulerAngles] = None

    def __post_init__(self):
        conv = get_convention(self.source_convention)
        object.__setattr__(self, "source_convention", conv.name)
        object.__setattr__(self, "rotation", as_rotation(self.rotation))
        object.__setattr__(self, "bbox", _check_bbox(self.bbox))
        cache = self.euler_cache
        if cache is not None:
            err = frobenius_distance(euler_to_matrix(cache), self.rotation)
            if err > CACHE_TOL:
                raise ValueError(f"euler cache does not reproduce the rotation (error {err:.3e})")

    @classmethod
    def from_euler(cls, image_id: str, angles: EulerAngles, bbox=None) -> PoseAnnotation:
        return cls(image_id, euler_to_matrix(angles), angles.convention.name, bbox, angles)

    @property
    def convention(self) -> RotationConvention:
        return get_convention(self.source_convention)

    def euler(self) -> EulerAngles:
        """Cached triple, else the first in-range extracted solution."""
        if self.euler_cache is not None:
            return self.euler_cache
        sol = representative(extract(self.rotation, self.convention))
        if sol is None:
            raise UnsupportedError(f"{self.image_id}: no solution within {self.source_convention}'s ranges")
        return sol

    def with_rotation(self, rotation, bbox=...) -> PoseAnnotation:
        """Copy with a new matrix; the Euler cache is dropped."""
        return replace(self, rotation=as_rotation(rotation), euler_cache=None,
                       bbox=self.bbox if bbox is ... else bbox)

    def to_json_record(self) -> dict:
        """Euler degrees are written only when they reproduce the matrix."""
        cache = self.euler_cache or consistent_cache(self.rotation, self.convention)
        euler = None
        if cache is not None:
            p, y, r = cache.degrees()
            euler = {"pitch": p, "yaw": y, "roll": r}
        return {
            "image_id": self.image_id,
            "convention": self.source_convention,
            "rotation": self.rotation.flat(),
            "euler_deg": euler,
            "bbox": None if self.bbox is None else list(self.bbox),
        }


def _record_from_json(obj, index: int) -> PoseAnnotation:
    if not isinstance(obj, dict):
        raise FormatError(f"record {index}: expected an object", index)
    try:
        image_id = str(obj["image_id"])
        conv = get_convention(obj.get("convention", "W300LP"))
    except KeyError:
        raise FormatError(f"record {index}: missing image_id", index) from None
    except UnsupportedError as e:
        raise ValidationError(f"record {index}: {e}", index) from None
    try:
        cache = None
        if obj.get("euler_deg") is not None:
            e = obj["euler_deg"]
            cache = EulerAngles.from_degrees(float(e["pitch"]), float(e["yaw"]), float(e["roll"]), conv)
        if obj.get("rotation") is not None:
            flat = [float(v) for v in obj["rotation"]]
            if len(flat) != 9:
                raise ValueError(f"rotation needs 9 numbers, got {len(flat)}")
            rotation = RotationMatrix(np.reshape(flat, (3, 3)))
        elif cache is not None:
            rotation = euler_to_matrix(cache)
        else:
            raise ValueError("record has neither rotation nor euler_deg")
        return PoseAnnotation(image_id, rotation, conv.name, obj.get("bbox"), cache)
    except (KeyError, TypeError) as e:
        raise FormatError(f"record {index}: malformed field {e}", index) from None
    except (ValueError, HeadRotError) as e:
        raise ValidationError(f"record {index} ({image_id}): {e}", index) from None


def _is_header(row: list[str]) -> bool:
    try:
        float(row[1])
    except (IndexError, ValueError):
        return True
    return False


def _record_from_csv(row: list[str], index: int) -> PoseAnnotation:
    if len(row) not in (5, 9):
        raise FormatError(f"line {index}: expected 5 or 9 columns, got {len(row)}", index)
    try:
        p, y, r = (float(v) for v in row[1:4])
        cells = [c.strip() for c in row[5:9]]
        bbox = [float(v) for v in cells] if any(cells) else None
    except ValueError as e:
        raise FormatError(f"line {index}: {e}", index) from None
    try:
        angles = EulerAngles.from_degrees(p, y, r, row[4].strip())
        return PoseAnnotation.from_euler(row[0], angles, bbox)
    except (ValueError, HeadRotError) as e:
        raise ValidationError(f"line {index} ({row[0]}): {e}", index) from None


def parse_annotations(text: str, format: str) -> list[PoseAnnotation]:
    if format == "json":
        if not text.strip():
            return []
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON at line {e.lineno}: {e.msg}", e.lineno) from None
        if isinstance(doc, dict) and "annotations" in doc:
            doc = doc["annotations"]
        if not isinstance(doc, list):
            raise FormatError("JSON document must be a list of records")
        return [_record_from_json(obj, i) for i, obj in enumerate(doc)]
    if format == "csv":
        rows = [(i, row) for i, row in enumerate(csv.reader(io.StringIO(text))) if row and any(c.strip() for c in row)]
        if rows and _is_header(rows[0][1]):
            rows = rows[1:]
        return [_record_from_csv(row, i) for i, row in rows]
    raise UnsupportedError(f"unknown annotation format {format!r}; use one of {FORMATS}")


def format_annotations(records: Iterable[PoseAnnotation], format: str) -> str:
    records = list(records)
    if format == "json":
        return json.dumps([rec.to_json_record() for rec in records], indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        with_bbox = any(rec.bbox is not None for rec in records)
        writer.writerow(CSV_COLUMNS + (CSV_BBOX_COLUMNS if with_bbox else ()))
        for rec in records:
            row = [rec.image_id, *(f"{d:.12g}" for d in rec.euler().degrees()), rec.source_convention]
            if with_bbox:
                row += [f"{v:.12g}" for v in rec.bbox] if rec.bbox is not None else [""] * 4
            writer.writerow(row)
        return buf.getvalue()
    raise UnsupportedError(f"unknown annotation format {format!r}; use one of {FORMATS}")


def infer_format(path) -> str:
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix in FORMATS:
        return suffix
    raise UnsupportedError(f"cannot infer format from {str(path)!r}; pass it explicitly")


def load_annotations(path, format: Optional[str] = None) -> list[PoseAnnotation]:
    fmt = format or infer_format(path)
    return parse_annotations(Path(path).read_text(encoding="utf-8"), fmt)


def save_annotations(records: Iterable[PoseAnnotation], path, format: Optional[str] = None) -> None:
    fmt = format or infer_format(path)
    Path(path).write_text(format_annotations(records, fmt), encoding="utf-8", newline="\n")
