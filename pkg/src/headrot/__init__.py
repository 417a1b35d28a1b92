"""Rotation-system algebra for head-pose labels.

Conventions, Euler extraction with both solutions and gimbal handling,
frame conversion, three-line / pose-cube drawing, label updates under image
rotations and flips, convention inference, and Horn alignment.
"""

__version__ = "0.1.0"

from .conventions import (
    BUILTINS,
    REPNET6D,
    TDDFA_V2,
    W300LP,
    WHENET_PANOPTIC,
    WIKI_ZYX,
    EulerAngles,
    RotationConvention,
    euler_to_matrix,
    get_convention,
)
from .errors import (
    AngleRangeError,
    DegenerateGeometryError,
    FormatError,
    HeadRotError,
    InvalidInputError,
    UnsupportedError,
    ValidationError,
)
from .extract import ExtractionResult, extract, extract_300wlp, extract_repnet, extract_wiki_zyx
from .so3 import RotationMatrix

__all__ = [
    "BUILTINS",
    "REPNET6D",
    "TDDFA_V2",
    "W300LP",
    "WHENET_PANOPTIC",
    "WIKI_ZYX",
    "AngleRangeError",
    "DegenerateGeometryError",
    "EulerAngles",
    "ExtractionResult",
    "FormatError",
    "HeadRotError",
    "InvalidInputError",
    "RotationConvention",
    "RotationMatrix",
    "UnsupportedError",
    "ValidationError",
    "euler_to_matrix",
    "extract",
    "extract_300wlp",
    "extract_repnet",
    "extract_wiki_zyx",
    "get_convention",
]
