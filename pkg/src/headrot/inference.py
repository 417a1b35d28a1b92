"""Recover a rotation system from what its matrices look like.

Every candidate system is a product of three elemental rotations: an axis
order, an assignment of pitch/yaw/roll to those axes, and a handedness per
axis, for 3! * 3! * 2**3 = 288 candidates. A candidate matches a pattern if,
at many generic random angle triples, its matrix agrees with every
constrained pattern cell. Generic samples stand in for symbolic algebra:
two distinct trigonometric products agreeing at 16 random points is a
measure-zero accident.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .conventions import ROLES, AngleRole, ElementalSpec, builtin_conventions
from .errors import FormatError, InvalidInputError
from .so3 import Axis, Handedness, RotationMatrix, as_rotation

PATTERN_TOL = 1e-9
SAMPLE_TOL = 1e-6
GENERIC_MARGIN = 0.1
MIN_SAMPLES = 16

_ROLE_ALIASES = {
    "p": AngleRole.PITCH, "pitch": AngleRole.PITCH,
    "y": AngleRole.YAW, "yaw": AngleRole.YAW,
    "r": AngleRole.ROLL, "roll": AngleRole.ROLL,
}


# Pattern cells


@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Free:
    def __str__(self):
        return "free"


@dataclass(frozen=True)
class Expr:
    """``sign * prod(f(role))`` with f in {cos, sin}; no factors means the constant ``sign``."""

    sign: int = 1
    factors: tuple = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidInputError(f"sign must be +1 or -1, got {self.sign!r}")
        for fn, role in self.factors:
            if fn not in ("cos", "sin") or not isinstance(role, AngleRole):
                raise InvalidInputError(f"bad factor {(fn, role)!r}")

    def evaluate(self, angles: dict) -> np.ndarray:
        """Vectorised over arrays of angles keyed by role."""
        out = float(self.sign)
        for fn, role in self.factors:
            out = out * (np.cos if fn == "cos" else np.sin)(angles[role])
        return out

    def __str__(self):
        if not self.factors:
            return "1" if self.sign > 0 else "-1"
        body = "*".join(f"{fn}({role.value[0]})" for fn, role in self.factors)
        return body if self.sign > 0 else "-" + body


ONE = Expr(1, ())
Cell = Union[Zero, Free, Expr]

_FACTOR = re.compile(r"^(cos|sin)\(\s*([a-z]+)\s*\)$")


def parse_cell(text) -> Cell:
    """Parse ``"0"``, ``"1"``, ``"free"`` / ``"-"`` or a signed product like ``"-cos(y)*sin(p)"``."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        text = str(int(text)) if float(text).is_integer() else str(text)
    if not isinstance(text, str):
        raise FormatError(f"pattern cell must be a string, got {text!r}")
    s = text.strip().replace(" ", "").replace("−", "-").lower()
    if s in ("free", "-", "*", "?", ""):
        return Free()
    if s in ("0", "+0", "-0"):
        return Zero()
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        s = s[1:]
    if s == "1":
        return Expr(sign, ())
    factors = []
    for part in s.split("*"):
        m = _FACTOR.match(part)
        if not m or m.group(2) not in _ROLE_ALIASES:
            raise FormatError(f"cannot parse pattern cell {text!r}")
        factors.append((m.group(1), _ROLE_ALIASES[m.group(2)]))
    return Expr(sign, tuple(factors))


@dataclass(frozen=True)
class EntryPattern:
    cells: tuple  # 3 rows of 3 cells

    def __post_init__(self):
        rows = tuple(tuple(parse_cell(c) if isinstance(c, (str, int, float)) else c for c in row) for row in self.cells)
        if len(rows) != 3 or any(len(row) != 3 for row in rows):
            raise FormatError("pattern must be a 3x3 grid")
        object.__setattr__(self, "cells", rows)

    @classmethod
    def parse(cls, grid) -> EntryPattern:
        if isinstance(grid, dict):
            grid = grid.get("cells", grid.get("pattern"))
        if not isinstance(grid, list):
            raise FormatError("pattern JSON must be a 3x3 list or an object with 'cells'")
        return cls(tuple(tuple(row) for row in grid))

    @classmethod
    def from_json(cls, text: str) -> EntryPattern:
        try:
            return cls.parse(json.loads(text))
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid pattern JSON: {e.msg}", e.lineno) from None

    @classmethod
    def all_free(cls) -> EntryPattern:
        return cls(tuple((Free(),) * 3 for _ in range(3)))

    def constrained(self) -> list[tuple[int, int, Cell]]:
        return [(i, j, c) for i, row in enumerate(self.cells) for j, c in enumerate(row) if not isinstance(c, Free)]

    def to_grid(self) -> list[list[str]]:
        return [[str(c) for c in row] for row in self.cells]


def bundled_3ddfa_pattern() -> EntryPattern:
    """The first-column / last-row pattern read off 3DDFA_v2's pose code."""
    text = resources.files("headrot").joinpath("data/3ddfa_pattern.json").read_text(encoding="utf-8")
    return EntryPattern.from_json(text)


# Candidates


@dataclass(frozen=True)
class FactorizationCandidate:
    sequence: tuple  # three ElementalSpec, multiplication order

    def __post_init__(self):
        seq = tuple(self.sequence)
        if len(seq) != 3 or len({s.axis for s in seq}) != 3 or len({s.role for s in seq}) != 3:
            raise InvalidInputError("a candidate needs three distinct axes and three distinct roles")
        object.__setattr__(self, "sequence", seq)

    def sort_key(self) -> tuple:
        return (
            tuple(s.axis.index for s in self.sequence),
            tuple(ROLES.index(s.role) for s in self.sequence),
            tuple(0 if s.handedness is Handedness.RIGHT else 1 for s in self.sequence),
        )

    def __str__(self):
        return " x ".join(str(s) for s in self.sequence)

    def text(self) -> list[str]:
        return [str(s) for s in self.sequence]

    def builtin_names(self) -> list[str]:
        return [c.name for c in builtin_conventions() if c.sequence == self.sequence]

    def evaluate(self, angles: dict) -> np.ndarray:
        """Stack of matrices, shape ``(n, 3, 3)``, for angle arrays keyed by role."""
        out = None
        for spec in self.sequence:
            m = _elemental_batch(spec, angles[spec.role])
            out = m if out is None else out @ m
        return out


def _elemental_batch(spec: ElementalSpec, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    c, s = np.cos(t), np.sin(t)
    if spec.handedness is Handedness.LEFT:
        s = -s
    m = np.zeros(t.shape + (3, 3))
    i = spec.axis.index
    j, k = [a for a in range(3) if a != i]
    m[..., i, i] = 1.0
    m[..., j, j] = c
    m[..., k, k] = c
    # right-handed: X -> (y,z) block [[c,-s],[s,c]], Y -> (x,z) block [[c,s],[-s,c]], Z like X
    if spec.axis is Axis.Y:
        m[..., j, k], m[..., k, j] = s, -s
    else:
        m[..., j, k], m[..., k, j] = -s, s
    return m


def enumerate_candidates() -> list[FactorizationCandidate]:
    """All 288 elemental factorizations in deterministic order."""
    out = []
    for axes in itertools.permutations(Axis):
        for roles in itertools.permutations(ROLES):
            for hands in itertools.product((Handedness.RIGHT, Handedness.LEFT), repeat=3):
                out.append(FactorizationCandidate(tuple(ElementalSpec(a, h, r) for a, h, r in zip(axes, hands, roles))))
    return sorted(out, key=FactorizationCandidate.sort_key)


def generic_angles(n: int, rng: np.random.Generator) -> dict:
    """Angles in (-pi, pi) at least GENERIC_MARGIN from every multiple of pi/2."""
    half = math.pi / 2
    # uniform offset inside a quadrant, then a random quadrant
    offset = rng.uniform(GENERIC_MARGIN, half - GENERIC_MARGIN, size=(3, n))
    quadrant = rng.integers(-2, 2, size=(3, n))
    vals = quadrant * half + offset
    return dict(zip(ROLES, vals))


def match_pattern(pattern: EntryPattern, samples: int = MIN_SAMPLES, seed: int = 0,
                  candidates: Optional[Iterable[FactorizationCandidate]] = None) -> list[FactorizationCandidate]:
    if samples < MIN_SAMPLES:
        raise InvalidInputError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    cands = enumerate_candidates() if candidates is None else sorted(candidates, key=FactorizationCandidate.sort_key)
    cells = pattern.constrained()
    if not cells:
        return cands
    angles = generic_angles(samples, np.random.default_rng(seed))
    expected = [(i, j, 0.0 if isinstance(c, Zero) else c.evaluate(angles)) for i, j, c in cells]
    out = []
    for cand in cands:
        mats = cand.evaluate(angles)
        if all(np.max(np.abs(mats[:, i, j] - want)) <= PATTERN_TOL for i, j, want in expected):
            out.append(cand)
    return out


def _parse_hint(hint) -> Optional[tuple]:
    if hint is None:
        return None
    roles = tuple(_ROLE_ALIASES[str(h).lower()] if not isinstance(h, AngleRole) else h for h in hint)
    if len(roles) != 3 or len(set(roles)) != 3:
        raise InvalidInputError(f"role order hint must name pitch, yaw and roll once each, got {hint!r}")
    return roles


def infer_from_numeric_samples(pairs: Sequence, role_order_hint=None) -> list[FactorizationCandidate]:
    """Candidates reproducing every ``((pitch, yaw, roll) radians, matrix)`` pair within 1e-6.

    ``role_order_hint`` (e.g. ``("roll", "yaw", "pitch")``) keeps only
    candidates whose roles appear in that multiplication order. An empty
    list means no elemental factorization explains the data. Few or
    degenerate samples leave the answer under-determined; that is reported
    as many candidates rather than as an error.
    """
    if not pairs:
        raise InvalidInputError("need at least one (angles, matrix) pair")
    triples = np.array([[float(v) for v in t] for t, _ in pairs])
    if triples.shape[1] != 3 or not np.all(np.isfinite(triples)):
        raise InvalidInputError("each sample needs three finite angles")
    mats = np.stack([as_rotation(m).m for _, m in pairs])
    angles = dict(zip(ROLES, triples.T))
    hint = _parse_hint(role_order_hint)
    out = []
    for cand in enumerate_candidates():
        if hint is not None and tuple(s.role for s in cand.sequence) != hint:
            continue
        if np.max(np.abs(cand.evaluate(angles) - mats)) <= SAMPLE_TOL:
            out.append(cand)
    return out


def samples_from_json(obj) -> list[tuple[tuple[float, float, float], RotationMatrix]]:
    """``[{"pitch_deg", "yaw_deg", "roll_deg", "rotation": [9]}, ...]`` to radian pairs."""
    if isinstance(obj, dict):
        obj = obj.get("samples")
    if not isinstance(obj, list):
        raise FormatError("samples JSON must be a list of records")
    out = []
    for i, rec in enumerate(obj):
        try:
            t = tuple(math.radians(float(rec[k])) for k in ("pitch_deg", "yaw_deg", "roll_deg"))
            m = np.reshape([float(v) for v in rec["rotation"]], (3, 3))
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"sample {i}: {e}", i) from None
        out.append((t, RotationMatrix(m)))
    return out
