"""``headrot`` command-line interface.

Angles cross this boundary in degrees. Exit codes: 0 success, 1 invalid
input or file, 2 usage error (bad flags, unknown convention, unsupported
conversion), 3 degenerate geometry. Failures print a one-line JSON report
to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .annotations import FORMATS, PoseAnnotation, consistent_cache, format_annotations, infer_format, load_annotations
from .augment import BothAxesFlip, FlipAboutLine, PixelOnly, Rotate, augment_annotation, flip_pose_any
from .conventions import BUILTINS, W300LP, WIKI_ZYX, get_convention
from .convert import basis_change, convert_rotation, roundtrip_error
from .draw import cube_from_matrix, emit_svg, three_line_endpoints
from .errors import (
    AngleRangeError,
    DegenerateGeometryError,
    FormatError,
    HeadRotError,
    UnsupportedError,
    ValidationError,
)
from .extract import extract, whenet_select_euler
from .horn import CameraExtrinsic, KeypointSet, horn_align, panoptic_pose, reference_head, whenet_compound_pose
from .inference import (
    MIN_SAMPLES,
    EntryPattern,
    infer_from_numeric_samples,
    match_pattern,
    samples_from_json,
)

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3


class UsageError(HeadRotError):
    """Flag combination or value rejected before any work is done."""


# argparse value types


def _convention(name: str) -> str:
    try:
        return get_convention(name).name
    except UnsupportedError:
        raise argparse.ArgumentTypeError(f"unknown convention {name!r}; known: {', '.join(BUILTINS)}") from None


def _image_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"image size must look like 640x480, got {text!r}") from None
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError("image size must be positive")
    return w, h


def _positive(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


# shared helpers


def _load(args) -> list[PoseAnnotation]:
    return load_annotations(args.input, args.format)


def _write_text(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8", newline="\n")


def _output_format(args) -> str:
    if getattr(args, "output_format", None):
        return args.output_format
    if args.output and args.output != "-":
        try:
            return infer_format(args.output)
        except UnsupportedError:
            pass
    return args.format or infer_format(args.input)


def _deg(e) -> dict:
    p, y, r = e.degrees()
    return {"pitch": p, "yaw": y, "roll": r}


def _rows_as_csv(rows: list[dict], columns: Sequence[str]) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


# extract


def cmd_extract(args) -> int:
    records = _load(args)
    rows = []
    for rec in records:
        target = get_convention(args.convention or rec.source_convention)
        r = convert_rotation(rec.rotation, basis_change(rec.source_convention, target))
        res = extract(r, target)
        sols = res.solutions if args.both_solutions else [res.primary]
        for k, sol in enumerate(sols, start=1):
            p, y, ro = sol.degrees()
            rows.append({
                "image_id": rec.image_id,
                "convention": target.name,
                "solution": k,
                "pitch_deg": p,
                "yaw_deg": y,
                "roll_deg": ro,
                "gimbal_lock": res.gimbal_lock,
                "constraint_note": res.constraint_note,
            })
    if _output_format(args) == "csv":
        text = _rows_as_csv(rows, ["image_id", "convention", "solution", "pitch_deg", "yaw_deg", "roll_deg",
                                   "gimbal_lock", "constraint_note"])
    else:
        text = json.dumps(rows, indent=2) + "\n"
    _write_text(text, args.output)
    return EXIT_OK


# convert


def cmd_convert(args) -> int:
    records = _load(args)
    target = get_convention(args.to)
    out, errors = [], []
    for i, rec in enumerate(records):
        if rec.source_convention != args.from_:
            raise ValidationError(
                f"record {i} ({rec.image_id}) is tagged {rec.source_convention}, not {args.from_}", i
            )
        if args.from_ == target.name:
            out.append(rec)
            errors.append(0.0)
            continue
        change = basis_change(args.from_, target)
        converted = convert_rotation(rec.rotation, change)
        cache = consistent_cache(converted, target)
        out.append(PoseAnnotation(rec.image_id, converted, target.name, rec.bbox, cache))
        if args.report_error:
            errors.append(roundtrip_error(rec.euler(), target))
    fmt = _output_format(args)
    if fmt == "json" and args.report_error:
        docs = [dict(a.to_json_record(), roundtrip_error=e) for a, e in zip(out, errors)]
        text = json.dumps(docs, indent=2) + "\n"
    else:
        text = format_annotations(out, fmt)
        if args.report_error:
            report = [{"image_id": a.image_id, "roundtrip_error": e} for a, e in zip(out, errors)]
            print(json.dumps(report), file=sys.stderr)
    _write_text(text, args.output)
    return EXIT_OK


# augment


def parse_op(text: str, reduce_flip_angle: bool = False):
    """``rotate:<deg>``, ``flip:<deg>``, ``hflip``, ``vflip``, ``bothflip``, ``diagflip`` or ``pixel``."""
    name, _, arg = text.strip().lower().partition(":")
    fixed = {"hflip": 90.0, "vflip": 0.0, "diagflip": 45.0}
    if name in fixed and not arg:
        return FlipAboutLine(math.radians(fixed[name]))
    if name == "bothflip" and not arg:
        return BothAxesFlip()
    if name == "pixel":
        return PixelOnly(arg or "pixel")
    if name in ("rotate", "flip") and arg:
        try:
            deg = float(arg)
        except ValueError:
            raise UsageError(f"bad angle in --op {text!r}") from None
        if not math.isfinite(deg):
            raise UsageError(f"bad angle in --op {text!r}")
        if name == "rotate":
            return Rotate(math.radians(deg))
        if reduce_flip_angle:
            return _AnyFlip(math.radians(deg))
        try:
            return FlipAboutLine(math.radians(deg))
        except AngleRangeError as e:
            raise UsageError(f"{e}; pass --reduce-flip-angle to allow any line") from None
    raise UsageError(f"unknown --op {text!r}; use rotate:<deg>, flip:<deg>, hflip, vflip, bothflip or diagflip")


class _AnyFlip(FlipAboutLine):
    """Flip about any line; the label update goes through flip_pose_any."""

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))

    def apply_rotation(self, r):
        return flip_pose_any(r, self.theta)


def cmd_augment(args) -> int:
    op = parse_op(args.op, args.reduce_flip_angle)
    records = _load(args)
    if args.image_size is None and any(rec.bbox is not None for rec in records):
        raise UsageError("--image-size is required when records carry bounding boxes")
    size = args.image_size or (1, 1)
    out = []
    for i, rec in enumerate(records):
        try:
            out.append(augment_annotation(rec, op, size))
        except DegenerateGeometryError as e:
            raise DegenerateGeometryError(f"record {i} ({rec.image_id}): {e}") from None
    _write_text(format_annotations(out, _output_format(args)), args.output)
    return EXIT_OK


# draw


def _drawable(rec: PoseAnnotation):
    """Matrix and frame to draw in: Wikipedia-frame labels stay, the rest go to 300W-LP."""
    if rec.source_convention == WIKI_ZYX.name:
        return rec.rotation, WIKI_ZYX
    return convert_rotation(rec.rotation, basis_change(rec.source_convention, W300LP)), W300LP


def _safe_name(image_id: str) -> str:
    name = image_id.replace("/", "_").replace("\\", "_")
    return name if name not in ("", ".", "..") else f"_{name}"


def cmd_draw(args) -> int:
    records = _load(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    w, h = args.image_size
    size = args.size or (100.0 if args.style == "lines" else 150.0)
    for rec in records:
        if rec.bbox is not None:
            x, y, bw, bh = rec.bbox
            origin = (x + bw / 2, y + bh / 2)
        else:
            origin = (w / 2, h / 2)
        r, conv = _drawable(rec)
        if args.style == "lines":
            proj = three_line_endpoints(r, conv, origin, size)
        else:
            proj = cube_from_matrix(r, conv, origin, size)
        stem = _safe_name(rec.image_id)
        (out_dir / f"{stem}.svg").write_text(emit_svg(proj, (w, h)), encoding="utf-8", newline="\n")
        if args.endpoints:
            (out_dir / f"{stem}.json").write_text(json.dumps(proj.to_dict()) + "\n", encoding="utf-8")
    return EXIT_OK


# infer


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e.msg})", e.lineno) from None


def cmd_infer(args) -> int:
    if args.pattern:
        pattern = EntryPattern.parse(_read_json(args.pattern))
        found = match_pattern(pattern, samples=args.num_samples, seed=args.seed)
    else:
        found = infer_from_numeric_samples(samples_from_json(_read_json(args.samples)), args.role_order)
    if args.report:
        doc = {
            "source": "pattern" if args.pattern else "samples",
            "seed": args.seed,
            "count": len(found),
            "candidates": [{"sequence": c.text(), "builtin": c.builtin_names()} for c in found],
        }
        print(json.dumps(doc, indent=2))
    else:
        for c in found:
            names = c.builtin_names()
            print(" ".join(c.text()) + (f"  ({', '.join(names)})" if names else ""))
    return EXIT_OK


# align


def _formula_result(name: str, horn_r, cam) -> dict:
    pose = (panoptic_pose if name == "panoptic" else whenet_compound_pose)(horn_r, cam)
    chosen = whenet_select_euler(extract(pose, W300LP))
    return {
        "formula": name,
        "pose": pose.tolist(),
        "euler_deg": None if chosen is None else _deg(chosen),
    }


def cmd_align(args) -> int:
    if args.model == "reference":
        model = reference_head()
    else:
        model = KeypointSet.from_json(Path(args.model).read_text(encoding="utf-8"))
    observed = KeypointSet.from_json(Path(args.observed).read_text(encoding="utf-8"))
    cam = CameraExtrinsic.identity()
    if args.camera:
        cam = CameraExtrinsic.from_json(Path(args.camera).read_text(encoding="utf-8"))
    al = horn_align(model, observed)
    formulas = ["whenet", "panoptic"] if args.formula == "both" else [args.formula]
    doc = {"alignment": al.to_dict(), "results": [_formula_result(f, al.rotation, cam) for f in formulas]}
    print(json.dumps(doc, indent=2))
    return EXIT_OK


# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="headrot", description="Head-pose rotation label tools.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--seed", type=int, default=0, help="seed for any random sampling (default 0)")
    sub = p.add_subparsers(dest="command", required=True)

    def io_args(sp, output=True):
        sp.add_argument("--input", required=True, help="annotation file (.json or .csv)")
        sp.add_argument("--format", choices=FORMATS, help="input format (default: from extension)")
        if output:
            sp.add_argument("--output", help="output file (default: stdout)")
            sp.add_argument("--output-format", choices=FORMATS, help="output format (default: from --output, else input)")

    sp = sub.add_parser("extract", help="Euler angles from annotation matrices")
    io_args(sp)
    sp.add_argument("--convention", type=_convention, help="extract under this convention (default: each record's own)")
    sp.add_argument("--both-solutions", action="store_true", help="emit both solutions where they exist")
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("convert", help="move annotations to another rotation system")
    io_args(sp)
    sp.add_argument("--from", dest="from_", type=_convention, required=True)
    sp.add_argument("--to", type=_convention, required=True)
    sp.add_argument("--report-error", action="store_true", help="add the matrix round-trip Frobenius error per record")
    sp.set_defaults(func=cmd_convert)

    sp = sub.add_parser("augment", help="update labels for an image rotation or flip")
    io_args(sp)
    sp.add_argument("--op", required=True, help="rotate:<deg> | flip:<deg> | hflip | vflip | bothflip | diagflip")
    sp.add_argument("--image-size", type=_image_size, help="WxH in pixels; needed to move bounding boxes")
    sp.add_argument("--reduce-flip-angle", action="store_true", help="accept flip lines outside [0, 90] deg")
    sp.set_defaults(func=cmd_augment)

    sp = sub.add_parser("draw", help="write three-line or pose-cube SVGs")
    io_args(sp, output=False)
    sp.add_argument("--style", choices=("lines", "cube"), default="lines")
    sp.add_argument("--size", type=_positive, help="line length / cube edge in pixels (default 100 / 150)")
    sp.add_argument("--image-size", type=_image_size, default=(400, 400))
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--endpoints", action="store_true", help="also write <image_id>.json endpoint dumps")
    sp.set_defaults(func=cmd_draw)

    sp = sub.add_parser("infer", help="find elemental factorizations matching a pattern or samples")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--pattern", help="3x3 pattern JSON")
    src.add_argument("--samples", help="JSON list of {pitch_deg, yaw_deg, roll_deg, rotation}")
    sp.add_argument("--num-samples", type=int, default=MIN_SAMPLES, help=f"random angle triples per candidate (>= {MIN_SAMPLES})")
    sp.add_argument("--role-order", nargs=3, metavar="ROLE", help="keep only this multiplication order of roles")
    sp.add_argument("--report", action="store_true", help="print a JSON report")
    sp.set_defaults(func=cmd_infer)

    sp = sub.add_parser("align", help="Horn alignment and compound head pose")
    sp.add_argument("--model", required=True, help="keypoint JSON, or 'reference' for the built-in 58-point head")
    sp.add_argument("--observed", required=True, help="keypoint JSON")
    sp.add_argument("--camera", help="extrinsics JSON {R: 9 numbers, t: 3 numbers} (default identity)")
    sp.add_argument("--formula", choices=("whenet", "panoptic", "both"), default="panoptic")
    sp.set_defaults(func=cmd_align)
    return p


def _exit_code(err: Exception) -> int:
    if isinstance(err, DegenerateGeometryError):
        return EXIT_DEGENERATE
    if isinstance(err, (UsageError, UnsupportedError)):
        return EXIT_USAGE
    return EXIT_INVALID


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "infer" and args.pattern and args.num_samples < MIN_SAMPLES:
            parser.error(f"--num-samples must be at least {MIN_SAMPLES}")
    except SystemExit as e:
        # argparse exits 2 on bad flags and 0 for --help / --version
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (HeadRotError, ValueError, OSError) as err:
        report = {"error": type(err).__name__, "message": str(err)}
        index = getattr(err, "index", None)
        if index is not None:
            report["index"] = index
        print(json.dumps(report), file=sys.stderr)
        return _exit_code(err)


if __name__ == "__main__":
    sys.exit(main())
