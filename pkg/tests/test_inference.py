import json
import math

import numpy as np
import pytest

from headrot.conventions import REPNET6D, TDDFA_V2, W300LP, WIKI_ZYX, ElementalSpec, EulerAngles, euler_to_matrix
from headrot.errors import FormatError, InvalidInputError
from headrot.inference import (
    EntryPattern,
    Expr,
    FactorizationCandidate,
    Free,
    Zero,
    bundled_3ddfa_pattern,
    enumerate_candidates,
    generic_angles,
    infer_from_numeric_samples,
    match_pattern,
    parse_cell,
    samples_from_json,
)
from headrot.conventions import AngleRole


def _seq(conv):
    return FactorizationCandidate(conv.sequence)


def test_candidate_count_and_order():
    cands = enumerate_candidates()
    assert len(cands) == 288
    assert len(set(cands)) == 288
    assert cands == enumerate_candidates()
    keys = [c.sort_key() for c in cands]
    assert keys == sorted(keys)


def test_candidates_contain_builtins():
    cands = set(enumerate_candidates())
    for conv in (W300LP, TDDFA_V2, WIKI_ZYX, REPNET6D):
        assert _seq(conv) in cands


def test_bundled_pattern_unique():
    found = match_pattern(bundled_3ddfa_pattern())
    assert found == [_seq(TDDFA_V2)]
    assert found[0].text() == ["Z+roll", "Y-yaw", "X+pitch"]


def test_bundled_pattern_many_seeds():
    pat = bundled_3ddfa_pattern()
    for seed in range(20):
        assert match_pattern(pat, seed=seed) == [_seq(TDDFA_V2)]


def test_all_free():
    assert len(match_pattern(EntryPattern.all_free())) == 288


def _w300lp_pattern():
    return EntryPattern.parse([
        ["cos(y)*cos(r)", "cos(y)*sin(r)", "-sin(y)"],
        ["free", "free", "sin(p)*cos(y)"],
        ["free", "free", "cos(p)*cos(y)"],
    ])


def test_w300lp_self_match():
    assert match_pattern(_w300lp_pattern()) == [_seq(W300LP)]


def test_no_false_positives_on_resampling():
    pat = bundled_3ddfa_pattern()
    for cand in match_pattern(pat, seed=3):
        angles = generic_angles(64, np.random.default_rng(999))
        mats = cand.evaluate(angles)
        for i, j, cell in pat.constrained():
            assert np.max(np.abs(mats[:, i, j] - cell.evaluate(angles))) <= 1e-9


def test_zero_and_one_cells():
    pat = EntryPattern.parse([["free", "free", "free"], ["free", "free", "free"], ["free", "free", "free"]])
    assert pat.constrained() == []
    pat = EntryPattern.parse([["1", "0", "0"], ["free"] * 3, ["free"] * 3])
    # first row (1, 0, 0) means X is leftmost; none of the 288 keep that for generic angles
    assert match_pattern(pat) == []


def test_parse_cells():
    assert parse_cell("0") == Zero()
    assert parse_cell("free") == Free() and parse_cell("-") == Free()
    assert parse_cell("1") == Expr(1, ())
    assert parse_cell("-1") == Expr(-1, ())
    assert parse_cell("−cos(y)*sin(pitch)") == Expr(-1, (("cos", AngleRole.YAW), ("sin", AngleRole.PITCH)))
    assert parse_cell("+sin( r )") == Expr(1, (("sin", AngleRole.ROLL),))
    for bad in ("tan(y)", "cos(q)", "cos(y)+sin(p)", "cos y"):
        with pytest.raises(FormatError):
            parse_cell(bad)


def test_pattern_shape_errors():
    with pytest.raises(FormatError):
        EntryPattern.parse([["0", "0"], ["0", "0"]])
    with pytest.raises(FormatError):
        EntryPattern.from_json("{not json")
    with pytest.raises(FormatError):
        EntryPattern.parse("nope")


def test_min_samples():
    with pytest.raises(InvalidInputError):
        match_pattern(bundled_3ddfa_pattern(), samples=8)


def test_generic_angles_margin():
    a = generic_angles(5000, np.random.default_rng(0))
    for vals in a.values():
        dist = np.abs(vals / (math.pi / 2) - np.round(vals / (math.pi / 2))) * (math.pi / 2)
        assert dist.min() >= 0.1 - 1e-12
        assert np.all(np.abs(vals) < math.pi)


def _pairs(conv, n, rng, transpose=False):
    out = []
    for p, y, r in rng.uniform(-3, 3, (n, 3)):
        m = euler_to_matrix(EulerAngles(p, y, r, conv))
        out.append(((p, y, r), m.m.T if transpose else m))
    return out


def test_recover_wiki(rng):
    assert infer_from_numeric_samples(_pairs(WIKI_ZYX, 6, rng)) == [_seq(WIKI_ZYX)]


def test_transposed_w300lp_gives_repnet(rng):
    assert infer_from_numeric_samples(_pairs(W300LP, 6, rng, transpose=True)) == [_seq(REPNET6D)]


def test_single_identity_pair_is_underdetermined():
    assert len(infer_from_numeric_samples([((0.0, 0.0, 0.0), np.eye(3))])) == 288


def test_role_order_hint(rng):
    pairs = [((0.0, 0.0, 0.0), np.eye(3))]
    found = infer_from_numeric_samples(pairs, role_order_hint=("roll", "yaw", "pitch"))
    assert len(found) == 48
    assert all([s.role.value for s in c.sequence] == ["roll", "yaw", "pitch"] for c in found)
    with pytest.raises(InvalidInputError):
        infer_from_numeric_samples(pairs, role_order_hint=("roll", "roll", "pitch"))


def test_no_consistent_convention(rng):
    pairs = _pairs(W300LP, 6, rng)
    # scramble matrices against angles
    pairs = [(pairs[i][0], pairs[(i + 1) % 6][1]) for i in range(6)]
    assert infer_from_numeric_samples(pairs) == []


def test_samples_json(rng):
    recs = []
    for (p, y, r), m in _pairs(WIKI_ZYX, 5, rng):
        recs.append({"pitch_deg": math.degrees(p), "yaw_deg": math.degrees(y), "roll_deg": math.degrees(r),
                     "rotation": m.flat()})
    pairs = samples_from_json(json.loads(json.dumps(recs)))
    assert infer_from_numeric_samples(pairs) == [_seq(WIKI_ZYX)]
    with pytest.raises(FormatError):
        samples_from_json([{"pitch_deg": 1}])


def test_candidate_invariants():
    with pytest.raises(InvalidInputError):
        FactorizationCandidate(tuple(ElementalSpec.parse(t) for t in ("X+pitch", "X+yaw", "Z+roll")))
    assert _seq(W300LP).builtin_names() == ["W300LP", "WHENET_PANOPTIC"]
