"""Label inference, almost-touch merging, and the exact partition oracle."""

import numpy as np
import pytest

from eigenflow.crossings import Crossing, CrossingSet, build_R1, parse_R1
from eigenflow.decomposition import (
    TouchError,
    almost_touch,
    apply_touch,
    block_structure,
    infer_labels,
    min_blocks_oracle,
    validate_labels,
)


def R1_of(rows, n):
    cs = CrossingSet([Crossing(i, j, 0.0, 1.0, 1.0)
                      for i, ps in rows.items() for j in ps])
    return build_R1(cs, n)


FIG2 = R1_of({1: [2, 3], 3: [4], 4: [5, 6], 6: [7], 7: [8], 10: [11]}, 11)
FIG2_TOUCH = [(2, 3), (5, 6), (6, 8), (9, 10)]
FIG3 = R1_of({1: [2], 2: [3], 3: [5], 4: [5], 5: [6], 6: [8], 7: [8], 10: [11]}, 11)
FIG3_TOUCH = [(1, 3), (3, 4), (4, 6), (6, 7), (7, 9), (9, 10)]
SIX = R1_of({1: [2, 3, 5, 6], 2: [3, 5], 3: [5], 4: [5, 6]}, 6)
DIA5 = R1_of({1: [2, 3, 4, 5], 2: [3, 4, 5], 3: [4, 5], 4: [5]}, 5)


# --- infer_labels: the published reference labelings -------------------------

def test_figure2_labels():
    assert infer_labels(FIG2, 11).tolist() == [1, -1, -1, 1, -1, -1, 1, -1, 2, 3, -3]


def test_figure3_labels_before_touch():
    assert infer_labels(FIG3, 11).tolist() == [1, -1, 1, 1, -1, 1, 1, -1, 2, 3, -3]


def test_six_by_six_labels():
    assert infer_labels(SIX, 6).tolist() == [1, -1, 2, 2, -2, -2]


def test_diag5_labels():
    assert infer_labels(DIA5, 5).tolist() == [1, -1, 2, -2, 3]


def test_empty_R1_counts_up():
    R1 = R1_of({}, 3)
    assert infer_labels(R1, 3).tolist() == [1, 2, 3]


def test_infer_rejects_out_of_range():
    with pytest.raises(ValueError):
        infer_labels(FIG2, 7)


def test_infer_soundness_random():
    # every crossing pair ends with distinct labels, including on dense
    # instances that exercise the clash rollback and the repair sweep
    rng = np.random.default_rng(12)
    for _ in range(300):
        n = int(rng.integers(2, 13))
        p = rng.uniform(0.1, 0.9)
        rows = {}
        for i in range(1, n):
            ps = [j for j in range(i + 1, n + 1) if rng.random() < p]
            if ps:
                rows[i] = ps
        R1 = R1_of(rows, n)
        ve = infer_labels(R1, n)
        assert np.all(ve != 0)
        assert validate_labels(ve, R1) is None


def test_permutation_equivariance_of_block_sizes():
    rng = np.random.default_rng(5)
    rows = {1: [2, 3], 3: [4], 4: [5, 6]}
    n = 7
    base = block_structure(infer_labels(R1_of(rows, n), n)).sizes
    for _ in range(20):
        perm = rng.permutation(n) + 1
        mapped = {}
        for i, ps in rows.items():
            for j in ps:
                a, b = sorted((int(perm[i - 1]), int(perm[j - 1])))
                mapped.setdefault(a, []).append(b)
        sizes = block_structure(infer_labels(R1_of(mapped, n), n)).sizes
        assert sizes == base


# --- almost_touch -------------------------------------------------------------

def test_figure2_touch_merges_to_four_groups():
    ve = infer_labels(FIG2, 11)
    out = almost_touch(ve, FIG2_TOUCH, FIG2)
    assert out.tolist() == [1, -1, -1, 1, -1, -1, 1, -1, 2, 2, -2]


def test_figure3_touch_merges_to_two_groups():
    ve = infer_labels(FIG3, 11)
    out = almost_touch(ve, FIG3_TOUCH, FIG3)
    assert out.tolist() == [1, -1, 1, 1, -1, 1, 1, -1, 1, 1, -1]
    assert block_structure(out).sizes == (4, 7)


def test_empty_touch_is_identity():
    ve = infer_labels(SIX, 6)
    assert np.array_equal(almost_touch(ve, [], SIX), ve)


def test_touch_on_crossing_pair_errors_with_row():
    R1 = R1_of({1: [2]}, 2)
    ve = infer_labels(R1, 2)
    with pytest.raises(TouchError) as ei:
        almost_touch(ve, [(1, 2)], R1)
    assert ei.value.row == 1
    assert ei.value.pair == (1, 2)


def test_touch_error_names_later_row():
    R1 = R1_of({1: [2]}, 4)
    ve = infer_labels(R1, 4)               # (1, -1, 2, 3)
    with pytest.raises(TouchError) as ei:
        almost_touch(ve, [(3, 4), (1, 2)], R1)
    assert ei.value.row == 2


def test_touch_merge_that_breaks_crossing_detected():
    # curves 1-2 cross; touching (1,3) then (2,3) forces 1 and 2 together
    R1 = R1_of({1: [2]}, 3)
    ve = infer_labels(R1, 3)               # (1, -1, 2)
    with pytest.raises(TouchError) as ei:
        almost_touch(ve, [(1, 3), (2, 3)], R1)
    assert ei.value.row == 2


def test_touch_idempotence():
    ve = infer_labels(FIG2, 11)
    once = almost_touch(ve, FIG2_TOUCH, FIG2)
    twice = almost_touch(once, FIG2_TOUCH, FIG2)
    assert np.array_equal(once, twice)


def test_apply_touch_drop_mode():
    R1 = R1_of({1: [2]}, 2)
    ve = infer_labels(R1, 2)
    out, dropped = apply_touch(ve, [(1, 2)], R1, on_error="drop")
    assert dropped == [(1, 2)]
    assert out.tolist() == [1, -1]


def test_touch_out_of_range():
    ve = infer_labels(R1_of({}, 3), 3)
    with pytest.raises(ValueError):
        almost_touch(ve, [(1, 9)], R1_of({}, 3))


# --- block_structure ----------------------------------------------------------

def test_block_sizes_examples():
    assert block_structure(np.array([1, -1, 1, 1, -1, 1, 1, -1, 1, 1, -1])).sizes == (4, 7)
    assert block_structure(np.array([1, -1, 2, 2, -2, -2])).sizes == (1, 1, 2, 2)
    assert block_structure(np.array([1, -1, 2, -2, 3])).sizes == (1, 1, 1, 1, 1)


def test_block_members_partition():
    bs = block_structure(np.array([1, -1, 2, 2, -2, -2]))
    members = sorted(i for _, mem in bs.blocks for i in mem)
    assert members == list(range(1, 7))


# --- min_blocks_oracle ----------------------------------------------------------

def test_oracle_two_curves():
    count, witness = min_blocks_oracle({(1, 2)}, [], 2)
    assert count == 2
    assert witness[1] != witness[2]


def test_oracle_six_by_six():
    count, _ = min_blocks_oracle(parse_R1(SIX), [], 6)
    assert count == 4


def test_oracle_figure3_with_touch():
    count, witness = min_blocks_oracle(parse_R1(FIG3), FIG3_TOUCH, 11)
    assert count == 2
    sizes = sorted(np.bincount([witness[i] for i in range(1, 12)])[1:])
    assert [s for s in sizes if s] == [4, 7]


def test_oracle_infeasible_witness():
    with pytest.raises(ValueError, match=r"\(1,2\)"):
        min_blocks_oracle({(1, 2)}, [(1, 2)], 3)


def test_oracle_budget():
    with pytest.raises(ValueError):
        min_blocks_oracle(set(), [], 13)


def test_oracle_witness_respects_constraints():
    rng = np.random.default_rng(77)
    for _ in range(30):
        n = int(rng.integers(2, 10))
        crossing = {(i, j) for i in range(1, n) for j in range(i + 1, n + 1)
                    if rng.random() < 0.3}
        count, witness = min_blocks_oracle(crossing, [], n)
        for (i, j) in crossing:
            assert witness[i] != witness[j]
        assert count == len(set(witness.values()))


def test_heuristic_never_beats_oracle():
    rng = np.random.default_rng(123)
    for _ in range(60):
        n = int(rng.integers(3, 11))
        true_blocks = rng.integers(1, 4)
        membership = rng.integers(0, true_blocks, n)
        crossing, touch = set(), []
        for i in range(n):
            for j in range(i + 1, n):
                if membership[i] != membership[j] and rng.random() < 0.4:
                    crossing.add((i + 1, j + 1))
                elif membership[i] == membership[j] and rng.random() < 0.3:
                    touch.append((i + 1, j + 1))
        R1 = R1_of({i: sorted(j for (a, j) in crossing if a == i)
                    for i in set(a for (a, _) in crossing)}, n)
        ve = infer_labels(R1, n)
        ve, dropped = apply_touch(ve, touch, R1, on_error="drop")
        heuristic = len(set(ve.tolist()))
        kept = [p for p in touch if tuple(sorted(p)) not in
                {tuple(sorted(d)) for d in dropped}]
        exact, _ = min_blocks_oracle(crossing, kept, n)
        assert heuristic >= exact
        assert validate_labels(ve, R1) is None
