import numpy as np
import pytest

from conftest import A, B, step_log
from variantscan.change_detection import LdistEntry, LdistSeries, ldist_series, make_buckets
from variantscan.emd import levenshtein_norm
from variantscan.indicators import IndicatorSpec, rank_log
from variantscan.segmentation import (
    ChangePointSet,
    compare_segments,
    cut_segments,
    detect_change_points,
    merge_segments,
)

IDX = IndicatorSpec("attribute", "idx")
D = levenshtein_norm(A, B)


def series_of(values, w=1):
    return LdistSeries(w, tuple(LdistEntry(i, float(i), v) for i, v in enumerate(values, start=w)))


def aba_segments(aba_log):
    bk = make_buckets(rank_log(aba_log, IDX), 15)
    return bk, cut_segments(bk, ChangePointSet(0.1, 1, (7, 10)))


def test_step_series_change_points(aba_log):
    bk = make_buckets(rank_log(aba_log, IDX), 15)
    cps = detect_change_points(ldist_series(bk, 1), 0.1)
    assert cps.points == (7, 10)


def test_all_zero_series_has_no_points():
    assert detect_change_points(series_of([0.0] * 8), 0.1).points == ()


def test_constant_plateau_collapses_left():
    assert detect_change_points(series_of([0.3] * 6, w=2), 0.0).points == (2,)


def test_flat_peak_collapses_to_leftmost():
    assert detect_change_points(series_of([0.0, 0.4, 0.4, 0.4, 0.1]), 0.1).points == (2,)


def test_boundary_points_need_one_side_only():
    assert detect_change_points(series_of([0.5, 0.2, 0.1, 0.3]), 0.1).points == (1, 4)


def test_below_threshold_peak_ignored():
    assert detect_change_points(series_of([0.0, 0.09, 0.0, 0.2, 0.0]), 0.1).points == (4,)


def test_theta_range():
    with pytest.raises(ValueError):
        detect_change_points(series_of([0.1]), 1.5)


def test_cut_aba(aba_log):
    bk, segs = aba_segments(aba_log)
    assert [(s.first_bucket, s.last_bucket) for s in segs] == [(1, 7), (8, 10), (11, 15)]
    assert [len(s) for s in segs] == [70, 30, 50]
    assert (segs[1].kappa_min, segs[1].kappa_max) == (70.0, 99.0)


def test_cut_without_points(aba_log):
    bk = make_buckets(rank_log(aba_log, IDX), 15)
    segs = cut_segments(bk, ChangePointSet(0.1, 1, ()))
    assert len(segs) == 1 and len(segs[0]) == 150


def test_cut_single_point(aba_log):
    bk = make_buckets(rank_log(aba_log, IDX), 15)
    segs = cut_segments(bk, ChangePointSet(0.1, 3, (3,)))
    assert [len(s) for s in segs] == [30, 120]


def test_compare_aba(aba_log):
    _, segs = aba_segments(aba_log)
    m = compare_segments(segs).values
    assert m[0, 2] == 0.0
    assert m[0, 1] == pytest.approx(D, abs=1e-12) and m[1, 2] == pytest.approx(D, abs=1e-12)
    assert np.array_equal(m, m.T) and not m.diagonal().any()


def test_compare_single_segment(aba_log):
    bk = make_buckets(rank_log(aba_log, IDX), 15)
    m = compare_segments(cut_segments(bk, ChangePointSet(0.1, 1, ())))
    assert m.values.shape == (1, 1) and m.values[0, 0] == 0.0


def test_compare_identical_segments():
    log = step_log([(A, 20), (B, 20), (A, 20), (B, 20)])
    bk = make_buckets(rank_log(log, IDX), 8)
    segs = cut_segments(bk, ChangePointSet(0.1, 1, (2, 4, 6)))
    m = compare_segments(segs).values
    assert m[0, 2] == 0.0 and m[1, 3] == 0.0


def test_compare_plans_retained(aba_log):
    _, segs = aba_segments(aba_log)
    m = compare_segments(segs, retain_plans=True)
    assert set(m.plans) == {(1, 2), (1, 3), (2, 3)}
    assert m.plans[(1, 2)].cost == pytest.approx(D)


def test_merge_aba(aba_log):
    _, segs = aba_segments(aba_log)
    res = merge_segments(segs, 0.1)
    assert res.partition == [{1, 3}, {2}]
    assert len(res.steps) == 1
    assert res.steps[0].group_a == (1,) and res.steps[0].group_b == (3,) and res.steps[0].distance == 0.0
    assert res.groups[0].kappa_intervals == ((0.0, 69.0), (100.0, 149.0))


def test_merge_nothing_below_theta(aba_log):
    bk = make_buckets(rank_log(aba_log, IDX), 15)
    segs = cut_segments(bk, ChangePointSet(0.1, 1, (7,)))
    res = merge_segments(segs, 0.1)
    assert res.steps == () and res.partition == [{1}, {2}]


def test_merge_only_first_two():
    near = ("a", "b", "c", "d", "e", "f", "g", "h", "i", "j")
    nearby = near[:-1] + ("z",)  # one substitution in ten
    log = step_log([(near, 30), (nearby, 30), (("p", "q"), 30), (("r",), 30)])
    bk = make_buckets(rank_log(log, IDX), 12)
    segs = cut_segments(bk, ChangePointSet(0.05, 1, (3, 6, 9)))
    res = merge_segments(segs, 0.15)
    assert res.partition == [{1, 2}, {3}, {4}]
    assert res.steps[0].distance == pytest.approx(0.1)


def test_merge_ties_take_smallest_pair():
    log = step_log([(A, 10), (A, 10), (A, 10)])
    bk = make_buckets(rank_log(log, IDX), 3)
    segs = cut_segments(bk, ChangePointSet(0.1, 1, (1, 2)))
    res = merge_segments(segs, 0.1)
    assert [(s.group_a, s.group_b) for s in res.steps] == [((1,), (2,)), ((1, 2), (3,))]
    assert res.partition == [{1, 2, 3}]


def test_merge_is_deterministic(aba_log):
    _, segs = aba_segments(aba_log)
    assert merge_segments(segs, 0.6) == merge_segments(segs, 0.6)
