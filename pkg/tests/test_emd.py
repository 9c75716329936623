import random
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from variantscan.emd import DistanceCache, emd, emd_oracle, levenshtein, levenshtein_norm


def naive_edit_distance(s, t):
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (s[i - 1] != t[j - 1]))

    return d(len(s), len(t))


def test_levenshtein_examples():
    assert levenshtein_norm(("a", "b", "c"), ("a", "b")) == pytest.approx(1 / 3, abs=1e-15)
    assert levenshtein_norm(("a", "b"), ("c", "d")) == 1.0
    assert levenshtein_norm(("a", "b"), ("a", "b")) == 0.0
    assert levenshtein_norm((), ()) == 0.0
    assert levenshtein_norm((), ("a",)) == 1.0


def test_labels_compare_as_whole_strings():
    assert levenshtein(("ab", "c"), ("a", "bc")) == 2


variants = st.lists(st.sampled_from(["a", "b", "c"]), max_size=6).map(tuple)


@settings(max_examples=200, deadline=None)
@given(variants, variants)
def test_levenshtein_matches_naive_recursion(s, t):
    assert levenshtein(s, t) == naive_edit_distance(s, t)
    d = levenshtein_norm(s, t)
    assert d == levenshtein_norm(t, s)
    assert 0.0 <= d <= 1.0
    assert (d == 0.0) == (s == t)


def test_emd_examples():
    ab, abc = ("a", "b"), ("a", "b", "c")
    assert emd({ab: 1.0}, {ab: 0.5, abc: 0.5}).value == pytest.approx(1 / 6, abs=1e-12)
    assert emd({ab: 1.0}, {("x",): 1.0}).value == levenshtein_norm(ab, ("x",))
    lang = {ab: 0.25, abc: 0.5, ("c",): 0.25}
    assert emd(lang, dict(lang)).value == 0.0


def test_emd_ignores_insertion_order():
    a = {("p",): 0.2, ("q", "r"): 0.5, ("s", "t", "u"): 0.3}
    b = {("q",): 0.6, ("p", "r"): 0.4}
    rev_a = dict(reversed(list(a.items())))
    rev_b = dict(reversed(list(b.items())))
    assert emd(a, b).value == emd(rev_a, rev_b).value == emd(b, a).value


def test_retained_plan_is_feasible():
    a = {("a",): 0.3, ("b",): 0.7}
    b = {("a", "b"): 0.4, ("c",): 0.35, ("b",): 0.25}
    res = emd(a, b, retain_plan=True)
    plan = res.plan
    assert all(m >= 0 for m in plan.flows.values())
    for src, s in zip(plan.sources, plan.row_sums()):
        assert abs(s - a[src]) <= 1e-9
    for dst, s in zip(plan.targets, plan.col_sums()):
        assert abs(s - b[dst]) <= 1e-9
    cost = sum(m * levenshtein_norm(plan.sources[i], plan.targets[j]) for (i, j), m in plan.flows.items())
    assert abs(cost - res.value) <= 1e-9


def test_transposed_plan_is_feasible():
    # swapped canonical order exercises TransportPlan.transposed
    a = {("z",): 0.5, ("y",): 0.5}
    b = {("a",): 0.1, ("b",): 0.9}
    res = emd(a, b, retain_plan=True)
    assert res.plan.sources == (("y",), ("z",))
    assert [round(x, 12) for x in res.plan.row_sums()] == [0.5, 0.5]


def test_invalid_language_rejected():
    with pytest.raises(ValueError):
        emd({("a",): 0.5}, {("a",): 1.0})
    with pytest.raises(ValueError):
        emd({}, {("a",): 1.0})


def test_oracle_examples():
    s, t = ("x", "y"), ("x",)
    assert emd_oracle({s: 1.0}, {t: 1.0}) == levenshtein_norm(s, t)
    assert emd_oracle({("a", "b"): 1.0}, {("a", "b"): 0.5, ("a", "b", "c"): 0.5}) == pytest.approx(1 / 6, abs=1e-12)
    half = {("x",): 0.5, ("y",): 0.5}
    assert emd_oracle(half, dict(half)) == 0.0


def test_oracle_rejects_large_supports():
    a = {(c,): 0.25 for c in "abcd"}
    b = {(c,): 0.5 for c in "ab"}
    b3 = {(c,): 1 / 3 for c in "xyz"}
    emd_oracle(b3, b3)  # 3x3 = 9 cells is the limit
    with pytest.raises(ValueError, match="too large"):
        emd_oracle(a, b3)
    with pytest.raises(ValueError):
        emd_oracle(a, a)
    assert emd_oracle(a, b) >= 0  # 4x2 fits


def random_language(rng, k, alphabet="abc", max_len=4):
    support = set()
    while len(support) < k:
        support.add(tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_len))))
    weights = [rng.random() + 1e-3 for _ in support]
    total = sum(weights)
    return {v: w / total for v, w in zip(sorted(support), weights)}


def test_emd_matches_oracle_on_random_pairs():
    rng = random.Random(20240101)
    for _ in range(150):
        a = random_language(rng, rng.randint(1, 3))
        b = random_language(rng, rng.randint(1, 3))
        assert abs(emd(a, b).value - emd_oracle(a, b)) <= 1e-9


def test_metric_properties_on_random_languages():
    rng = random.Random(7)
    cache = DistanceCache()
    for _ in range(100):
        a, b, c = (random_language(rng, rng.randint(1, 4)) for _ in range(3))
        ab, ba = emd(a, b, cache).value, emd(b, a, cache).value
        assert 0.0 <= ab <= 1.0
        assert abs(ab - ba) <= 1e-9
        assert emd(a, a, cache).value == 0.0
        assert emd(a, c, cache).value <= ab + emd(b, c, cache).value + 1e-9


def test_cache_matches_direct_computation():
    cache = DistanceCache()
    s, t = ("a", "b", "c"), ("b", "c")
    assert cache.distance(s, t) == cache.distance(t, s) == levenshtein_norm(s, t)
    assert len(cache) == 1
    assert cache.distance(s, s) == 0.0
