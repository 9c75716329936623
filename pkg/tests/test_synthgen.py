import io
import math

import pytest

from variantscan.event_log import write_csv
from variantscan.synthgen import (
    CANCEL_VARIANT,
    FULL_VARIANT,
    NOISY_FULL_VARIANT,
    SKIP_VARIANT,
    ClaimGenConfig,
    StepGenConfig,
    claim_variant,
    generate_claim_log,
    generate_step_log,
    parse_regions,
)


def csv_bytes(log):
    buf = io.StringIO()
    write_csv(log, buf)
    return buf.getvalue()


def test_risk_thresholds():
    assert claim_variant(12.0) == CANCEL_VARIANT and len(CANCEL_VARIANT) == 2
    assert claim_variant(1.0) == SKIP_VARIANT and len(SKIP_VARIANT) == 4
    assert claim_variant(3.0) == claim_variant(10.0) == FULL_VARIANT
    assert claim_variant(5.0, noisy=True) == NOISY_FULL_VARIANT
    assert claim_variant(1.0, noisy=True) == SKIP_VARIANT


def test_claim_log_is_deterministic():
    cfg = ClaimGenConfig(cases=300, seed=9)
    assert csv_bytes(generate_claim_log(cfg)) == csv_bytes(generate_claim_log(cfg))
    assert csv_bytes(generate_claim_log(ClaimGenConfig(cases=300, seed=10))) != csv_bytes(generate_claim_log(cfg))


def test_claim_traces_follow_their_risk():
    log = generate_claim_log(ClaimGenConfig(cases=2000, seed=1))
    for tr in log:
        r = tr.attributes["risk_score"]
        assert 0.0 <= r <= 15.0
        if r > 10:
            assert tr.variant == CANCEL_VARIANT
        elif r < 3:
            assert tr.variant == SKIP_VARIANT
        else:
            assert tr.variant in (FULL_VARIANT, NOISY_FULL_VARIANT)
        stamps = [e.timestamp for e in tr.events]
        assert all(a < b for a, b in zip(stamps, stamps[1:]))


def test_family_proportions_within_three_sigma():
    n = 10_000
    log = generate_claim_log(ClaimGenConfig(cases=n, seed=42))
    counts = {"skip": 0, "full": 0, "cancel": 0}
    for tr in log:
        v = tr.variant
        counts["skip" if v == SKIP_VARIANT else "cancel" if v == CANCEL_VARIANT else "full"] += 1
    for family, p in (("skip", 3 / 15), ("full", 7 / 15), ("cancel", 5 / 15)):
        sigma = math.sqrt(n * p * (1 - p))
        assert abs(counts[family] - n * p) <= 3 * sigma, family


def test_noise_rate_zero_gives_three_variants():
    log = generate_claim_log(ClaimGenConfig(cases=1000, seed=2, noise_rate=0.0))
    assert {tr.variant for tr in log} == {SKIP_VARIANT, FULL_VARIANT, CANCEL_VARIANT}


def test_config_validation():
    with pytest.raises(ValueError):
        ClaimGenConfig(cases=0)
    with pytest.raises(ValueError):
        ClaimGenConfig(noise_rate=1.0)
    with pytest.raises(ValueError):
        StepGenConfig(())
    with pytest.raises(ValueError):
        StepGenConfig(((("a",), 0),))


def test_step_log_regions():
    regions = parse_regions("A:70,B:30,A:50")
    assert regions == ((("A",), 70), (("B",), 30), (("A",), 50))
    log = generate_step_log(StepGenConfig(regions))
    assert len(log) == 150
    assert [tr.attributes["idx"] for tr in log] == [float(k) for k in range(150)]
    assert [tr.variant for tr in log] == [("A",)] * 70 + [("B",)] * 30 + [("A",)] * 50


def test_step_region_sequences():
    assert parse_regions("a>b>c:3, x:2") == ((("a", "b", "c"), 3), (("x",), 2))
    for bad in ("A", "A:x", ":3", "a>>b:2"):
        with pytest.raises(ValueError):
            parse_regions(bad)


def test_single_region_is_homogeneous():
    log = generate_step_log(StepGenConfig(((("p", "q"), 25),)))
    assert {tr.variant for tr in log} == {("p", "q")}


def test_step_noise_drops_one_event():
    base = ("a", "b", "c", "d")
    log = generate_step_log(StepGenConfig(((base, 400),), noise_rate=0.3, seed=4))
    noisy = [tr.variant for tr in log if tr.variant != base]
    assert 60 < len(noisy) < 180
    assert all(len(v) == 3 and all(x in base for x in v) for v in noisy)
    again = generate_step_log(StepGenConfig(((base, 400),), noise_rate=0.3, seed=4))
    assert csv_bytes(log) == csv_bytes(again)
