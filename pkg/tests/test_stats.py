import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adfkit.errors import DataError
from adfkit.fingerprint import SEP, FingerprintGroup, MISSING_TOKEN
from adfkit.stats import (
    compute_stats,
    meta_value,
    normalized_entropy,
    read_stats_csv,
    shannon_entropy,
    write_stats_csv,
)

from conftest import WEB_CFG, toy_registry


def brute_entropy(counts):
    """Independent direct summation of the entropy definition."""
    total = sum(counts.values())
    h = 0.0
    for c in counts.values():
        p = c / total
        h += -p * math.log(p, 2)
    return h


def test_entropy_single_value():
    assert shannon_entropy({"v": 10}) == 0.0


def test_entropy_uniform_four():
    assert abs(shannon_entropy({f"v{i}": 3 for i in range(4)}) - 2.0) < 1e-12


def test_entropy_hand_evaluated():
    # p = 0.5, 0.25, 0.25
    assert abs(shannon_entropy({"a": 8, "b": 4, "c": 4}) - 1.5) < 1e-12


def test_entropy_empty_and_nonpositive():
    with pytest.raises(DataError):
        shannon_entropy({})
    with pytest.raises(DataError):
        shannon_entropy({"a": 0})


def test_normalized_uniform_is_one():
    for m in (2, 3, 7, 50):
        counts = {f"v{i}": 5 for i in range(m)}
        assert abs(normalized_entropy(counts) - 1.0) < 1e-12


def test_normalized_single_value_declared_zero():
    assert normalized_entropy({"v": 99}) == 0.0


def test_normalized_hand_evaluated():
    expected = 1.5 / math.log2(3)
    assert abs(normalized_entropy({"a": 8, "b": 4, "c": 4}) - expected) < 1e-9
    assert abs(expected - 0.9463946) < 1e-6


def test_entropy_against_brute_force_oracle():
    rng = random.Random(123)
    for _ in range(300):
        m = rng.randint(1, 60)
        counts = {f"v{i}": rng.randint(1, 500) for i in range(m)}
        assert abs(shannon_entropy(counts) - brute_entropy(counts)) < 1e-9
        expected_h = 0.0 if m == 1 else brute_entropy(counts) / math.log2(m)
        assert abs(normalized_entropy(counts) - expected_h) < 1e-9


@given(st.dictionaries(st.text(min_size=1, max_size=4), st.integers(1, 1000), min_size=1, max_size=40))
@settings(max_examples=200, deadline=None)
def test_entropy_properties(counts):
    h = shannon_entropy(counts)
    m = len(counts)
    assert -1e-12 <= h <= math.log2(m) + 1e-12
    hn = normalized_entropy(counts)
    assert -1e-12 <= hn <= 1.0 + 1e-12
    # scale invariance
    scaled = {k: v * 7 for k, v in counts.items()}
    assert abs(shannon_entropy(scaled) - h) < 1e-9


def test_permutation_invariance():
    counts = {"a": 3, "b": 9, "c": 1}
    shuffled = dict(sorted(counts.items(), reverse=True))
    assert shannon_entropy(counts) == shannon_entropy(shuffled)


def test_new_value_increases_cardinality():
    counts = {"a": 5, "b": 2}
    bigger = dict(counts)
    bigger["never-seen"] = 1
    assert len(bigger) == len(counts) + 1


# --- meta_value ---------------------------------------------------------------


META_REG = toy_registry(("m1", "m2", "solo"), metas={"m1": "pair", "m2": "pair"})


def test_meta_value_single_member():
    assert meta_value({"solo": "x"}, "solo", META_REG) == "x"


def test_meta_value_partial_missing():
    assert meta_value({"m1": "a", "m2": None}, "pair", META_REG) == f"a{SEP}{MISSING_TOKEN}"


def test_meta_value_all_missing():
    assert meta_value({"m1": None, "m2": None}, "pair", META_REG) is None


def test_meta_value_unknown_meta():
    with pytest.raises(Exception):
        meta_value({}, "nope", META_REG)


# --- compute_stats ---------------------------------------------------------------


def grp(digest, attrs, config=WEB_CFG, n=2, gt=1):
    return FingerprintGroup(
        digest=digest,
        config=config,
        sample_ids=[f"{digest}-{i}" for i in range(n)],
        ad_ids={f"{digest}-ad"},
        ground_truth_uniqueness=gt,
        attributes=dict(attrs),
    )


def test_compute_stats_basic():
    reg = toy_registry(("Fonts", "other"))
    groups = [
        grp("d1", {"Fonts": "f1", "other": "o"}),
        grp("d2", {"Fonts": "f1", "other": "o"}),
        grp("d3", {"Fonts": "f2", "other": "o"}),
        grp("d4", {"Fonts": "f2", "other": "o"}),
    ]
    report = compute_stats(groups, reg)
    fonts = report.row_for("Fonts", WEB_CFG.key())
    assert fonts.cardinality == 2
    assert abs(fonts.normalized_entropy - 1.0) < 1e-12
    assert report.reported_count_per_config[WEB_CFG.key()] == 2


def test_compute_stats_unreported_meta():
    reg = toy_registry(("Fonts", "ghost"))
    groups = [grp("d1", {"Fonts": "f1", "ghost": None}), grp("d2", {"Fonts": "f2", "ghost": None})]
    report = compute_stats(groups, reg)
    ghost = report.row_for("ghost", WEB_CFG.key())
    assert not ghost.reported
    assert ghost.cardinality == 0
    assert ghost.normalized_entropy == 0.0
    assert report.reported_count_per_config[WEB_CFG.key()] == 1


def test_compute_stats_group_vs_sample_weighting():
    reg = toy_registry(("Fonts",))
    groups = [
        grp("d1", {"Fonts": "f1"}, n=10),
        grp("d2", {"Fonts": "f2"}, n=2),
    ]
    by_group = compute_stats(groups, reg).row_for("Fonts", WEB_CFG.key())
    by_sample = compute_stats(groups, reg, weight_by_samples=True).row_for("Fonts", WEB_CFG.key())
    assert abs(by_group.normalized_entropy - 1.0) < 1e-12  # 1 vs 1 observation
    assert by_sample.normalized_entropy < 1.0  # 10 vs 2 observations
    assert by_sample.n_observations == 12


def test_compute_stats_empty_rejected():
    reg = toy_registry(("a",))
    with pytest.raises(DataError):
        compute_stats([], reg)


def test_stats_csv_roundtrip(tmp_path):
    reg = toy_registry(("Fonts", "ghost"))
    groups = [grp("d1", {"Fonts": "f1"}), grp("d2", {"Fonts": "f2"})]
    report = compute_stats(groups, reg)
    path = tmp_path / "stats.csv"
    write_stats_csv(report, path)
    back = read_stats_csv(path)
    row = back.row_for("Fonts", WEB_CFG.key())
    assert row.cardinality == 2
    assert abs(row.normalized_entropy - 1.0) < 1e-6
