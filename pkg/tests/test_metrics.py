import random

import pytest

from adfkit.errors import DataError
from adfkit.fingerprint import DeviceConfig, FingerprintGroup
from adfkit.metrics import (
    ConfigPattern,
    MarketShareTable,
    compare_reports,
    extrapolate,
    read_shares_csv,
    vulnerability,
    vulnerability_by_config,
    write_reports_csv,
)

from conftest import WEB_CFG


def grp(digest, gt, mv, config=WEB_CFG, n=2):
    return FingerprintGroup(
        digest=digest,
        config=config,
        sample_ids=[f"{digest}-{i}" for i in range(n)],
        ad_ids={f"{digest}-a"} if gt else {f"{digest}-a", f"{digest}-b"},
        ground_truth_uniqueness=gt,
        measured_uniqueness=mv,
        attributes={},
    )


def test_vulnerability_hand_count():
    groups = [grp("d1", 1, 1), grp("d2", 1, 0), grp("d3", 0, 0)]
    rep = vulnerability(groups)
    assert rep.n_fingerprints == 3
    assert abs(rep.tv - 2 / 3) < 1e-12
    assert abs(rep.mv - 1 / 3) < 1e-12
    assert abs(rep.accuracy - 2 / 3) < 1e-12


def test_vulnerability_all_unique():
    groups = [grp(f"d{i}", 1, 1) for i in range(5)]
    rep = vulnerability(groups)
    assert rep.tv == rep.mv == rep.accuracy == 1.0


def test_vulnerability_perfect_classifier():
    groups = [grp("d1", 1, 1), grp("d2", 0, 0), grp("d3", 1, 1)]
    rep = vulnerability(groups)
    assert rep.accuracy == 1.0
    assert rep.tv == rep.mv


def test_vulnerability_empty_rejected():
    with pytest.raises(DataError):
        vulnerability([])


def test_vulnerability_needs_measured():
    g = grp("d1", 1, 1)
    g.measured_uniqueness = None
    with pytest.raises(DataError):
        vulnerability([g])


def test_group_duplication_invariance():
    groups = [grp("d1", 1, 1, n=2), grp("d2", 0, 0, n=2)]
    doubled = [grp("d1", 1, 1, n=4), grp("d2", 0, 0, n=4)]
    a, b = vulnerability(groups), vulnerability(doubled)
    assert (a.tv, a.mv) == (b.tv, b.mv)


def test_accuracy_symmetry_under_joint_swap():
    groups = [grp("d1", 1, 0), grp("d2", 0, 1), grp("d3", 1, 1)]
    swapped = [grp("d1", 0, 1), grp("d2", 1, 0), grp("d3", 1, 1)]
    assert vulnerability(groups).accuracy == vulnerability(swapped).accuracy


# --- extrapolate -----------------------------------------------------------------


def report_with_mv(mv, config=WEB_CFG):
    groups = [grp(f"d{i}", 1, 1 if i < round(mv * 100) else 0, config=config) for i in range(100)]
    return vulnerability(groups)


def test_extrapolate_single_config():
    rep = report_with_mv(0.5)
    shares = MarketShareTable(rows=[(ConfigPattern(agent="Chrome"), 1.0)])
    assert abs(extrapolate([rep], shares) - 0.5) < 1e-12


def test_extrapolate_two_configs():
    cfg2 = DeviceConfig("desktop", "macOS", "Safari", "web")
    reps = [report_with_mv(1.0), report_with_mv(0.0, cfg2)]
    shares = MarketShareTable(
        rows=[(ConfigPattern(agent="Chrome"), 0.5), (ConfigPattern(agent="Safari"), 0.5)]
    )
    assert abs(extrapolate(reps, shares) - 0.5) < 1e-12


def test_extrapolate_unmatched_mass_contributes_zero():
    rep = report_with_mv(1.0)
    shares = MarketShareTable(
        rows=[(ConfigPattern(agent="Chrome"), 0.3), (ConfigPattern(agent="Edge"), 0.7)]
    )
    assert abs(extrapolate([rep], shares) - 0.3) < 1e-12


def test_extrapolate_overlapping_patterns_rejected():
    rep = report_with_mv(0.5)
    shares = MarketShareTable(
        rows=[(ConfigPattern(agent="Chrome"), 0.3), (ConfigPattern(os="Windows"), 0.3)]
    )
    with pytest.raises(DataError, match="overlapping"):
        extrapolate([rep], shares)


def test_extrapolate_linear_against_direct_sum():
    rng = random.Random(99)
    agents = [f"agent{i}" for i in range(6)]
    reps = []
    for agent in agents:
        cfg = DeviceConfig("desktop", "OS", agent, "web")
        reps.append(report_with_mv(rng.random(), cfg))
    for _ in range(100):
        rows = [(ConfigPattern(agent=a), rng.random() / len(agents)) for a in agents]
        shares = MarketShareTable(rows=rows)
        direct = sum(share * rep.mv for (_, share), rep in zip(rows, reps))
        assert abs(extrapolate(reps, shares) - direct) < 1e-12


def test_share_table_validation():
    with pytest.raises(DataError):
        MarketShareTable(rows=[(ConfigPattern(device_type="desktop"), 0.7),
                               (ConfigPattern(device_type="desktop"), 0.4)])
    with pytest.raises(DataError):
        MarketShareTable(rows=[(ConfigPattern(), 1.5)])


# --- compare_reports -----------------------------------------------------------------


def test_compare_reduction_is_negative():
    before = report_with_mv(0.5)
    after = report_with_mv(0.5)
    before.tv, after.tv = 0.8, 0.4
    deltas = compare_reports(before, after)
    assert abs(deltas.tv_pct - (-50.0)) < 1e-9


def test_compare_identical_reports_zero():
    rep = report_with_mv(0.4)
    deltas = compare_reports(rep, rep)
    assert deltas.tv_pct == 0.0
    assert deltas.mv_pct == 0.0
    assert deltas.accuracy_pct == 0.0


def test_compare_zero_baseline_undefined():
    before = report_with_mv(0.0)
    after = report_with_mv(0.5)
    before.tv = 0.0
    deltas = compare_reports(before, after)
    assert deltas.tv_pct is None


def test_compare_requires_same_config():
    cfg2 = DeviceConfig("desktop", "macOS", "Safari", "web")
    with pytest.raises(DataError):
        compare_reports(report_with_mv(0.5), report_with_mv(0.5, cfg2))


# --- CSV I/O -----------------------------------------------------------------


def test_reports_csv_and_shares_csv(tmp_path):
    reports = vulnerability_by_config(
        [grp("d1", 1, 1), grp("d2", 0, 0),
         grp("d3", 1, 0, config=DeviceConfig("mobile", "Android", "Chrome", "web")),
         grp("d4", 1, 1, config=DeviceConfig("mobile", "Android", "Chrome", "web"))]
    )
    out = tmp_path / "report.csv"
    write_reports_csv(reports, out)
    text = out.read_text()
    assert "Chrome" in text and "N_f" in text

    shares_path = tmp_path / "shares.csv"
    shares_path.write_text(
        "device_type,os,agent,channel,share\ndesktop,Windows,Chrome,web,0.6\nmobile,,,web,0.4\n"
    )
    shares = read_shares_csv(shares_path)
    assert len(shares.rows) == 2
    value = extrapolate(reports, shares)
    assert 0.0 <= value <= 1.0
