"""Vulnerability and accuracy metrics per device configuration.

TV = N_tf / N_f is the fraction of fingerprint groups whose ground-truth
uniqueness is 1; MV = N_mf / N_f is the same fraction under the classifier's
measured uniqueness; A is the fraction of groups where the two agree.
Counts are over distinct fingerprint groups, not raw samples.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataError
from .fingerprint import DeviceConfig, FingerprintGroup

ConfigKey = tuple[str, str, str, str]


@dataclass
class VulnerabilityReport:
    config: DeviceConfig
    n_fingerprints: int  # N_f: distinct groups
    n_true_unique: int  # N_tf: groups with gt=1
    n_measured_unique: int  # N_mf: groups with mv=1
    tv: float
    mv: float
    accuracy: float
    n_samples: int


def vulnerability(
    groups: Iterable[FingerprintGroup], weight_by_samples: bool = False
) -> VulnerabilityReport:
    """Metrics for the groups of a single device configuration.

    Counts are over distinct fingerprint groups; ``weight_by_samples``
    switches the TV/MV/A fractions to sample weighting (N_f, N_tf, N_mf stay
    group counts either way).
    """
    groups = list(groups)
    if not groups:
        raise DataError("cannot compute vulnerability of an empty group list")
    config = groups[0].config
    for group in groups:
        if group.config != config:
            raise DataError("vulnerability() expects groups of a single configuration")
        if group.measured_uniqueness is None:
            raise DataError(f"group {group.digest} has no measured uniqueness")
    n_f = len(groups)
    n_tf = sum(g.ground_truth_uniqueness for g in groups)
    n_mf = sum(g.measured_uniqueness for g in groups)
    n_samples = sum(g.n_samples for g in groups)
    if weight_by_samples:
        denom = n_samples
        w_tf = sum(g.n_samples * g.ground_truth_uniqueness for g in groups)
        w_mf = sum(g.n_samples * g.measured_uniqueness for g in groups)
        w_ok = sum(
            g.n_samples for g in groups if g.ground_truth_uniqueness == g.measured_uniqueness
        )
    else:
        denom = n_f
        w_tf = n_tf
        w_mf = n_mf
        w_ok = sum(1 for g in groups if g.ground_truth_uniqueness == g.measured_uniqueness)
    return VulnerabilityReport(
        config=config,
        n_fingerprints=n_f,
        n_true_unique=n_tf,
        n_measured_unique=n_mf,
        tv=w_tf / denom,
        mv=w_mf / denom,
        accuracy=w_ok / denom,
        n_samples=n_samples,
    )


def vulnerability_by_config(groups: Iterable[FingerprintGroup]) -> dict[ConfigKey, VulnerabilityReport]:
    by_config: dict[ConfigKey, list[FingerprintGroup]] = {}
    for group in groups:
        by_config.setdefault(group.config.key(), []).append(group)
    return {key: vulnerability(members) for key, members in sorted(by_config.items())}


@dataclass(frozen=True)
class ConfigPattern:
    """Partial device configuration; None fields match anything."""

    device_type: str | None = None
    os: str | None = None
    agent: str | None = None
    channel: str | None = None

    def matches(self, config: DeviceConfig) -> bool:
        return (
            (self.device_type is None or self.device_type == config.device_type)
            and (self.os is None or self.os == config.os)
            and (self.agent is None or self.agent == config.agent)
            and (self.channel is None or self.channel == config.channel)
        )


@dataclass
class MarketShareTable:
    rows: list[tuple[ConfigPattern, float]]

    def __post_init__(self) -> None:
        sums: dict[str, float] = {}
        for pattern, share in self.rows:
            if not 0.0 <= share <= 1.0:
                raise DataError(f"share {share} outside [0, 1]")
            universe = pattern.device_type or "all"
            sums[universe] = sums.get(universe, 0.0) + share
        for universe, total in sums.items():
            if total > 1.0 + 1e-9:
                raise DataError(f"shares for universe {universe!r} sum to {total} > 1")


def extrapolate(
    reports: Mapping[ConfigKey, VulnerabilityReport] | Iterable[VulnerabilityReport],
    shares: MarketShareTable,
) -> float:
    """Market-share weighted MV: sum of share_c * MV_c over matched configs.

    Unmatched share mass contributes zero, giving an "at least" estimate.
    Two share rows matching the same report, or one row matching several
    reports, are ambiguous and rejected.
    """
    if isinstance(reports, Mapping):
        report_list = list(reports.values())
    else:
        report_list = list(reports)
    matched_by: dict[int, list[int]] = {}
    total = 0.0
    for row_idx, (pattern, share) in enumerate(shares.rows):
        hits = [i for i, rep in enumerate(report_list) if pattern.matches(rep.config)]
        if len(hits) > 1:
            raise DataError(f"share pattern {pattern} matches {len(hits)} configurations")
        if not hits:
            continue
        matched_by.setdefault(hits[0], []).append(row_idx)
        total += share * report_list[hits[0]].mv
    for report_idx, row_idxs in matched_by.items():
        if len(row_idxs) > 1:
            raise DataError(
                f"configuration {report_list[report_idx].config} matched by "
                f"{len(row_idxs)} overlapping share patterns"
            )
    return total


# Marker for a percent change whose baseline metric is zero.
UNDEFINED_DELTA = None


@dataclass
class MetricDeltas:
    config: DeviceConfig
    tv_pct: float | None
    mv_pct: float | None
    accuracy_pct: float | None


def _pct_change(before: float, after: float) -> float | None:
    if before == 0.0:
        return UNDEFINED_DELTA
    return (after - before) / before * 100.0


def compare_reports(before: VulnerabilityReport, after: VulnerabilityReport) -> MetricDeltas:
    """Percent change of TV / MV / A relative to ``before``; reductions are
    negative. A zero baseline metric yields the undefined marker."""
    if before.config != after.config:
        raise DataError("compare_reports() expects reports of the same configuration")
    return MetricDeltas(
        config=before.config,
        tv_pct=_pct_change(before.tv, after.tv),
        mv_pct=_pct_change(before.mv, after.mv),
        accuracy_pct=_pct_change(before.accuracy, after.accuracy),
    )


REPORT_CSV_HEADER = [
    "device_type",
    "os",
    "agent",
    "channel",
    "N_f",
    "N_tf",
    "N_mf",
    "TV",
    "MV",
    "A",
    "n_samples",
]


def write_reports_csv(
    reports: Mapping[ConfigKey, VulnerabilityReport], path: str | Path
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_CSV_HEADER)
        for key in sorted(reports):
            rep = reports[key]
            writer.writerow(
                [
                    rep.config.device_type,
                    rep.config.os,
                    rep.config.agent,
                    rep.config.channel,
                    rep.n_fingerprints,
                    rep.n_true_unique,
                    rep.n_measured_unique,
                    f"{rep.tv:.6f}",
                    f"{rep.mv:.6f}",
                    f"{rep.accuracy:.6f}",
                    rep.n_samples,
                ]
            )


def read_shares_csv(path: str | Path) -> MarketShareTable:
    """Share table CSV with columns device_type, os, agent, channel, share;
    empty cells are wildcards."""
    rows: list[tuple[ConfigPattern, float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            pattern = ConfigPattern(
                device_type=rec.get("device_type") or None,
                os=rec.get("os") or None,
                agent=rec.get("agent") or None,
                channel=rec.get("channel") or None,
            )
            rows.append((pattern, float(rec["share"])))
    if not rows:
        raise DataError(f"share table {path} has no rows")
    return MarketShareTable(rows=rows)
