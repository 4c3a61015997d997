"""Per-attribute discrimination statistics.

For every (meta-attribute, device configuration) pair observed in a
fingerprint dataset we report whether the attribute is reported at all, its
cardinality |S|, Shannon entropy H (bits) and normalized entropy h = H /
log2(M). These three factors together define an attribute's power to
discriminate devices.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataError
from .fingerprint import SEP, DeviceConfig, FingerprintGroup
from .registry import AttributeRegistry, scoped_meta_attributes


def shannon_entropy(counts: Mapping[str, int]) -> float:
    """H = -sum p_i log2 p_i over the count distribution, in bits."""
    if not counts:
        raise DataError("entropy of an empty distribution is undefined")
    total = 0
    for value, count in counts.items():
        if count <= 0:
            raise DataError(f"non-positive count for value {value!r}")
        total += count
    h = 0.0
    for count in counts.values():
        p = count / total
        h -= p * math.log2(p)
    return h


def normalized_entropy(counts: Mapping[str, int]) -> float:
    """H / log2(M) with M distinct values; 0 by convention when M = 1."""
    if not counts:
        raise DataError("entropy of an empty distribution is undefined")
    m = len(counts)
    if m == 1:
        # log2(1) = 0 would make this 0/0; a single-valued attribute carries
        # no discrimination power, so h is declared 0.
        next(iter(counts.values()))  # still validate positivity
        return 0.0
    return shannon_entropy(counts) / math.log2(m)


def meta_value_from_members(
    attrs: Mapping[str, str | None], members: list[str]
) -> str | None:
    from .fingerprint import MISSING_TOKEN

    values = [attrs.get(name) for name in members]
    if all(v is None for v in values):
        return None
    if len(values) == 1:
        return values[0]
    return SEP.join(MISSING_TOKEN if v is None else v for v in values)


def meta_value(attrs: Mapping[str, str | None], meta: str, reg: AttributeRegistry) -> str | None:
    """Concatenated member values of a meta-attribute, in registry order.

    Missing iff every member is missing; otherwise missing members serialize
    with the missing token inside the concatenation.
    """
    return meta_value_from_members(attrs, reg.meta_members(meta))


@dataclass
class AttributeStats:
    meta_attribute: str
    config: DeviceConfig
    reported: bool
    cardinality: int
    entropy_bits: float
    normalized_entropy: float
    n_observations: int


@dataclass
class StatsReport:
    rows: list[AttributeStats]
    reported_count_per_config: dict[tuple[str, str, str, str], int] = field(default_factory=dict)

    def row_for(self, meta: str, config_key: tuple[str, str, str, str]) -> AttributeStats:
        for row in self.rows:
            if row.meta_attribute == meta and row.config.key() == config_key:
                return row
        raise DataError(f"no stats row for {meta!r} / {config_key}")


def compute_stats(
    groups: Iterable[FingerprintGroup],
    reg: AttributeRegistry,
    weight_by_samples: bool = False,
) -> StatsReport:
    """Tabulate reported / |S| / H / h per meta-attribute and configuration.

    Observations are the meta-attribute values of distinct fingerprint groups
    (``weight_by_samples`` switches to weighting each group by its sample
    count). Missing values are excluded from the counts; a never-reported
    attribute gets reported=False with zero cardinality and entropy.
    """
    groups = list(groups)
    if not groups:
        raise DataError("cannot compute stats for an empty group list")
    by_config: dict[tuple[str, str, str, str], list[FingerprintGroup]] = {}
    config_obj: dict[tuple[str, str, str, str], DeviceConfig] = {}
    for group in groups:
        by_config.setdefault(group.config.key(), []).append(group)
        config_obj.setdefault(group.config.key(), group.config)

    rows = []
    reported_count: dict[tuple[str, str, str, str], int] = {}
    for key in by_config:
        config = config_obj[key]
        metas = scoped_meta_attributes(reg, config.channel)
        n_reported = 0
        for meta in metas:
            counts: dict[str, int] = {}
            n_obs = 0
            for group in by_config[key]:
                value = meta_value(group.attributes, meta, reg)
                if value is None:
                    continue
                weight = group.n_samples if weight_by_samples else 1
                counts[value] = counts.get(value, 0) + weight
                n_obs += weight
            if counts:
                n_reported += 1
                rows.append(
                    AttributeStats(
                        meta_attribute=meta,
                        config=config,
                        reported=True,
                        cardinality=len(counts),
                        entropy_bits=shannon_entropy(counts),
                        normalized_entropy=normalized_entropy(counts),
                        n_observations=n_obs,
                    )
                )
            else:
                rows.append(
                    AttributeStats(
                        meta_attribute=meta,
                        config=config,
                        reported=False,
                        cardinality=0,
                        entropy_bits=0.0,
                        normalized_entropy=0.0,
                        n_observations=0,
                    )
                )
        reported_count[key] = n_reported
    return StatsReport(rows=rows, reported_count_per_config=reported_count)


STATS_CSV_HEADER = [
    "meta_attribute",
    "device_type",
    "os",
    "agent",
    "channel",
    "reported",
    "S",
    "H_bits",
    "h",
    "n_obs",
]


def write_stats_csv(report: StatsReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATS_CSV_HEADER)
        for row in report.rows:
            writer.writerow(
                [
                    row.meta_attribute,
                    row.config.device_type,
                    row.config.os,
                    row.config.agent,
                    row.config.channel,
                    int(row.reported),
                    row.cardinality,
                    f"{row.entropy_bits:.6f}",
                    f"{row.normalized_entropy:.6f}",
                    row.n_observations,
                ]
            )


def read_stats_csv(path: str | Path) -> StatsReport:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            config = DeviceConfig(
                device_type=rec["device_type"],
                os=rec["os"],
                agent=rec["agent"],
                channel=rec["channel"],
            )
            rows.append(
                AttributeStats(
                    meta_attribute=rec["meta_attribute"],
                    config=config,
                    reported=rec["reported"] not in ("0", "", "False", "false"),
                    cardinality=int(rec["S"] or 0),
                    entropy_bits=float(rec["H_bits"] or 0.0),
                    normalized_entropy=float(rec["h"] or 0.0),
                    n_observations=int(rec["n_obs"] or 0),
                )
            )
    if not rows:
        raise DataError(f"stats file {path} has no rows")
    reported_count: dict[tuple[str, str, str, str], int] = {}
    for row in rows:
        if row.reported:
            key = row.config.key()
            reported_count[key] = reported_count.get(key, 0) + 1
    return StatsReport(rows=rows, reported_count_per_config=reported_count)
