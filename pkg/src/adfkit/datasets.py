"""JSON Lines readers/writers for raw samples and fingerprint datasets."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .errors import DataError
from .fingerprint import DeviceConfig, FingerprintGroup, Sample
from .registry import AttributeRegistry, scoped_attributes


def sample_to_dict(sample: Sample) -> dict:
    return {
        "sample_id": sample.sample_id,
        "ts": sample.ts,
        "ad_id": sample.ad_id,
        "device_type": sample.config.device_type,
        "os": sample.config.os,
        "agent": sample.config.agent,
        "channel": sample.config.channel,
        "dnt": sample.dnt,
        "attributes": sample.attributes,
    }


def sample_from_dict(row: dict, reg: AttributeRegistry) -> Sample:
    try:
        config = DeviceConfig(
            device_type=row["device_type"],
            os=row["os"],
            agent=row["agent"],
            channel=row["channel"],
        )
        attributes = dict(row["attributes"])
    except KeyError as exc:
        raise DataError(f"sample row missing field {exc}") from exc
    # Completeness is derived: every scoped attribute must be present as a
    # key, possibly with an explicit null value.
    scoped = scoped_attributes(reg, config.channel)
    complete = all(name in attributes for name in scoped)
    return Sample(
        sample_id=str(row["sample_id"]),
        ts=int(row["ts"]),
        ad_id=row.get("ad_id"),
        config=config,
        attributes=attributes,
        dnt=bool(row.get("dnt", False)),
        complete=complete,
    )


def write_samples_jsonl(samples: Iterable[Sample], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(json.dumps(sample_to_dict(sample), ensure_ascii=False))
            fh.write("\n")
            n += 1
    return n


def read_samples_jsonl(path: str | Path, reg: AttributeRegistry) -> list[Sample]:
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            samples.append(sample_from_dict(row, reg))
    seen: set[str] = set()
    for sample in samples:
        if sample.sample_id in seen:
            raise DataError(f"duplicate sample_id {sample.sample_id!r} in {path}")
        seen.add(sample.sample_id)
    return samples


def group_to_dict(group: FingerprintGroup) -> dict:
    return {
        "digest": group.digest,
        "config": {
            "device_type": group.config.device_type,
            "os": group.config.os,
            "agent": group.config.agent,
            "channel": group.config.channel,
        },
        "n_samples": group.n_samples,
        "sample_ids": group.sample_ids,
        "n_ad_ids": len(group.ad_ids),
        "gt": group.ground_truth_uniqueness,
        "mv": group.measured_uniqueness,
        "attributes": group.attributes,
    }


def group_from_dict(row: dict) -> FingerprintGroup:
    cfg = row["config"]
    config = DeviceConfig(cfg["device_type"], cfg["os"], cfg["agent"], cfg["channel"])
    sample_ids = row.get("sample_ids") or [f"{row['digest']}#{i}" for i in range(row["n_samples"])]
    n_ad_ids = int(row["n_ad_ids"])
    # Ad-ID values are not persisted, only their count; synthesize opaque
    # placeholders so the gt invariant (gt=1 iff one ad-ID) stays checkable.
    ad_ids = {f"{row['digest']}@{i}" for i in range(n_ad_ids)}
    return FingerprintGroup(
        digest=row["digest"],
        config=config,
        sample_ids=list(sample_ids),
        ad_ids=ad_ids,
        ground_truth_uniqueness=int(row["gt"]),
        measured_uniqueness=None if row.get("mv") is None else int(row["mv"]),
        attributes=dict(row["attributes"]),
    )


def write_groups_jsonl(groups: Iterable[FingerprintGroup], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for group in groups:
            fh.write(json.dumps(group_to_dict(group), ensure_ascii=False))
            fh.write("\n")
            n += 1
    return n


def read_groups_jsonl(path: str | Path) -> list[FingerprintGroup]:
    groups = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                groups.append(group_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: bad group row: {exc}") from exc
    return groups
