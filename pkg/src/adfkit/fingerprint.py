"""Fingerprint construction and dataset shaping.

A device fingerprint is the MD5 digest of the canonical serialization of the
collected attribute values. Samples sharing a digest (within one device
configuration) form a fingerprint group; groups seen at least twice are
labeled unique / non-unique from their advertising-ID sets.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DataError, FingerprintCollisionError, RegistryError
from .registry import CHANNELS, AttributeRegistry

# Canonical serialization constants. The unit separator keeps name=value
# pairs unambiguous; occurrences inside values are escaped so two distinct
# vectors can never serialize to the same string.
SEP = "\x1f"
SEP_ESCAPE = "\\u001f"
MISSING_TOKEN = "∅"  # ∅ — non-reporting itself discriminates configurations


@dataclass(frozen=True)
class DeviceConfig:
    device_type: str  # "mobile" | "desktop"
    os: str
    agent: str  # browser name, or "webview" for apps
    channel: str  # "web" | "app"

    def __post_init__(self) -> None:
        if self.device_type not in ("mobile", "desktop"):
            raise DataError(f"unknown device_type {self.device_type!r}")
        if self.channel not in CHANNELS:
            raise DataError(f"unknown channel {self.channel!r}")
        if self.channel == "app":
            if self.device_type != "mobile" or self.os not in ("Android", "iOS"):
                raise DataError("app channel requires a mobile Android/iOS device")
            if self.agent != "webview":
                raise DataError("app channel agent must be 'webview'")

    def key(self) -> tuple[str, str, str, str]:
        return (self.device_type, self.os, self.agent, self.channel)


# An attribute vector maps attribute name -> value; None is the missing
# marker, and an absent key is equivalent to None.
AttributeVector = Mapping[str, "str | None"]


@dataclass
class Sample:
    sample_id: str
    ts: int
    ad_id: str | None
    config: DeviceConfig
    attributes: dict[str, str | None]
    dnt: bool = False
    complete: bool = True


@dataclass
class FingerprintGroup:
    digest: str
    config: DeviceConfig
    sample_ids: list[str]
    ad_ids: set[str]
    ground_truth_uniqueness: int
    measured_uniqueness: int | None = None
    attributes: dict[str, str | None] = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return len(self.sample_ids)


def canonical_string(attrs: AttributeVector, reg: AttributeRegistry, channel: str) -> str:
    """Serialize an attribute vector deterministically for digesting.

    Pairs are emitted in registry order over the channel's scoped attributes,
    missing values as the dedicated token, so insertion order never matters.
    """
    known = reg.scoped_name_set(channel)
    if not known.issuperset(attrs):
        for key in attrs:
            if key not in known:
                raise RegistryError(f"attribute {key!r} is not scoped for channel {channel!r}")
    get = attrs.get
    parts = []
    for name in reg.scoped_names(channel):
        value = get(name)
        if value is None:
            value = MISSING_TOKEN
        elif SEP in value:
            value = value.replace(SEP, SEP_ESCAPE)
        parts.append(f"{name}={value}")
    return SEP.join(parts)


def make_fingerprint(attrs: AttributeVector, reg: AttributeRegistry, channel: str) -> str:
    """MD5 digest (32 hex chars) of the canonical serialization."""
    return hashlib.md5(canonical_string(attrs, reg, channel).encode("utf-8")).hexdigest()


def filter_raw(samples: Iterable[Sample]) -> list[Sample]:
    """Keep samples with an informed ad-ID, no do-not-track flag, and a
    complete attribute vector. Order is preserved; idempotent."""
    return [s for s in samples if s.ad_id is not None and not s.dnt and s.complete]


def build_fingerprint_dataset(
    samples: Iterable[Sample], reg: AttributeRegistry
) -> list[FingerprintGroup]:
    """Group filtered samples by (digest, configuration) and label uniqueness.

    Groups whose fingerprint appears only once are discarded: a single
    occurrence cannot be judged unique or not. A group is unique (gt=1) iff
    all of its members carry the same advertising ID.
    """
    buckets: dict[tuple[tuple[str, str, str, str], str], list[Sample]] = {}
    canon: dict[tuple[tuple[str, str, str, str], str], str] = {}
    order: list[tuple[tuple[str, str, str, str], str]] = []
    # Repeated impressions of one device share their attribute dict; caching
    # by object identity skips re-serializing them. The cache never outlives
    # this call, so ids stay unambiguous.
    by_dict_id: dict[tuple[int, str], tuple[str, str]] = {}
    for sample in samples:
        cache_key = (id(sample.attributes), sample.config.channel)
        hit = by_dict_id.get(cache_key)
        if hit is None:
            digest_input = canonical_string(sample.attributes, reg, sample.config.channel)
            digest = hashlib.md5(digest_input.encode("utf-8")).hexdigest()
            by_dict_id[cache_key] = (digest_input, digest)
        else:
            digest_input, digest = hit
        key = (sample.config.key(), digest)
        if key in buckets:
            if canon[key] != digest_input:
                raise FingerprintCollisionError(
                    f"digest {digest} has two distinct canonical preimages"
                )
            buckets[key].append(sample)
        else:
            buckets[key] = [sample]
            canon[key] = digest_input
            order.append(key)
    groups = []
    for key in order:
        members = buckets[key]
        if len(members) < 2:
            continue
        ad_ids = {s.ad_id for s in members if s.ad_id is not None}
        groups.append(
            FingerprintGroup(
                digest=key[1],
                config=members[0].config,
                sample_ids=[s.sample_id for s in members],
                ad_ids=ad_ids,
                ground_truth_uniqueness=1 if len(ad_ids) == 1 else 0,
                attributes=dict(members[0].attributes),
            )
        )
    return groups


def count_singletons(samples: Iterable[Sample], reg: AttributeRegistry) -> int:
    """Number of (digest, config) buckets discarded by the two-occurrence rule.

    Reported for transparency alongside fingerprint datasets.
    """
    counts: dict[tuple[tuple[str, str, str, str], str], int] = {}
    for sample in samples:
        digest = make_fingerprint(sample.attributes, reg, sample.config.channel)
        key = (sample.config.key(), digest)
        counts[key] = counts.get(key, 0) + 1
    return sum(1 for n in counts.values() if n == 1)


def apply_blocking(attrs: AttributeVector, policy, reg: AttributeRegistry) -> dict[str, str | None]:
    """Rewrite an attribute vector under a blocking policy.

    ``policy`` needs ``blocked`` (meta-attribute names), ``action``
    ("remove" | "fix-constant") and ``constant``. Every member attribute of a
    blocked meta-attribute is replaced; everything else is untouched.
    """
    member_names: set[str] = set()
    for meta in policy.blocked:
        member_names.update(reg.meta_members(meta))  # raises on unknown meta
    if policy.action == "remove":
        replacement = None
    elif policy.action == "fix-constant":
        replacement = policy.constant if policy.constant is not None else "blocked"
    else:
        raise DataError(f"unknown blocking action {policy.action!r}")
    out = dict(attrs)
    for name in member_names:
        out[name] = replacement
    return out
