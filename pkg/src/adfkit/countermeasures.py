"""Attribute-blocking countermeasures and their evaluation harness.

The canonical block set is the fixed list of the twelve meta-attributes with
the highest discrimination power that do not affect the browsing experience.
A reusable threshold selector (cardinality > 25, normalized entropy >= 0.10,
with include/exclude overrides) reconstructs the same set from discrimination
statistics. Evaluation re-runs the full pipeline — re-fingerprint, re-group,
re-label, re-train with the same seed — on blocked attribute vectors and
reports vulnerability deltas per configuration.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .classifier import Hyperparams, train
from .classifier.training import assign_measured_uniqueness
from .errors import DataError, PolicyError
from .fingerprint import FingerprintGroup, Sample, apply_blocking, build_fingerprint_dataset
from .metrics import ConfigKey, MetricDeltas, VulnerabilityReport, compare_reports, vulnerability_by_config
from .registry import AttributeRegistry
from .stats import StatsReport

# The fixed block set: highest cardinality/entropy attributes whose removal
# does not affect page rendering.
SHIELDF_BLOCK_SET = (
    "CPU cores",
    "Device memory",
    "Media devices",
    "Languages",
    "User Permissions state",
    "Storage: quota",
    "navigator properties",
    "Canvas",
    "Fonts",
    "Bluetooth availability",
    "WebGL Extensions",
    "WebGL (Rend - Param)",
)

# Already unreported inside app webviews, so the app policy drops them.
SHIELDF_APP_EXEMPT = ("User Permissions state", "Bluetooth availability")

# Threshold selector defaults that reproduce the fixed block set on the
# reference discrimination table:
#  - include: high-value attributes kept despite low cardinality (CPU cores
#    and Device memory are coarse; Bluetooth availability is binary).
#  - exclude: attributes that pass the thresholds but are needed for correct
#    page rendering or are too visible to spoof (user agent, screen
#    geometry) plus audio latency, which breaks timing-sensitive pages.
SHIELDF_INCLUDE_OVERRIDES = frozenset(
    {"CPU cores", "Device memory", "Bluetooth availability"}
)
SHIELDF_EXCLUDE_OVERRIDES = frozenset(
    {
        "UserAgent",
        "Screen: pixel left",
        "available height",
        "available left",
        "available top",
        "available width",
        "Audio cxt: base latency",
    }
)


@dataclass
class BlockingPolicy:
    name: str
    blocked: set[str]
    action: str = "remove"  # "remove" | "fix-constant"
    constant: str | None = None
    provenance: str = "user-mask"  # "shieldf-table" | "threshold-selector" | "user-mask"

    def __post_init__(self) -> None:
        if self.action not in ("remove", "fix-constant"):
            raise PolicyError(f"unknown blocking action {self.action!r}")
        if not self.blocked and self.name != "identity":
            raise PolicyError("a non-identity policy must block at least one attribute")


def identity_policy() -> BlockingPolicy:
    return BlockingPolicy(name="identity", blocked=set(), provenance="user-mask")


@dataclass
class SelectorConfig:
    cardinality_min: int = 25  # strict >
    entropy_min: float = 0.10  # inclusive >=
    include_overrides: set[str] = field(default_factory=set)
    exclude_overrides: set[str] = field(default_factory=set)

    def __post_init__(self) -> None:
        overlap = self.include_overrides & self.exclude_overrides
        if overlap:
            raise PolicyError(f"overrides overlap on {sorted(overlap)}")


def shieldf_selector_config() -> SelectorConfig:
    """Selector defaults documented to reproduce the fixed block set."""
    return SelectorConfig(
        include_overrides=set(SHIELDF_INCLUDE_OVERRIDES),
        exclude_overrides=set(SHIELDF_EXCLUDE_OVERRIDES),
    )


def select_blockset(stats: StatsReport, cfg: SelectorConfig | None = None) -> BlockingPolicy:
    """Threshold rule: block meta-attributes exceeding both thresholds in at
    least one configuration, then apply the include/exclude overrides."""
    if not stats.rows:
        raise DataError("empty stats report")
    cfg = cfg or SelectorConfig()
    passing = {
        row.meta_attribute
        for row in stats.rows
        if row.reported
        and row.cardinality > cfg.cardinality_min
        and row.normalized_entropy >= cfg.entropy_min
    }
    blocked = (passing | cfg.include_overrides) - cfg.exclude_overrides
    return BlockingPolicy(
        # An empty selection blocks nothing, which is the identity policy.
        name="threshold-selection" if blocked else "identity",
        blocked=blocked,
        action="remove",
        provenance="threshold-selector",
    )


def shieldf_policy(reg: AttributeRegistry, channel: str = "web") -> BlockingPolicy:
    """The canonical block set (twelve attributes; ten on the app channel)."""
    missing = [meta for meta in SHIELDF_BLOCK_SET if meta not in reg.meta_groups]
    if missing:
        raise PolicyError(f"registry lacks block-set meta-attributes: {missing}")
    blocked = set(SHIELDF_BLOCK_SET)
    if channel == "app":
        blocked -= set(SHIELDF_APP_EXEMPT)
    return BlockingPolicy(
        name="shieldf",
        blocked=blocked,
        action="remove",
        provenance="shieldf-table",
    )


def blocked_samples(
    samples: Sequence[Sample], policy: BlockingPolicy, reg: AttributeRegistry
) -> list[Sample]:
    """Apply a policy to every sample. Devices repeat attribute dicts across
    impressions, so rewritten vectors are cached per source dict."""
    cache: dict[int, dict[str, str | None]] = {}
    out = []
    for sample in samples:
        key = id(sample.attributes)
        attrs = cache.get(key)
        if attrs is None:
            attrs = apply_blocking(sample.attributes, policy, reg)
            cache[key] = attrs
        out.append(
            Sample(
                sample_id=sample.sample_id,
                ts=sample.ts,
                ad_id=sample.ad_id,
                config=sample.config,
                attributes=attrs,
                dnt=sample.dnt,
                complete=sample.complete,
            )
        )
    return out


@dataclass
class CountermeasureResult:
    policy: BlockingPolicy
    before: dict[ConfigKey, VulnerabilityReport]
    after: dict[ConfigKey, VulnerabilityReport]
    deltas: dict[ConfigKey, MetricDeltas]


def _pipeline(
    samples: Sequence[Sample],
    reg: AttributeRegistry,
    channel: str,
    params: Hyperparams,
    k_folds: int,
    seed: int,
) -> tuple[list[FingerprintGroup], dict[ConfigKey, VulnerabilityReport]]:
    groups = build_fingerprint_dataset(samples, reg)
    groups = [g for g in groups if g.config.channel == channel]
    if not groups:
        raise DataError(f"no fingerprint groups for channel {channel!r}")
    clf = train(groups, reg, channel, params, k_folds=k_folds, seed=seed)
    assign_measured_uniqueness(groups, clf)
    return groups, vulnerability_by_config(groups)


def evaluate_countermeasure(
    samples: Sequence[Sample],
    policy: BlockingPolicy,
    reg: AttributeRegistry,
    channel: str = "web",
    hyperparams: Hyperparams | None = None,
    k_folds: int = 5,
    seed: int = 0,
    baseline: tuple[list[FingerprintGroup], dict[ConfigKey, VulnerabilityReport]] | None = None,
) -> CountermeasureResult:
    """Before/after vulnerability under a blocking policy.

    ``samples`` must already have passed the raw filter. The after side
    re-runs the entire pipeline from scratch with the same seed and
    hyperparameters, so the only difference is the policy.
    """
    params = hyperparams or Hyperparams()
    samples = [s for s in samples if s.config.channel == channel]
    if baseline is None:
        baseline = _pipeline(samples, reg, channel, params, k_folds, seed)
    before_groups, before = baseline
    after_groups, after = _pipeline(
        blocked_samples(samples, policy, reg), reg, channel, params, k_folds, seed
    )

    # Blocking only coarsens the partition, so true uniqueness cannot grow.
    before_tf = {key: rep.n_true_unique for key, rep in before.items()}
    for key, rep in after.items():
        if key in before_tf and rep.n_true_unique > before_tf[key]:
            raise DataError(
                f"coarsening violated for {key}: N_tf {before_tf[key]} -> {rep.n_true_unique}"
            )

    deltas = {
        key: compare_reports(before[key], after[key])
        for key in sorted(before)
        if key in after
    }
    return CountermeasureResult(policy=policy, before=before, after=after, deltas=deltas)


def benchmark_masks(
    samples: Sequence[Sample],
    policies: Sequence[BlockingPolicy],
    reg: AttributeRegistry,
    channel: str = "web",
    hyperparams: Hyperparams | None = None,
    k_folds: int = 5,
    seed: int = 0,
) -> list[dict]:
    """One evaluation per policy against a shared baseline; returns flat rows
    (policy, config, TV, MV, A, deltas in percent)."""
    if not policies:
        raise DataError("benchmark needs at least one policy")
    params = hyperparams or Hyperparams()
    scoped = [s for s in samples if s.config.channel == channel]
    baseline = _pipeline(scoped, reg, channel, params, k_folds, seed)
    rows = []
    for policy in policies:
        result = evaluate_countermeasure(
            scoped, policy, reg, channel, params, k_folds, seed, baseline=baseline
        )
        for key in sorted(result.after):
            rep = result.after[key]
            delta = result.deltas.get(key)
            rows.append(
                {
                    "policy": policy.name,
                    "device_type": rep.config.device_type,
                    "os": rep.config.os,
                    "agent": rep.config.agent,
                    "channel": rep.config.channel,
                    "TV": rep.tv,
                    "MV": rep.mv,
                    "A": rep.accuracy,
                    "dTV_pct": None if delta is None else delta.tv_pct,
                    "dMV_pct": None if delta is None else delta.mv_pct,
                    "dA_pct": None if delta is None else delta.accuracy_pct,
                }
            )
    return rows


def policy_to_json(policy: BlockingPolicy) -> str:
    doc = {
        "name": policy.name,
        "blocked": sorted(policy.blocked),
        "action": policy.action,
        "provenance": policy.provenance,
    }
    if policy.constant is not None:
        doc["constant"] = policy.constant
    return json.dumps(doc, indent=2)


def policy_from_json(path_or_text: str | Path) -> BlockingPolicy:
    text = path_or_text
    if isinstance(path_or_text, Path) or (
        isinstance(path_or_text, str) and not path_or_text.lstrip().startswith("{")
    ):
        text = Path(path_or_text).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolicyError(f"malformed policy JSON: {exc}") from exc
    try:
        return BlockingPolicy(
            name=doc["name"],
            blocked=set(doc["blocked"]),
            action=doc.get("action", "remove"),
            constant=doc.get("constant"),
            provenance=doc.get("provenance", "user-mask"),
        )
    except KeyError as exc:
        raise PolicyError(f"policy JSON missing field {exc}") from exc
