"""Synthetic population generator with known ground truth.

Generates desk-scale device populations whose attribute values follow
per-meta-attribute distributions with a target support size and normalized
entropy. Devices keep their attribute values fixed across impressions, so
fingerprints repeat per device and uniqueness labels are known exactly.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .fingerprint import DeviceConfig, Sample
from .metrics import ConfigKey, ConfigPattern
from .registry import AttributeRegistry, scoped_attributes, scoped_meta_attributes
from .stats import normalized_entropy


def solve_distribution(m: int, target_h: float) -> np.ndarray:
    """Probability vector of length ``m`` with normalized entropy target_h.

    Uses the one-dominant-value family p = (q, (1-q)/(m-1), ...): q = 1/m is
    the uniform distribution (h = 1) and q -> 1 is degenerate (h -> 0), so a
    bisection on q spans every target in [0, 1].
    """
    if m < 1:
        raise DataError(f"support size must be >= 1, got {m}")
    if not 0.0 <= target_h <= 1.0:
        raise DataError(f"target normalized entropy {target_h} outside [0, 1]")
    if m == 1:
        return np.array([1.0])
    if target_h >= 1.0:
        return np.full(m, 1.0 / m)
    if target_h <= 0.0:
        vec = np.zeros(m)
        vec[0] = 1.0
        return vec

    log2_m = math.log2(m)

    def h_of(q: float) -> float:
        rest = (1.0 - q) / (m - 1)
        h = -q * math.log2(q)
        if rest > 0.0:
            h -= (m - 1) * rest * math.log2(rest)
        return h / log2_m

    lo, hi = 1.0 / m, 1.0 - 1e-15  # h(lo) = 1, h(hi) ~ 0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if h_of(mid) > target_h:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    q = (lo + hi) / 2.0
    if abs(h_of(q) - target_h) > 1e-6:
        raise DataError(f"bisection failed for (m={m}, h={target_h})")
    vec = np.full(m, (1.0 - q) / (m - 1))
    vec[0] = q
    return vec


@dataclass
class DistOverride:
    support_size: int | None = None
    target_h: float | None = None
    report_prob: float | None = None


@dataclass
class AttributeDistSpec:
    meta_attribute: str
    support_size: int
    target_h: float
    report_prob: float = 1.0
    per_config: list[tuple[ConfigPattern, DistOverride]] = field(default_factory=list)

    def resolved(self, config: DeviceConfig) -> tuple[int, float, float]:
        m, h, r = self.support_size, self.target_h, self.report_prob
        for pattern, override in self.per_config:
            if pattern.matches(config):
                if override.support_size is not None:
                    m = override.support_size
                if override.target_h is not None:
                    h = override.target_h
                if override.report_prob is not None:
                    r = override.report_prob
                break
        return m, h, r


@dataclass
class ImpressionsSpec:
    kind: str = "geometric"  # "geometric" | "fixed"
    mean: float = 3.0
    n: int = 2

    def draw(self, rng: np.random.Generator, n_devices: int) -> np.ndarray:
        if self.kind == "geometric":
            if self.mean < 1.0:
                raise DataError("geometric impressions need mean >= 1")
            return rng.geometric(1.0 / self.mean, size=n_devices)
        if self.kind == "fixed":
            return np.full(n_devices, self.n, dtype=np.int64)
        raise DataError(f"unknown impressions kind {self.kind!r}")


@dataclass
class PopulationSpec:
    n_devices: int
    config_shares: list[tuple[DeviceConfig, float]]
    impressions: ImpressionsSpec = field(default_factory=ImpressionsSpec)
    ad_id_report_rate: float = 1.0
    loss_rate: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_devices < 1:
            raise DataError("n_devices must be >= 1")
        if not self.config_shares:
            raise DataError("config_shares must be non-empty")
        for _, share in self.config_shares:
            if share < 0:
                raise DataError("config shares must be non-negative")
        if sum(s for _, s in self.config_shares) <= 0:
            raise DataError("config shares must not all be zero")
        for name in ("ad_id_report_rate", "loss_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DataError(f"{name} {value} outside [0, 1]")


def _value_token(meta: str, index: int) -> str:
    slug = meta.lower().replace(" ", "_")
    return f"{slug}.{index}"


def generate(
    spec: PopulationSpec,
    dists: Sequence[AttributeDistSpec],
    reg: AttributeRegistry,
) -> list[Sample]:
    """Draw a sample stream for the population, deterministic under the seed.

    Device order, then impression order, fixes both the RNG consumption and
    the output order. Each device draws one value per meta-attribute (or
    none, per report probability) and repeats it across its impressions.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)

    configs = [c for c, _ in spec.config_shares]
    shares = np.array([s for _, s in spec.config_shares], dtype=float)
    shares = shares / shares.sum()
    config_idx = rng.choice(len(configs), size=spec.n_devices, p=shares)

    dist_by_meta = {d.meta_attribute: d for d in dists}
    # Per config, the metas in channel scope, in registry order.
    metas_per_config = [scoped_meta_attributes(reg, c.channel) for c in configs]
    for metas in metas_per_config:
        for meta in metas:
            if meta not in dist_by_meta:
                raise DataError(f"no distribution spec for meta-attribute {meta!r}")

    n = spec.n_devices
    # meta -> array of value tokens (or None) per device
    values: dict[str, list[str | None]] = {}
    all_metas: list[str] = []
    for metas in metas_per_config:
        for meta in metas:
            if meta not in values:
                values[meta] = [None] * n
                all_metas.append(meta)

    for meta in all_metas:
        dist = dist_by_meta[meta]
        for ci, config in enumerate(configs):
            if meta not in metas_per_config[ci]:
                continue
            device_rows = np.nonzero(config_idx == ci)[0]
            if device_rows.size == 0:
                continue
            m, target_h, report_prob = dist.resolved(config)
            pvec = solve_distribution(m, target_h)
            draws = rng.choice(m, size=device_rows.size, p=pvec)
            reported = rng.random(device_rows.size) < report_prob
            col = values[meta]
            for pos, device in enumerate(device_rows):
                if reported[pos]:
                    col[device] = _value_token(meta, int(draws[pos]))

    impressions = spec.impressions.draw(rng, n)

    # Materialize one attribute dict per device; impressions share it.
    member_lists = {meta: reg.meta_members(meta) for meta in all_metas}
    device_attrs: list[dict[str, str | None]] = []
    scoped_cache: dict[str, list[str]] = {}
    for device in range(n):
        config = configs[config_idx[device]]
        metas = metas_per_config[config_idx[device]]
        attrs: dict[str, str | None] = {}
        channel = config.channel
        if channel not in scoped_cache:
            scoped_cache[channel] = scoped_attributes(reg, channel)
        for name in scoped_cache[channel]:
            attrs[name] = None
        for meta in metas:
            token = values[meta][device]
            if token is None:
                continue
            for member in member_lists[meta]:
                if member in attrs:
                    attrs[member] = token
        device_attrs.append(attrs)

    samples: list[Sample] = []
    counter = 0
    base_ts = 1_700_000_000
    for device in range(n):
        config = configs[config_idx[device]]
        ad_id = f"ad-{device:08d}"
        k = int(impressions[device])
        reported = rng.random(k) < spec.ad_id_report_rate
        kept = rng.random(k) >= spec.loss_rate
        for imp in range(k):
            if not kept[imp]:
                continue
            samples.append(
                Sample(
                    sample_id=f"s{counter:08d}",
                    ts=base_ts + counter,
                    ad_id=ad_id if reported[imp] else None,
                    config=config,
                    attributes=device_attrs[device],
                    dnt=False,
                    complete=True,
                )
            )
            counter += 1
    return samples


def oracle_uniqueness(samples: Iterable[Sample]) -> dict[tuple[ConfigKey, str], int]:
    """Brute-force uniqueness labels, independent of the digest pipeline.

    Groups samples by their raw attribute items (missing keys and explicit
    missing markers unified) within each configuration; a group is unique iff
    its advertising IDs are all equal. Singleton groups are included; the
    fingerprint dataset simply never asks about them.
    """
    buckets: dict[tuple[ConfigKey, tuple], set[str]] = {}
    for sample in samples:
        if sample.ad_id is None:
            raise DataError("oracle needs samples with advertising IDs")
        vector = tuple(sorted((k, v) for k, v in sample.attributes.items() if v is not None))
        buckets.setdefault((sample.config.key(), vector), set()).add(sample.ad_id)
    out: dict[tuple[ConfigKey, str], int] = {}
    for (config_key, vector), ad_ids in buckets.items():
        digest = hashlib.md5(repr(vector).encode("utf-8")).hexdigest()
        out[(config_key, digest)] = 1 if len(ad_ids) == 1 else 0
    return out


def oracle_labels_by_vector(samples: Iterable[Sample]) -> dict[tuple[ConfigKey, tuple], int]:
    """Same labeling as ``oracle_uniqueness`` keyed by the raw vector, which
    is the form acceptance tests join against pipeline groups."""
    buckets: dict[tuple[ConfigKey, tuple], set[str]] = {}
    for sample in samples:
        if sample.ad_id is None:
            raise DataError("oracle needs samples with advertising IDs")
        vector = tuple(sorted((k, v) for k, v in sample.attributes.items() if v is not None))
        buckets.setdefault((sample.config.key(), vector), set()).add(sample.ad_id)
    return {key: (1 if len(ad_ids) == 1 else 0) for key, ad_ids in buckets.items()}


# --------------------------------------------------------------------------
# Default benchmark population: three browser configurations, uniqueness
# injected through two high-entropy attributes (both in the default block
# set), everything else low-entropy so blocking those two collapses most of
# the uniqueness.
# --------------------------------------------------------------------------

BENCHMARK_DRIVERS = ("Canvas", "Storage: quota")

_SAFARI_UNREPORTED = (
    "Device memory",
    "User Permissions state",
    "Bluetooth availability",
    "Plugins",
    "MIME type",
    "Battery status: charging",
    "Audio cxt: max channel count",
)


def benchmark_configs() -> list[tuple[DeviceConfig, float]]:
    return [
        (DeviceConfig("desktop", "Windows", "Chrome", "web"), 0.55),
        (DeviceConfig("desktop", "macOS", "Safari", "web"), 0.25),
        (DeviceConfig("mobile", "Android", "Chrome", "web"), 0.20),
    ]


def benchmark_dists(reg: AttributeRegistry) -> list[AttributeDistSpec]:
    safari = ConfigPattern(agent="Safari")
    small_config = ConfigPattern(os="macOS")
    small_config2 = ConfigPattern(os="Android")
    dists: list[AttributeDistSpec] = []
    for meta in scoped_meta_attributes(reg, "web"):
        if meta in BENCHMARK_DRIVERS:
            dists.append(
                AttributeDistSpec(
                    meta_attribute=meta,
                    support_size=400,
                    target_h=0.72,
                    per_config=[
                        (small_config, DistOverride(support_size=150)),
                        (small_config2, DistOverride(support_size=150)),
                    ],
                )
            )
        elif meta in ("UserAgent", "Languages", "available height", "available width"):
            dists.append(AttributeDistSpec(meta_attribute=meta, support_size=6, target_h=0.25))
        elif meta in ("Media devices", "WebGL Extensions", "WebGL (Rend - Param)"):
            dists.append(
                AttributeDistSpec(
                    meta_attribute=meta, support_size=5, target_h=0.15, report_prob=0.97
                )
            )
        elif meta in _SAFARI_UNREPORTED:
            dists.append(
                AttributeDistSpec(
                    meta_attribute=meta,
                    support_size=3,
                    target_h=0.05,
                    per_config=[(safari, DistOverride(report_prob=0.0))],
                )
            )
        else:
            dists.append(AttributeDistSpec(meta_attribute=meta, support_size=3, target_h=0.05))
    return dists


def default_benchmark(
    reg: AttributeRegistry, n_samples: int = 50_000, seed: int = 7
) -> list[Sample]:
    """The standard benchmark population, truncated to exactly n_samples."""
    spec = PopulationSpec(
        n_devices=max(1, int(n_samples / 2.4)),
        config_shares=benchmark_configs(),
        impressions=ImpressionsSpec(kind="geometric", mean=3.0),
        ad_id_report_rate=0.65,
        loss_rate=0.10,
        seed=seed,
    )
    samples = generate(spec, benchmark_dists(reg), reg)
    if len(samples) < n_samples:
        raise DataError(
            f"benchmark produced {len(samples)} samples, wanted {n_samples}; "
            "raise n_devices"
        )
    return samples[:n_samples]
