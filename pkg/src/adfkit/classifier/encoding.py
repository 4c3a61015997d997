"""Categorical feature encoding.

Meta-attributes with low observed cardinality are one-hot encoded; high
cardinality ones get frequency encoding (value -> relative frequency in the
training data, unseen values -> 0.0).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DataError
from ..fingerprint import FingerprintGroup
from ..registry import AttributeRegistry, scoped_meta_attributes
from ..stats import meta_value

DEFAULT_ONE_HOT_THRESHOLD = 32

MetaRow = Sequence["str | None"]


@dataclass
class EncoderState:
    meta_names: list[str]
    kinds: dict[str, str]  # meta -> "one-hot" | "frequency"
    vocabularies: dict[str, list[str]] = field(default_factory=dict)
    frequencies: dict[str, dict[str, float]] = field(default_factory=dict)
    threshold: int = DEFAULT_ONE_HOT_THRESHOLD

    @property
    def feature_names(self) -> list[str]:
        names = []
        for meta in self.meta_names:
            if self.kinds[meta] == "one-hot":
                names.extend(f"{meta}={value}" for value in self.vocabularies[meta])
            else:
                names.append(f"{meta}#freq")
        return names

    def transform(self, rows: Sequence[MetaRow]) -> np.ndarray:
        """Encode raw meta-value rows into a dense float matrix."""
        n = len(rows)
        x = np.zeros((n, len(self.feature_names)), dtype=np.float64)
        col = 0
        for j, meta in enumerate(self.meta_names):
            if self.kinds[meta] == "one-hot":
                index = {value: col + i for i, value in enumerate(self.vocabularies[meta])}
                for r in range(n):
                    value = rows[r][j]
                    if value is not None and value in index:
                        x[r, index[value]] = 1.0
                col += len(self.vocabularies[meta])
            else:
                table = self.frequencies[meta]
                for r in range(n):
                    value = rows[r][j]
                    if value is not None:
                        x[r, col] = table.get(value, 0.0)
                col += 1
        return x

    def decode_one_hot(self, meta: str, encoded: np.ndarray) -> str | None:
        """Inverse of one-hot encoding for a single meta-attribute block."""
        if self.kinds.get(meta) != "one-hot":
            raise DataError(f"{meta!r} is not one-hot encoded")
        start = 0
        for name in self.meta_names:
            if name == meta:
                break
            start += len(self.vocabularies[name]) if self.kinds[name] == "one-hot" else 1
        block = encoded[start : start + len(self.vocabularies[meta])]
        hits = np.nonzero(block == 1.0)[0]
        if hits.size == 0:
            return None
        return self.vocabularies[meta][int(hits[0])]


def meta_rows(
    groups: Sequence[FingerprintGroup], reg: AttributeRegistry, channel: str
) -> list[list[str | None]]:
    """Raw meta-value rows (one per group) over the channel's meta-attributes."""
    metas = scoped_meta_attributes(reg, channel)
    return [[meta_value(g.attributes, meta, reg) for meta in metas] for g in groups]


def fit_encoder_rows(
    rows: Sequence[MetaRow],
    meta_names: list[str],
    threshold: int = DEFAULT_ONE_HOT_THRESHOLD,
) -> EncoderState:
    if not rows:
        raise DataError("cannot fit an encoder on zero rows")
    kinds: dict[str, str] = {}
    vocabularies: dict[str, list[str]] = {}
    frequencies: dict[str, dict[str, float]] = {}
    for j, meta in enumerate(meta_names):
        counts: dict[str, int] = {}
        for row in rows:
            value = row[j]
            if value is not None:
                counts[value] = counts.get(value, 0) + 1
        if len(counts) <= threshold:
            kinds[meta] = "one-hot"
            vocabularies[meta] = sorted(counts)
        else:
            kinds[meta] = "frequency"
            total = sum(counts.values())
            frequencies[meta] = {value: c / total for value, c in sorted(counts.items())}
    return EncoderState(
        meta_names=list(meta_names),
        kinds=kinds,
        vocabularies=vocabularies,
        frequencies=frequencies,
        threshold=threshold,
    )


def fit_encoder(
    groups: Sequence[FingerprintGroup],
    reg: AttributeRegistry,
    threshold: int = DEFAULT_ONE_HOT_THRESHOLD,
    channel: str | None = None,
) -> EncoderState:
    """Fit encodings from training groups (cardinality measured on them only)."""
    if not groups:
        raise DataError("cannot fit an encoder on zero groups")
    channel = channel or groups[0].config.channel
    metas = scoped_meta_attributes(reg, channel)
    return fit_encoder_rows(meta_rows(groups, reg, channel), metas, threshold)
