"""K-nearest-neighbor imputation for missing meta-attribute values.

Distances are Hamming mismatch counts over the meta-attributes that are
non-missing in both the query row and the reference row. Ties are broken by
reference-row index; rows sharing no informative position sort last. A query
row with no values at all falls back to the global per-attribute mode.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DataError

MetaRow = Sequence["str | None"]

_MISSING = -1


@dataclass
class ImputerState:
    k: int
    meta_names: list[str]
    vocab: dict[str, list[str]]  # per meta, sorted value list; codes are positions
    reference: np.ndarray  # (n_ref, n_meta) int32, -1 = missing
    global_mode: list[str | None] = field(default_factory=list)
    # Metas with at least one non-missing reference value; only these are
    # worth a neighbor search.
    informative: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def encode_rows(self, rows: Sequence[MetaRow]) -> np.ndarray:
        out = np.full((len(rows), len(self.meta_names)), _MISSING, dtype=np.int32)
        lookup = [
            {value: code for code, value in enumerate(self.vocab[meta])}
            for meta in self.meta_names
        ]
        for r, row in enumerate(rows):
            for j in range(len(self.meta_names)):
                value = row[j]
                if value is None:
                    continue
                code = lookup[j].get(value)
                if code is not None:
                    out[r, j] = code
                else:
                    # Unseen value: keep it for distance purposes under a
                    # pseudo-code that can never match a reference.
                    out[r, j] = len(self.vocab[self.meta_names[j]]) + 1
        return out


def fit_imputer(rows: Sequence[MetaRow], meta_names: list[str], k: int = 5) -> ImputerState:
    if not rows:
        raise DataError("cannot fit an imputer on zero reference rows")
    if k < 1:
        raise DataError("k must be >= 1")
    k = min(k, len(rows))
    vocab: dict[str, list[str]] = {}
    for j, meta in enumerate(meta_names):
        values = {row[j] for row in rows if row[j] is not None}
        vocab[meta] = sorted(values)
    state = ImputerState(k=k, meta_names=list(meta_names), vocab=vocab, reference=np.zeros(0))
    state.reference = state.encode_rows(rows)
    mode: list[str | None] = []
    for j, meta in enumerate(meta_names):
        column = state.reference[:, j]
        valid = column[column >= 0]
        if valid.size == 0:
            mode.append(None)  # never reported anywhere; nothing to fill with
        else:
            counts = np.bincount(valid, minlength=len(vocab[meta]))
            mode.append(vocab[meta][int(np.argmax(counts))])
    state.global_mode = mode
    state.informative = np.array(
        [len(vocab[meta]) > 0 for meta in meta_names], dtype=bool
    )
    return state


def _neighbor_mode(state: ImputerState, neighbor_idx: np.ndarray, j: int) -> str | None:
    values = state.reference[neighbor_idx, j]
    values = values[values >= 0]
    if values.size == 0:
        return state.global_mode[j]
    counts = np.bincount(values, minlength=len(state.vocab[state.meta_names[j]]))
    return state.vocab[state.meta_names[j]][int(np.argmax(counts))]


def impute_rows(rows: Sequence[MetaRow], state: ImputerState) -> list[list[str | None]]:
    """Fill missing meta values; returns new rows, inputs untouched."""
    if state.reference.size == 0:
        raise DataError("imputer has an empty reference set")
    encoded = state.encode_rows(rows)
    n_meta = len(state.meta_names)
    n_ref = state.reference.shape[0]
    out: list[list[str | None]] = [list(row) for row in rows]

    # Rows only need work for missing positions that are informative.
    need = [
        r
        for r in range(len(rows))
        if any(encoded[r, j] == _MISSING and state.informative[j] for j in range(n_meta))
    ]
    if not need:
        for r in range(len(rows)):
            for j in range(n_meta):
                if out[r][j] is None and not state.informative[j]:
                    out[r][j] = state.global_mode[j]
        return out

    ref = state.reference
    ref_valid = ref >= 0
    chunk = max(1, min(len(need), 2_000_000 // max(1, n_ref)))
    for start in range(0, len(need), chunk):
        idx = need[start : start + chunk]
        q = encoded[idx]  # (c, n_meta)
        q_valid = q >= 0
        shared = q_valid[:, None, :] & ref_valid[None, :, :]
        mism = ((q[:, None, :] != ref[None, :, :]) & shared).sum(axis=2, dtype=np.int32)
        n_shared = shared.sum(axis=2, dtype=np.int32)
        # No shared information: strictly worse than any real distance.
        mism = np.where(n_shared == 0, n_meta + 1, mism)
        # Composite key makes ties resolve to the lowest reference index.
        composite = mism.astype(np.int64) * n_ref + np.arange(n_ref, dtype=np.int64)[None, :]
        if state.k < n_ref:
            picked = np.argpartition(composite, state.k - 1, axis=1)[:, : state.k]
        else:
            picked = np.tile(np.arange(n_ref), (len(idx), 1))
        for pos, r in enumerate(idx):
            all_missing = not q_valid[pos].any()
            neighbors = picked[pos]
            order = np.argsort(composite[pos, neighbors], kind="stable")
            neighbors = neighbors[order]
            for j in range(n_meta):
                if out[r][j] is not None:
                    continue
                if all_missing or not state.informative[j]:
                    out[r][j] = state.global_mode[j]
                else:
                    out[r][j] = _neighbor_mode(state, neighbors, j)
    # Rows that skipped the neighbor search may still have never-reported slots.
    for r in range(len(rows)):
        for j in range(n_meta):
            if out[r][j] is None and not state.informative[j]:
                out[r][j] = state.global_mode[j]
    return out
