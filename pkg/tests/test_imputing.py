import random

import pytest

from adfkit.classifier.imputing import fit_imputer, impute_rows
from adfkit.errors import DataError


def brute_force_knn(rows, query, k):
    """Independent nearest-neighbor scan: mismatch count over positions
    informative in both rows, ties by reference index."""
    n_meta = len(query)
    scored = []
    for idx, ref in enumerate(rows):
        shared = 0
        mism = 0
        for j in range(n_meta):
            if query[j] is not None and ref[j] is not None:
                shared += 1
                if query[j] != ref[j]:
                    mism += 1
        dist = mism if shared > 0 else n_meta + 1
        scored.append((dist, idx))
    scored.sort()
    return [idx for _, idx in scored[:k]]


def test_unanimous_neighbors():
    refs = [["a", "x"], ["a", "x"], ["a", "x"], ["b", "y"]]
    state = fit_imputer(refs, ["m1", "m2"], k=3)
    out = impute_rows([["a", None]], state)
    assert out[0] == ["a", "x"]


def test_all_missing_falls_back_to_global_mode():
    refs = [["a", "x"], ["a", "y"], ["a", "x"], ["b", "x"]]
    state = fit_imputer(refs, ["m1", "m2"], k=2)
    out = impute_rows([[None, None]], state)
    assert out[0] == ["a", "x"]


def test_k1_unique_nearest_matches_brute_force():
    rng = random.Random(17)
    metas = [f"m{j}" for j in range(6)]
    refs = [[f"v{rng.randrange(4)}" for _ in metas] for _ in range(40)]
    state = fit_imputer(refs, metas, k=1)
    for _ in range(50):
        query = [f"v{rng.randrange(4)}" for _ in metas]
        query[2] = None
        nearest = brute_force_knn(refs, query, 1)[0]
        out = impute_rows([query], state)
        assert out[0][2] == refs[nearest][2]


def test_k5_mode_matches_brute_force():
    rng = random.Random(23)
    metas = [f"m{j}" for j in range(5)]
    refs = [[f"v{rng.randrange(3)}" for _ in metas] for _ in range(60)]
    state = fit_imputer(refs, metas, k=5)
    for _ in range(40):
        query = [f"v{rng.randrange(3)}" for _ in metas]
        missing_at = rng.randrange(len(metas))
        query[missing_at] = None
        neighbors = brute_force_knn(refs, query, 5)
        votes = {}
        for idx in neighbors:
            v = refs[idx][missing_at]
            if v is not None:
                votes[v] = votes.get(v, 0) + 1
        best = sorted(votes.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
        out = impute_rows([query], state)
        assert out[0][missing_at] == best


def test_distance_ties_break_by_reference_index():
    # Two references at distance 0 for the query; k=1 must take the first.
    refs = [["a", "x"], ["a", "y"]]
    state = fit_imputer(refs, ["m1", "m2"], k=1)
    out = impute_rows([["a", None]], state)
    assert out[0][1] == "x"


def test_never_reported_meta_stays_missing():
    refs = [["a", None], ["b", None]]
    state = fit_imputer(refs, ["m1", "ghost"], k=1)
    out = impute_rows([[None, None]], state)
    assert out[0][0] in ("a", "b")
    assert out[0][1] is None


def test_non_missing_rows_pass_through():
    refs = [["a", "x"], ["b", "y"]]
    state = fit_imputer(refs, ["m1", "m2"], k=1)
    rows = [["b", "y"], ["a", "x"]]
    assert impute_rows(rows, state) == rows


def test_inputs_not_mutated():
    refs = [["a", "x"], ["a", "x"]]
    state = fit_imputer(refs, ["m1", "m2"], k=1)
    row = ["a", None]
    impute_rows([row], state)
    assert row == ["a", None]


def test_k_capped_at_reference_count():
    state = fit_imputer([["a"]], ["m"], k=99)
    assert state.k == 1


def test_empty_reference_rejected():
    with pytest.raises(DataError):
        fit_imputer([], ["m"], k=1)
    with pytest.raises(DataError):
        fit_imputer([["a"]], ["m"], k=0)


def test_unseen_query_value_acts_as_mismatch():
    refs = [["a", "x"], ["b", "y"]]
    state = fit_imputer(refs, ["m1", "m2"], k=1)
    # "zz" matches nobody, so both refs are distance 1; index order wins.
    out = impute_rows([["zz", None]], state)
    assert out[0][1] == "x"
