import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convagg.encoding import (DONTCARE, NEG, POS, CodeEntry, CodeMatrix, Scheme, code_distance,
                              column_distances, gen_allpairs, gen_ecoc, gen_ova, make_code)
from convagg.errors import InvalidClassCount, ParseError

from conftest import PAIRWISE3


def test_ova_k3_is_identity():
    C = gen_ova(3)
    assert C.M == 3
    assert np.array_equal(C.entries, np.eye(3, dtype=np.int8))
    assert C.is_valid()


def test_ova_k4_one_pos_per_row():
    C = gen_ova(4)
    assert C.M == 4
    assert ((C.entries == POS).sum(axis=1) == 1).all()
    assert not (C.entries == DONTCARE).any()


@pytest.mark.parametrize("gen", [gen_ova, gen_allpairs, gen_ecoc])
@pytest.mark.parametrize("K", [-1, 0, 1, 2])
def test_small_k_rejected(gen, K):
    with pytest.raises(InvalidClassCount):
        gen(K)


def test_allpairs_k3_matches_pairwise3_as_row_set():
    rows = {tuple(r) for r in gen_allpairs(3).entries.tolist()}
    assert rows == {tuple(r) for r in PAIRWISE3.entries.tolist()}


def test_allpairs_lexicographic_order():
    C = gen_allpairs(4)
    assert C.M == 6
    pairs = [(int(np.flatnonzero(r == POS)[0]), int(np.flatnonzero(r == NEG)[0])) for r in C.entries]
    assert pairs == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_allpairs_column_usage():
    C = gen_allpairs(5)
    assert ((C.entries != DONTCARE).sum(axis=0) == 4).all()


def test_complete_code_k4():
    C = gen_ecoc(4)
    assert C.scheme is Scheme.ECOC_COMPLETE
    assert C.M == 7
    assert not (C.entries == DONTCARE).any()
    assert (C.entries[:, 0] == POS).all()
    assert len({tuple(r) for r in C.entries.tolist()}) == 7
    assert C.is_valid()


def test_complete_code_k3_order():
    # membership bits of classes 2..K, class 2 most significant
    assert gen_ecoc(3).entries.tolist() == [[1, 0, 0], [1, 0, 1], [1, 1, 0]]


def test_sparse_code_length_k8():
    C = gen_ecoc(8, seed=0, n_candidates=2000)
    assert C.M == 45
    assert C.scheme is Scheme.ECOC_SPARSE_RANDOM


def test_sparse_candidate_entry_frequencies():
    from convagg.encoding import _sample_valid_rows
    s = _sample_valid_rows(np.random.Generator(np.random.PCG64(3)), 50, 50, 10)
    assert abs((s == 0).mean() - 0.5) <= 0.05
    assert abs((s > 0).mean() - 0.25) <= 0.05
    assert abs((s < 0).mean() - 0.25) <= 0.05
    assert ((s > 0).any(axis=2) & (s < 0).any(axis=2)).all()


def test_sparse_code_entry_frequencies():
    # the max-distance winner leans toward defined entries
    e = gen_ecoc(10, seed=3).entries
    assert 0.35 <= (e == DONTCARE).mean() <= 0.55
    assert abs((e == POS).mean() - (e == NEG).mean()) <= 0.05


def test_sparse_code_deterministic():
    assert gen_ecoc(9, seed=11, n_candidates=3000) == gen_ecoc(9, seed=11, n_candidates=3000)
    assert gen_ecoc(9, seed=11, n_candidates=3000) != gen_ecoc(9, seed=12, n_candidates=3000)


def test_sparse_code_picks_max_min_distance():
    # the winner should beat a fresh valid candidate from a smaller search on average
    big = code_distance(gen_ecoc(8, seed=5, n_candidates=4000))
    small = code_distance(gen_ecoc(8, seed=5, n_candidates=10))
    assert big >= small


def test_code_distance_examples():
    assert code_distance(gen_ova(3)) == 2.0
    assert code_distance(PAIRWISE3) == 2.0
    assert code_distance(gen_ecoc(3)) == 2.0


def _pair_distance_loop(C, a, b):
    total = 0.0
    for row in C.entries:
        u, v = row[a], row[b]
        if u != DONTCARE and v != DONTCARE:
            total += float(u != v)
        elif (u == DONTCARE) != (v == DONTCARE):
            total += 0.5
    return total


@settings(max_examples=50, deadline=None)
@given(K=st.integers(3, 9), seed=st.integers(0, 10_000))
def test_column_distances_match_loop(K, seed):
    rng = np.random.default_rng(seed)
    e = rng.choice(np.array([POS, NEG, DONTCARE], dtype=np.int8), size=(7, K))
    C = CodeMatrix(e, Scheme.ECOC_SPARSE_RANDOM)
    d = column_distances(C.signed())
    for a in range(K):
        for b in range(K):
            assert d[a, b] == _pair_distance_loop(C, a, b)


@settings(max_examples=30, deadline=None)
@given(K=st.integers(3, 8), seed=st.integers(0, 10_000))
def test_code_distance_permutation_invariance(K, seed):
    rng = np.random.default_rng(seed)
    C = make_code(["ova", "aps", "ecoc"][seed % 3], K, seed)
    d = code_distance(C)
    rows = CodeMatrix(C.entries[rng.permutation(C.M)], C.scheme)
    cols = CodeMatrix(C.entries[:, rng.permutation(C.K)], C.scheme)
    assert code_distance(rows) == d
    assert code_distance(cols) == d


@pytest.mark.parametrize("K", range(3, 13))
def test_m_formulas_and_validity(K):
    assert gen_ova(K).M == K
    assert gen_allpairs(K).M == K * (K - 1) // 2
    ecoc = gen_ecoc(K, seed=0, n_candidates=500)
    expected = 2 ** (K - 1) - 1 if K < 8 else math.ceil(15 * math.log2(K))
    assert ecoc.M == expected
    for C in (gen_ova(K), gen_allpairs(K), ecoc):
        assert C.validation_errors() == []


def test_validation_flags_bad_rows_and_columns():
    e = np.array([[POS, POS, NEG], [DONTCARE, POS, POS]], dtype=np.int8)
    problems = CodeMatrix(e, Scheme.OVA).validation_errors()
    assert any("rows" in p for p in problems)
    e = np.array([[POS, NEG, DONTCARE], [NEG, POS, DONTCARE]], dtype=np.int8)
    problems = CodeMatrix(e, Scheme.OVA).validation_errors()
    assert any("DONTCARE" in p for p in problems)


def test_json_round_trip():
    for C in (gen_ova(4), gen_allpairs(5), gen_ecoc(8, seed=1, n_candidates=200)):
        d = C.to_dict()
        assert set(d) == {"scheme", "K", "M", "rows"}
        assert {s for row in d["rows"] for s in row} <= {"1", "0", "*"}
        assert CodeMatrix.from_dict(d) == C


def test_entry_symbols_round_trip():
    for e in CodeEntry:
        assert CodeEntry.from_symbol(e.symbol) is e
    with pytest.raises(ParseError):
        CodeEntry.from_symbol("2")


def test_from_dict_rejects_inconsistent_shape():
    d = gen_ova(3).to_dict()
    d["M"] = 4
    with pytest.raises(ParseError):
        CodeMatrix.from_dict(d)
