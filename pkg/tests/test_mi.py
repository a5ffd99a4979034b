import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubofs.dataset import DiscretizedDataset
from hubofs.errors import DataError, UsageError
from hubofs.mi import (
    MiTensors,
    compute_tensors,
    cyclic_mi,
    entropy,
    load_tensors,
    mi_joint_pair_single,
    mi_pair,
    save_tensors,
)


def oracle_entropy(codes) -> float:
    """Independent direct-sum implementation of plug-in entropy."""
    counts = {}
    for v in codes:
        counts[v] = counts.get(v, 0) + 1
    n = len(codes)
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def oracle_mi(a, b) -> float:
    """H(a) + H(b) - H(a,b) computed from explicit dictionaries."""
    return oracle_entropy(list(a)) + oracle_entropy(list(b)) - oracle_entropy(list(zip(a, b)))


def make_dd(codes, target=None):
    codes = np.asarray(codes, dtype=np.int64)
    n = codes.shape[1]
    if target is None:
        target = np.array([0, 1] * (codes.shape[0] // 2) + [0] * (codes.shape[0] % 2))
    return DiscretizedDataset(
        codes=codes,
        bin_counts=codes.max(axis=0) + 1,
        target=np.asarray(target, dtype=np.int64),
        source_names=tuple(f"f{i}" for i in range(n)),
    )


class TestEntropy:
    def test_examples(self):
        assert entropy([0, 1, 0, 1]) == 1.0
        assert entropy([3, 3, 3]) == 0.0
        assert entropy([0, 0, 1, 2]) == oracle_entropy([0, 0, 1, 2]) == 1.5

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            entropy([])


class TestMiPair:
    def test_self_information(self):
        a = [0, 1, 0, 1]
        assert mi_pair(a, a) == 1.0

    def test_exact_independence_is_exactly_zero(self):
        assert mi_pair([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0
        assert mi_pair([0, 0, 1, 1], [0, 1, 1, 0]) == 0.0
        # non-power-of-two independent table
        a = [0] * 6 + [1] * 3
        b = [0, 1, 2] * 3
        assert mi_pair(a, b) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            mi_pair([0, 1], [0, 1, 0])

    def test_against_oracle_random_tables(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(2, 40))
            a = rng.integers(0, rng.integers(2, 5), n)
            b = rng.integers(0, rng.integers(2, 5), n)
            assert mi_pair(a, b) == pytest.approx(max(oracle_mi(a, b), 0.0), abs=1e-12)

    @given(st.data())
    @settings(max_examples=80, deadline=None)
    def test_symmetry_and_bounds(self, data):
        n = data.draw(st.integers(2, 30))
        a = np.array(data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n)))
        b = np.array(data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n)))
        forward = mi_pair(a, b)
        assert forward == mi_pair(b, a)
        assert 0.0 <= forward <= min(entropy(a), entropy(b)) + 1e-12


class TestTriples:
    def test_composite_determines_duplicate(self):
        # X_k identical to X_i, X_j independent of both
        codes = np.array([[0, 0, 0], [0, 1, 0], [1, 0, 1], [1, 1, 1]])
        dd = make_dd(codes)
        assert mi_joint_pair_single(dd, 0, 1, 2) == pytest.approx(
            entropy(codes[:, 2]), abs=1e-12
        )

    def test_constant_columns(self):
        dd = make_dd(np.zeros((6, 3), dtype=int))
        assert mi_joint_pair_single(dd, 0, 1, 2) == 0.0
        assert cyclic_mi(dd, 0, 1, 2) == 0.0

    def test_against_contingency_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            codes = rng.integers(0, 2, (16, 3))
            dd = make_dd(codes)
            pair = [tuple(row) for row in codes[:, :2]]
            expect = oracle_mi(pair, list(codes[:, 2]))
            assert mi_joint_pair_single(dd, 0, 1, 2) == pytest.approx(expect, abs=1e-12)

    def test_cyclic_identical_columns(self):
        col = np.array([0, 1, 2, 0, 1, 2])
        dd = make_dd(np.column_stack([col, col, col]))
        assert cyclic_mi(dd, 0, 1, 2) == pytest.approx(entropy(col), abs=1e-12)

    def test_cyclic_independent_columns(self):
        # three mutually independent empirical columns (full factorial design)
        rows = list(itertools.product([0, 1], repeat=3))
        dd = make_dd(np.array(rows))
        assert cyclic_mi(dd, 0, 1, 2) == 0.0

    def test_cyclic_permutation_invariant_exactly(self):
        rng = np.random.default_rng(9)
        codes = rng.integers(0, 3, (24, 4))
        dd = make_dd(codes)
        reference = cyclic_mi(dd, 0, 1, 2)
        for perm in itertools.permutations((0, 1, 2)):
            assert cyclic_mi(dd, *perm) == reference

    def test_composite_at_least_as_informative(self):
        rng = np.random.default_rng(21)
        for _ in range(40):
            codes = rng.integers(0, 3, (20, 3))
            dd = make_dd(codes)
            joint = mi_joint_pair_single(dd, 0, 1, 2)
            assert joint >= mi_pair(codes[:, 0], codes[:, 2]) - 1e-12
            assert joint >= mi_pair(codes[:, 1], codes[:, 2]) - 1e-12

    def test_index_validation(self):
        dd = make_dd(np.zeros((4, 3), dtype=int))
        with pytest.raises(UsageError):
            mi_joint_pair_single(dd, 0, 0, 1)
        with pytest.raises(UsageError):
            cyclic_mi(dd, 0, 1, 5)


class TestComputeTensors:
    def test_sizes(self):
        rng = np.random.default_rng(1)
        for n, pairs, triples in ((1, 0, 0), (3, 3, 1), (6, 15, 20)):
            dd = make_dd(rng.integers(0, 2, (30, n)))
            t = compute_tensors(dd)
            assert t.relevance.shape == (n,)
            assert len(t.redundancy) == pairs
            assert len(t.triadic) == triples

    def test_n32_counts(self):
        # combinatorial bookkeeping only: relevance 32, C(32,2), C(32,3)
        import math as m

        assert m.comb(32, 2) == 496
        assert m.comb(32, 3) == 4960

    def test_duplicated_column_redundancy_is_entropy(self):
        rng = np.random.default_rng(4)
        col = rng.integers(0, 4, 50)
        dd = make_dd(np.column_stack([col, col, rng.integers(0, 3, 50)]))
        t = compute_tensors(dd)
        assert t.redundancy[(0, 1)] == pytest.approx(entropy(col), abs=1e-12)

    def test_matches_pointwise_functions(self):
        rng = np.random.default_rng(8)
        dd = make_dd(rng.integers(0, 3, (25, 4)))
        t = compute_tensors(dd)
        for i in range(4):
            assert t.relevance[i] == mi_pair(dd.codes[:, i], dd.target)
        for key, value in t.redundancy.items():
            assert value == mi_pair(dd.codes[:, key[0]], dd.codes[:, key[1]])
        for key, value in t.triadic.items():
            assert value == cyclic_mi(dd, *key)

    def test_max_triples_cap(self):
        rng = np.random.default_rng(2)
        dd = make_dd(rng.integers(0, 2, (40, 6)))
        t = compute_tensors(dd, max_triples=5)
        assert len(t.triadic) == 5
        full = compute_tensors(dd)
        kept = sorted(full.triadic.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
        assert t.triadic == dict(kept)

    def test_all_values_nonnegative(self):
        rng = np.random.default_rng(3)
        dd = make_dd(rng.integers(0, 4, (60, 5)))
        assert compute_tensors(dd).all_values().min() >= 0.0


class TestTensorIo:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(6)
        dd = make_dd(rng.integers(0, 3, (30, 4)))
        t = compute_tensors(dd)
        path = tmp_path / "tensors.json"
        save_tensors(path, t, provenance={"input": "x.csv"})
        loaded = load_tensors(path)
        assert np.array_equal(loaded.relevance, t.relevance)
        assert loaded.redundancy == t.redundancy
        assert loaded.triadic == t.triadic

    def test_unknown_schema_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"schema": "other/9", "relevance": [], "pairs": [], "triples": []}')
        with pytest.raises(DataError):
            load_tensors(path)

    def test_subset_reindexes(self):
        t = MiTensors(
            relevance=np.array([0.1, 0.2, 0.3, 0.4]),
            redundancy={(0, 1): 0.5, (1, 3): 0.6, (2, 3): 0.7},
            triadic={(0, 1, 3): 0.8, (1, 2, 3): 0.9},
        )
        sub = t.subset([1, 3])
        assert list(sub.relevance) == [0.2, 0.4]
        assert sub.redundancy == {(0, 1): 0.6}
        assert sub.triadic == {}
