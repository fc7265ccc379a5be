from itertools import product

import numpy as np
import pytest

from modhadamard.matrix import is_modular_hadamard
from modhadamard.search import (
    Mode,
    SearchError,
    SearchSpec,
    cross_check,
    exhaustive,
    read_ledger,
    run_shard,
    witness_matrix,
)

from conftest import oracle_is_mh


def brute_solutions(n, m):
    """Oracle: build every normalized matrix and test it with an exact Gram product."""
    free = (n - 1) ** 2
    found = []
    for bits in product((1, -1), repeat=free):
        H = np.ones((n, n), dtype=np.int64)
        H[1:, 1:] = np.array(bits, dtype=np.int64).reshape(n - 1, n - 1)
        G = H @ H.T - n * np.eye(n, dtype=np.int64)
        if (m == 0 and not G.any()) or (m and not (G % m).any()):
            found.append(H)
    return found


def masks_of(H):
    n = H.shape[0]
    return tuple(int("".join("1" if x < 0 else "0" for x in row[1:]), 2) for row in H[1:])


class TestExamples:
    def test_6_5_confirm_none(self):
        out = exhaustive(SearchSpec(6, 5, Mode.CONFIRM_NONE))
        assert out.solutions == 0 and out.witness is None
        assert out.examined == out.space == 33_554_432

    def test_5_3_confirm_none(self):
        out = exhaustive(SearchSpec(5, 3, Mode.CONFIRM_NONE))
        assert (out.examined, out.solutions) == (2**16, 0)

    def test_4_5_first_witness(self):
        out = exhaustive(SearchSpec(4, 5, Mode.FIRST_WITNESS))
        assert out.exists
        assert oracle_is_mh(out.witness, 5)
        assert out.witness.is_normalized

    def test_n1(self):
        out = exhaustive(SearchSpec(1, 5, Mode.COUNT_ALL))
        assert (out.examined, out.solutions, out.space) == (1, 1, 1)


class TestAgainstBruteForce:
    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("m", [0, 2, 3, 4, 5, 6])
    def test_count_all(self, n, m):
        expected = brute_solutions(n, m)
        out = exhaustive(SearchSpec(n, m, Mode.COUNT_ALL))
        assert out.solutions == len(expected)
        assert out.complete

    @pytest.mark.parametrize("n,m", [(3, 3), (4, 2), (4, 5), (4, 0)])
    def test_first_witness_is_lexicographic_minimum(self, n, m):
        expected = min(masks_of(H) for H in brute_solutions(n, m))
        out = exhaustive(SearchSpec(n, m))
        assert masks_of(out.witness.entries) == expected

    def test_count_5_2_vectorized(self):
        # 2^16 candidates: oracle via batched integer Gram products
        n, m = 5, 2
        idx = np.arange(1 << 16, dtype=np.int64)
        bits = (idx[:, None] >> np.arange(15, -1, -1)) & 1
        H = np.ones((idx.size, n, n), dtype=np.int64)
        H[:, 1:, 1:] = (1 - 2 * bits).reshape(-1, 4, 4)
        G = np.einsum("bij,bkj->bik", H, H) - n * np.eye(n, dtype=np.int64)
        expected = int(np.all(G % m == 0, axis=(1, 2)).sum())
        assert exhaustive(SearchSpec(n, m, Mode.COUNT_ALL)).solutions == expected


class TestDeterminism:
    @pytest.mark.parametrize("mode", list(Mode))
    def test_layouts_agree(self, mode):
        ref = exhaustive(SearchSpec(5, 2, mode))
        for bits in (1, 2, 4):
            for workers in (1, 3):
                out = exhaustive(SearchSpec(5, 2, mode, workers=workers, shard_bits=bits))
                assert out == ref
                assert out.witness == ref.witness

    def test_workers_6_5(self):
        ref = exhaustive(SearchSpec(6, 5, Mode.CONFIRM_NONE, workers=1))
        for w in (4, 8):
            assert exhaustive(SearchSpec(6, 5, Mode.CONFIRM_NONE, workers=w, shard_bits=3)) == ref

    def test_shards_partition_space(self):
        for n, m in ((4, 5), (5, 3), (5, 4)):
            full = run_shard(n, m, 0, 0, False)
            for bits in range(0, n):
                parts = [run_shard(n, m, bits, i, False) for i in range(1 << bits)]
                assert sum(p.examined for p in parts) == full.examined == 1 << (n - 1) ** 2
                assert sum(p.solutions for p in parts) == full.solutions


class TestLedger:
    def test_written_and_resumed(self, tmp_path):
        ledger = tmp_path / "run.ledger"
        spec = SearchSpec(5, 2, Mode.COUNT_ALL, shard_bits=2, ledger=ledger)
        first = exhaustive(spec)
        lines = ledger.read_text().splitlines()
        assert len(lines) == 4 and all(line.startswith("SHARD ") for line in lines)
        assert exhaustive(spec) == first
        # resuming appends nothing new for completed shards with no witness to recover
        assert read_ledger(ledger) == {int(l.split()[1]): tuple(map(int, l.split()[2:])) for l in lines}

    def test_partial_ledger(self, tmp_path):
        ledger = tmp_path / "run.ledger"
        full = exhaustive(SearchSpec(6, 5, Mode.CONFIRM_NONE))
        r = run_shard(6, 5, 2, 1, False)
        ledger.write_text(f"SHARD 1 {r.examined} {r.solutions}\n")
        out = exhaustive(SearchSpec(6, 5, Mode.CONFIRM_NONE, shard_bits=2, ledger=ledger))
        assert out == full
        assert sorted(read_ledger(ledger)) == [0, 1, 2, 3]

    def test_malformed_ledger(self, tmp_path):
        ledger = tmp_path / "bad.ledger"
        ledger.write_text("DONE 1\n")
        with pytest.raises(SearchError):
            exhaustive(SearchSpec(4, 5, shard_bits=1, ledger=ledger))

    def test_ledger_outside_layout(self, tmp_path):
        ledger = tmp_path / "run.ledger"
        ledger.write_text("SHARD 9 1 0\n")
        with pytest.raises(SearchError):
            exhaustive(SearchSpec(4, 5, shard_bits=1, ledger=ledger))


class TestErrors:
    def test_space_too_large(self):
        with pytest.raises(SearchError):
            SearchSpec(8, 5)

    def test_largest_allowed(self):
        assert SearchSpec(7, 5).space == 2**36

    @pytest.mark.parametrize("bits", [-1, 6])
    def test_bad_shard_bits(self, bits):
        with pytest.raises(SearchError):
            SearchSpec(6, 5, shard_bits=bits)

    def test_bad_modulus(self):
        with pytest.raises(ValueError):
            SearchSpec(4, 1)

    def test_bad_workers(self):
        with pytest.raises(SearchError):
            SearchSpec(4, 5, workers=0)


def test_witness_matrix_encoding():
    W = witness_matrix(3, (0b01, 0b10))
    assert W.entries.tolist() == [[1, 1, 1], [1, 1, -1], [1, -1, 1]]


class TestCrossCheck:
    def test_zero_disagreements(self):
        report = cross_check(6)
        assert len(report.rows) == 30
        assert report.disagreements == ()

    def test_3_4_both_absent(self):
        row = next(r for r in cross_check(3, (4,)).rows if r.n == 3)
        assert not row.search_exists and not row.decide_exists

    def test_4_all_present(self):
        rows = [r for r in cross_check(4).rows if r.n == 4]
        assert all(r.search_exists and r.decide_exists for r in rows)

    def test_limit(self):
        with pytest.raises(SearchError):
            cross_check(7)


def test_witnesses_always_verify():
    for n in range(1, 6):
        for m in (2, 3, 4, 5, 6):
            out = exhaustive(SearchSpec(n, m))
            if out.witness is not None:
                assert is_modular_hadamard(out.witness, m)
