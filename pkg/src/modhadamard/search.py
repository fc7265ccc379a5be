"""Exhaustive enumeration of normalized +-1 matrices.

The first row and column are fixed to +1, leaving an (n-1) x (n-1) free
block. Each free row is an (n-1)-bit mask, most significant bit = column 1,
set bit = -1. Candidates are ordered lexicographically by their tuple of row
masks, so the first witness found is the lexicographically least one.

The walk is a depth-first search over rows: as soon as a row clashes with an
earlier one mod m, every completion of that prefix is counted as examined
and skipped. Counts therefore always cover the full space of
2^((n-1)^2) candidates, and no symmetry quotient is taken.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from ._bits import popcount
from .matrix import SignMatrix, check_modulus, is_modular_hadamard

MAX_FREE_CELLS = 36


class SearchError(ValueError):
    pass


class Mode(str, enum.Enum):
    FIRST_WITNESS = "first"
    COUNT_ALL = "count"
    CONFIRM_NONE = "confirm"


@dataclass(frozen=True)
class SearchSpec:
    n: int
    m: int
    mode: Mode = Mode.FIRST_WITNESS
    workers: int = 1
    shard_bits: int = 0
    ledger: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        check_modulus(self.m)
        if self.n < 1:
            raise SearchError("order must be >= 1")
        if (self.n - 1) ** 2 > MAX_FREE_CELLS:
            raise SearchError(f"space 2^{(self.n - 1) ** 2} exceeds the 2^{MAX_FREE_CELLS} ceiling")
        if self.workers < 1:
            raise SearchError("workers must be >= 1")
        if not 0 <= self.shard_bits <= max(self.n - 1, 0):
            raise SearchError(f"shard_bits must lie in [0, {max(self.n - 1, 0)}]")

    @property
    def space(self) -> int:
        return 1 << (self.n - 1) ** 2

    @property
    def shards(self) -> int:
        return 1 << self.shard_bits


@dataclass(frozen=True)
class ShardResult:
    index: int
    examined: int
    solutions: int
    witness: tuple[int, ...] | None = None


@dataclass(frozen=True)
class SearchOutcome:
    n: int
    m: int
    mode: Mode
    witness: SignMatrix | None
    examined: int
    solutions: int
    space: int
    shard_results: tuple[ShardResult, ...] = field(default=(), compare=False, repr=False)

    @property
    def exists(self) -> bool:
        return self.solutions > 0

    @property
    def complete(self) -> bool:
        return self.examined == self.space


@njit(cache=True)
def _walk(n, m, lo, hi, stop_first):
    rows = n - 1
    full = np.int64(1) << rows
    ok = np.zeros(n + 1, dtype=np.bool_)
    for c in range(n + 1):
        d = n - 2 * c
        ok[c] = (d == 0) if m == 0 else (d % m == 0)
    # sizes[d]: completions of a prefix that ends at row d
    sizes = np.empty(rows, dtype=np.int64)
    for d in range(rows):
        sizes[d] = np.int64(1) << (rows * (rows - 1 - d))
    sel = np.zeros(rows, dtype=np.int64)
    witness = np.full(rows, -1, dtype=np.int64)
    examined = np.int64(0)
    solutions = np.int64(0)
    d = 0
    sel[0] = lo
    while True:
        limit = hi if d == 0 else full
        a = sel[d]
        if a >= limit:
            d -= 1
            if d < 0:
                break
            sel[d] += 1
            continue
        valid = ok[popcount(a)]
        e = 0
        while valid and e < d:
            valid = ok[popcount(a ^ sel[e])]
            e += 1
        if not valid:
            examined += sizes[d]
            sel[d] += 1
            continue
        if d == rows - 1:
            examined += 1
            solutions += 1
            if witness[0] < 0:
                witness[:] = sel
                if stop_first:
                    break
            sel[d] += 1
            continue
        d += 1
        sel[d] = 0
    return examined, solutions, witness


def witness_matrix(n: int, masks) -> SignMatrix:
    a = np.ones((n, n), dtype=np.int8)
    for i, mask in enumerate(masks, start=1):
        for j in range(1, n):
            if (int(mask) >> (n - 1 - j)) & 1:
                a[i, j] = -1
    return SignMatrix(a)


def run_shard(n: int, m: int, shard_bits: int, index: int, stop_first: bool) -> ShardResult:
    if n == 1:
        return ShardResult(index, 1, 1, ())
    width = n - 1 - shard_bits
    lo, hi = index << width, (index + 1) << width
    examined, solutions, witness = _walk(n, m, lo, hi, stop_first)
    w = tuple(int(x) for x in witness) if solutions else None
    return ShardResult(index, int(examined), int(solutions), w)


def _shard_task(args):
    return run_shard(*args)


def read_ledger(path: Path) -> dict[int, tuple[int, int]]:
    done = {}
    if not path.exists():
        return done
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        parts = line.split(" ")
        if len(parts) != 4 or parts[0] != "SHARD":
            raise SearchError(f"{path}:{lineno}: expected 'SHARD <index> <examined> <solutions>'")
        done[int(parts[1])] = (int(parts[2]), int(parts[3]))
    return done


def _merge(spec: SearchSpec, results: list[ShardResult]) -> SearchOutcome:
    results = sorted(results, key=lambda r: r.index)
    examined = solutions = 0
    witness = None
    for r in results:
        examined += r.examined
        solutions += r.solutions
        if witness is None and r.witness is not None:
            witness = witness_matrix(spec.n, r.witness)
            if spec.mode is Mode.FIRST_WITNESS:
                break
    if witness is not None and not is_modular_hadamard(witness, spec.m):
        raise AssertionError("search produced a witness that fails verification")
    return SearchOutcome(spec.n, spec.m, spec.mode, witness, examined, solutions, spec.space,
                         tuple(results))


def exhaustive(spec: SearchSpec) -> SearchOutcome:
    """Run the search; the outcome does not depend on workers or shard layout."""
    stop_first = spec.mode is Mode.FIRST_WITNESS
    done = read_ledger(spec.ledger) if spec.ledger else {}
    if any(i >= spec.shards for i in done):
        raise SearchError("ledger mentions shards outside the current layout")
    # shards with recorded solutions are rerun so their witness can be recovered
    reuse = {i: ShardResult(i, *done[i]) for i in done if done[i][1] == 0}
    todo = [i for i in range(spec.shards) if i not in reuse]
    results = list(reuse.values())

    def record(r: ShardResult):
        results.append(r)
        if spec.ledger and r.index not in done:
            with open(spec.ledger, "a") as fh:
                fh.write(f"SHARD {r.index} {r.examined} {r.solutions}\n")

    tasks = [(spec.n, spec.m, spec.shard_bits, i, stop_first) for i in todo]
    if spec.workers == 1 or len(tasks) <= 1:
        for t in tasks:
            r = run_shard(*t)
            record(r)
            # earlier shards are all done (in order or reused with no solutions)
            if stop_first and r.solutions:
                break
    else:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            for r in pool.map(_shard_task, tasks):
                record(r)
    return _merge(spec, results)


@dataclass(frozen=True)
class CrossCheckRow:
    n: int
    m: int
    search_exists: bool
    decide_exists: bool

    @property
    def agree(self) -> bool:
        return self.search_exists == self.decide_exists


@dataclass(frozen=True)
class CrossCheckReport:
    rows: tuple[CrossCheckRow, ...]

    @property
    def disagreements(self) -> tuple[CrossCheckRow, ...]:
        return tuple(r for r in self.rows if not r.agree)


def cross_check(n_max: int, moduli=(2, 3, 4, 5, 6), workers: int = 1) -> CrossCheckReport:
    """Compare the solver's verdict with exhaustive search for every n <= n_max."""
    from .solver import decide

    if n_max > 6:
        raise SearchError("cross_check is limited to n <= 6")
    rows = []
    for n in range(1, n_max + 1):
        for m in moduli:
            out = exhaustive(SearchSpec(n, m, Mode.FIRST_WITNESS, workers=workers))
            rows.append(CrossCheckRow(n, m, out.exists, decide(n, m).exists))
    return CrossCheckReport(tuple(rows))


def default_workers() -> int:
    return os.cpu_count() or 1
