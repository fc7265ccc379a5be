"""Modular symmetric designs.

A (v, k, lambda; m) design is a v x v 0/1 matrix D whose row and column sums
are all k mod m and whose distinct rows meet in lambda mod m positions, i.e.
D D^T = (k - lambda) I + lambda J and D J = J D = kJ (mod m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import _bits
from .matrix import (
    MatrixFormatError,
    SignMatrix,
    canonical,
    extract_core,
    is_modular_hadamard,
    kronecker,
    parse_rows,
)


class DesignError(ValueError):
    pass


class CoreError(DesignError):
    """A core-to-design precondition failed; `reason` names which one."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


class BinaryMatrix:
    """Immutable square 0/1 matrix."""

    __slots__ = ("_a", "_packed")

    def __init__(self, entries: Iterable | np.ndarray):
        a = np.array(entries, dtype=np.uint8)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        if np.any(a > 1):
            raise ValueError("entries must be 0 or 1")
        a.setflags(write=False)
        self._a = a
        self._packed = None

    @classmethod
    def _trusted(cls, a: np.ndarray) -> BinaryMatrix:
        obj = cls.__new__(cls)
        a = np.ascontiguousarray(a, dtype=np.uint8)
        a.setflags(write=False)
        obj._a = a
        obj._packed = None
        return obj

    @property
    def order(self) -> int:
        return self._a.shape[0]

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def packed(self) -> np.ndarray:
        if self._packed is None:
            self._packed = _bits.pack_rows(self._a)
        return self._packed

    @property
    def T(self) -> BinaryMatrix:
        return BinaryMatrix._trusted(self._a.T)

    def __eq__(self, other):
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash((self.order, self._a.tobytes()))

    def __repr__(self):
        return f"BinaryMatrix(order={self.order})"


@dataclass(frozen=True)
class DesignParams:
    v: int
    k: int
    lam: int
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"design modulus must be >= 2, got {self.m}")
        if self.v < 2:
            raise ValueError(f"design order must be >= 2, got {self.v}")
        # store canonical residues
        object.__setattr__(self, "k", self.k % self.m)
        object.__setattr__(self, "lam", self.lam % self.m)

    def __str__(self):
        return f"({self.v},{self.k},{self.lam};{self.m})"


def verify_design(D: BinaryMatrix, p: DesignParams) -> bool:
    if D.order != p.v:
        raise DesignError(f"matrix order {D.order} does not match v = {p.v}")
    a = D.entries
    if np.any(a.sum(axis=1, dtype=np.int64) % p.m != p.k):
        return False
    if np.any(a.sum(axis=0, dtype=np.int64) % p.m != p.k):
        return False
    i, _ = _bits.and_first_violation(D.packed, p.m, p.k, p.lam)
    return i < 0


def infer_params(D: BinaryMatrix, m: int) -> DesignParams | None:
    if m < 2 or D.order < 2:
        raise ValueError("infer_params needs m >= 2 and order >= 2")
    a = D.entries
    sums = np.concatenate([a.sum(axis=1, dtype=np.int64), a.sum(axis=0, dtype=np.int64)]) % m
    if np.any(sums != sums[0]):
        return None
    lam = _bits.and_offdiag_common(D.packed, m)
    if lam < 0:
        return None
    # diagonal of D D^T equals the row sums, already known to be k
    return DesignParams(D.order, int(sums[0]), int(lam), m)


@dataclass(frozen=True, eq=False)
class ModularDesign:
    matrix: BinaryMatrix
    params: DesignParams

    def __post_init__(self):
        if not verify_design(self.matrix, self.params):
            raise DesignError(f"matrix is not a {self.params} design")

    @property
    def v(self) -> int:
        return self.params.v

    @property
    def m(self) -> int:
        return self.params.m

    def __eq__(self, other):
        if not isinstance(other, ModularDesign):
            return NotImplemented
        return self.params == other.params and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.params, self.matrix))

    def to_text(self) -> str:
        """Serialize as `DES <v> <k> <lambda> <m>` followed by 0/1 rows."""
        p = self.params
        body = (self.matrix.entries + ord("0")).astype(np.uint8)
        body = np.hstack([body, np.full((p.v, 1), ord("\n"), dtype=np.uint8)])
        return f"DES {p.v} {p.k} {p.lam} {p.m}\n" + body.tobytes().decode("ascii")

    @classmethod
    def from_text(cls, text: str) -> ModularDesign:
        lines = text.split("\n")
        if not lines or lines[-1] != "":
            raise MatrixFormatError("missing trailing newline", max(len(lines), 1))
        lines.pop()
        if not lines:
            raise MatrixFormatError("empty input", 1)
        header = lines[0].split(" ")
        if len(header) != 5 or header[0] != "DES":
            raise MatrixFormatError("header must be 'DES <v> <k> <lambda> <m>'", 1, 1)
        try:
            v, k, lam, m = (int(x) for x in header[1:])
        except ValueError:
            raise MatrixFormatError("header fields must be integers", 1, 5) from None
        if len(lines) - 1 != v:
            raise MatrixFormatError(f"expected {v} rows, found {len(lines) - 1}", len(lines) + 1)
        a = parse_rows(lines[1:], v, "01", first_line=2)
        return cls(BinaryMatrix._trusted(a), DesignParams(v, k, lam, m))


def design(matrix: BinaryMatrix | np.ndarray, m: int) -> ModularDesign:
    """Wrap a 0/1 matrix as a design mod m with inferred parameters."""
    if not isinstance(matrix, BinaryMatrix):
        matrix = BinaryMatrix(matrix)
    p = infer_params(matrix, m)
    if p is None:
        raise DesignError(f"matrix of order {matrix.order} is not a modular design mod {m}")
    return ModularDesign(matrix, p)


def circulant(first_row: Sequence[int]) -> BinaryMatrix:
    """Row i is `first_row` cyclically shifted right by i."""
    row = np.asarray(first_row, dtype=np.uint8)
    if row.ndim != 1 or row.size == 0:
        raise ValueError("first row must be a non-empty vector")
    v = row.size
    idx = (np.arange(v)[np.newaxis, :] - np.arange(v)[:, np.newaxis]) % v
    return BinaryMatrix(row[idx])


@dataclass(frozen=True)
class DifferenceSetSpec:
    v: int
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(int(x) for x in self.elements)
        if len(set(elems)) != len(elems):
            raise ValueError("difference set elements must be distinct")
        if any(not 0 <= x < self.v for x in elems):
            raise ValueError(f"elements must lie in [0, {self.v})")
        object.__setattr__(self, "elements", elems)


def difference_counts(s: DifferenceSetSpec) -> list[int]:
    """counts[d] = number of ordered pairs (x, y) in S with x - y = d (mod v)."""
    counts = [0] * s.v
    for x in s.elements:
        for y in s.elements:
            if x != y:
                counts[(x - y) % s.v] += 1
    return counts


def from_difference_set(s: DifferenceSetSpec, m: int = 5) -> ModularDesign:
    """Circulant incidence matrix of a cyclic difference set.

    Raises DesignError when the nonzero differences are not equidistributed;
    the circulant may still be a modular design, see `design`.
    """
    counts = difference_counts(s)[1:]
    if len(set(counts)) != 1:
        raise DesignError(f"differences are not equidistributed: counts {sorted(set(counts))}")
    row = np.zeros(s.v, dtype=np.uint8)
    row[list(s.elements)] = 1
    return ModularDesign(circulant(row), DesignParams(s.v, len(s.elements), counts[0], m))


def complement(D: ModularDesign) -> ModularDesign:
    p = D.params
    J = np.ones((p.v, p.v), dtype=np.uint8)
    return ModularDesign(
        BinaryMatrix._trusted(J - D.matrix.entries),
        DesignParams(p.v, p.v - p.k, p.v - 2 * p.k + p.lam, p.m),
    )


def euler_phi(m: int) -> int:
    if m < 1:
        raise ValueError("phi is defined for m >= 1")
    result, x, p = m, m, 2
    while p * p <= x:
        if x % p == 0:
            while x % p == 0:
                x //= p
            result -= result // p
        p += 1
    if x > 1:
        result -= result // x
    return result


def core_params(n: int, m: int) -> DesignParams:
    """Parameters of the design carried by the core of a normalized MH(n, m)."""
    e = euler_phi(m)
    return DesignParams(n - 1, pow(2, e - 1, m) * (n - 2), pow(2, e - 2, m) * (n - 4), m)


def core_to_design(H: SignMatrix, m: int) -> ModularDesign:
    """D = (C + J) / 2 for the core C of a normalized MH(n, m), m odd, gcd(m, n) = 1."""
    n = H.order
    if m < 3 or m % 2 == 0:
        raise CoreError("even-modulus", f"modulus must be odd and >= 3, got {m}")
    if n < 3:
        raise CoreError("small-order", f"order must be >= 3, got {n}")
    if math.gcd(m, n) != 1:
        raise CoreError("not-coprime", f"gcd({m}, {n}) != 1")
    if not H.is_normalized():
        raise CoreError("not-normalized", "matrix must be normalized")
    if not is_modular_hadamard(H, m):
        raise CoreError("not-hadamard", f"matrix is not an MH({n},{m})")
    C = extract_core(H).entries
    return ModularDesign(BinaryMatrix._trusted((C + 1) // 2), core_params(n, m))


def example_block_26(R: ModularDesign) -> ModularDesign:
    """[[R, J - I], [J - I, J - R^T]] for a (13, 4, 1) design R; a (26, 1, 2; 5) design."""
    if exact_params(R.matrix) != (13, 4, 1):
        raise DesignError(f"expected a (13,4,1) design, got {R.params}")
    r = R.matrix.entries
    J = np.ones((13, 13), dtype=np.uint8)
    JI = J - np.eye(13, dtype=np.uint8)
    block = np.block([[r, JI], [JI, J - r.T]])
    return ModularDesign(BinaryMatrix._trusted(block), DesignParams(26, 1, 2, 5))


R13_ROW = (1, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0)
D21_SET = (3, 6, 7, 12, 14)
B11_SET = (1, 3, 4, 5, 9)

# exact parameters of the symmetric designs; D26 is only a mod-5 design
EXACT_PARAMS = {
    "R13": (13, 4, 1),
    "D21": (21, 5, 1),
    "D16": (16, 6, 2),
    "B11": (11, 5, 2),
    "B11C": (11, 6, 3),
}
CATALOG_NAMES = ("R13", "D26", "D21", "D16", "B11", "B11C")


def _menon16() -> BinaryMatrix:
    # regular Hadamard matrix with row sums 4; its -1 positions form a (16,6,2) design
    base = canonical("JMinusTwoI", 4)
    H = kronecker(base, base)
    if not is_modular_hadamard(H, 0):
        raise AssertionError("(J-2I)_4 (x) (J-2I)_4 is not Hadamard")
    return BinaryMatrix._trusted((1 - H.entries) // 2)


@lru_cache(maxsize=None)
def _catalog_matrix(name: str) -> BinaryMatrix:
    if name == "R13":
        return circulant(R13_ROW)
    if name == "D26":
        return example_block_26(catalog("R13", 5)).matrix
    if name == "D21":
        return from_difference_set(DifferenceSetSpec(21, D21_SET)).matrix
    if name == "D16":
        return _menon16()
    if name == "B11":
        return from_difference_set(DifferenceSetSpec(11, B11_SET)).matrix
    if name == "B11C":
        return complement(catalog("B11", 5)).matrix
    raise KeyError(f"unknown catalog design {name!r}; known: {', '.join(CATALOG_NAMES)}")


def catalog(name: str, m: int = 5) -> ModularDesign:
    """A base design viewed mod m.

    Exact designs are valid for every m >= 2; D26 only for m = 5.
    """
    mat = _catalog_matrix(name)
    if name in EXACT_PARAMS:
        v, k, lam = EXACT_PARAMS[name]
        return ModularDesign(mat, DesignParams(v, k, lam, m))
    return ModularDesign(mat, DesignParams(26, 1, 2, m))


def exact_params(D: BinaryMatrix) -> tuple[int, int, int] | None:
    """(v, k, lambda) if D is an exact symmetric design, else None."""
    a = D.entries.astype(np.int64)
    sums = np.concatenate([a.sum(axis=1), a.sum(axis=0)])
    if np.any(sums != sums[0]):
        return None
    G = a @ a.T
    off = G[~np.eye(D.order, dtype=bool)]
    if off.size and np.any(off != off[0]):
        return None
    return D.order, int(sums[0]), int(off[0]) if off.size else 0


def singer_candidates(v: int = 21, k: int = 5) -> Iterable[tuple[int, ...]]:
    """Brute-force all k-subsets of Z_v containing 0 whose nonzero differences occur once."""
    for rest in combinations(range(1, v), k - 1):
        s = DifferenceSetSpec(v, (0, *rest))
        if set(difference_counts(s)[1:]) == {1}:
            yield s.elements
