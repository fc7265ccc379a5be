"""Exact +-1 matrix arithmetic and the modular Hadamard check.

A matrix H of order n is an MH(n, m) when H H^T = nI (mod m); m = 0 asks for
an exact (real) Hadamard matrix. All arithmetic is over the integers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _bits


class MatrixFormatError(ValueError):
    """Malformed matrix or design text; carries the first offending position."""

    def __init__(self, message: str, line: int, column: int = 0):
        where = f"line {line}" + (f", column {column}" if column else "")
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


class NotNormalizedError(ValueError):
    pass


def check_modulus(m: int) -> int:
    m = int(m)
    if m < 0 or m == 1:
        raise ValueError(f"modulus must be 0 or >= 2, got {m}")
    return m


def parse_rows(rows: list[str], n: int, alphabet: str, first_line: int) -> np.ndarray:
    """Decode n rows of n symbols each into indices into `alphabet`.

    Raises MatrixFormatError at the first offending line and column.
    """
    out = np.empty((n, n), dtype=np.uint8)
    codes = np.frombuffer(alphabet.encode("ascii"), dtype=np.uint8)
    lut = np.full(256, 255, dtype=np.uint8)
    lut[codes] = np.arange(len(codes), dtype=np.uint8)
    # fast path: decode the whole block at once; rescan row by row only to locate an error
    blob = "".join(rows).encode("utf-8")
    if len(rows) == n and len(blob) == n * n:
        vals = lut[np.frombuffer(blob, dtype=np.uint8)]
        if not (vals == 255).any():
            return vals.reshape(n, n)
    for i, row in enumerate(rows):
        raw = np.frombuffer(row.encode("utf-8"), dtype=np.uint8)
        vals = lut[raw]
        bad = np.flatnonzero(vals == 255)
        if bad.size:
            col = len(row.encode("utf-8")[: bad[0]].decode("utf-8", "replace")) + 1
            raise MatrixFormatError(f"unexpected character {row[col - 1]!r}", first_line + i, col)
        if raw.size != n:
            raise MatrixFormatError(f"row has {raw.size} entries, expected {n}", first_line + i, raw.size + 1)
        out[i] = vals
    return out


class SignMatrix:
    """Immutable square matrix over {+1, -1}.

    Rows are bit-packed lazily for the Gram kernels; verified moduli are
    memoized on the instance since the entries never change.
    """

    __slots__ = ("_a", "_packed", "_verified")

    def __init__(self, entries: Iterable | np.ndarray):
        a = np.array(entries, dtype=np.int8)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all((a == 1) | (a == -1)):
            raise ValueError("entries must be +1 or -1")
        a.setflags(write=False)
        self._a = a
        self._packed = None
        self._verified: dict[int, bool] = {}

    @classmethod
    def _trusted(cls, a: np.ndarray) -> SignMatrix:
        # internal constructor for arrays already known to be square and +-1
        obj = cls.__new__(cls)
        a = np.ascontiguousarray(a, dtype=np.int8)
        a.setflags(write=False)
        obj._a = a
        obj._packed = None
        obj._verified = {}
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
            self._packed = _bits.pack_rows(self._a < 0)
        return self._packed

    def __eq__(self, other):
        if not isinstance(other, SignMatrix):
            return NotImplemented
        return np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash((self.order, self._a.tobytes()))

    def __neg__(self) -> SignMatrix:
        return SignMatrix._trusted(-self._a)

    def __repr__(self):
        return f"SignMatrix(order={self.order})"

    def is_normalized(self) -> bool:
        return bool(np.all(self._a[0] == 1) and np.all(self._a[:, 0] == 1))

    def to_text(self, m: int) -> str:
        """Serialize as `MH <n> <m>` followed by one `+`/`-` line per row."""
        table = np.array([ord("-"), ord("+")], dtype=np.uint8)
        body = table[(self._a > 0).astype(np.uint8)]
        body = np.hstack([body, np.full((self.order, 1), ord("\n"), dtype=np.uint8)])
        return f"MH {self.order} {m}\n" + body.tobytes().decode("ascii")

    @classmethod
    def from_text(cls, text: str) -> tuple[SignMatrix, int]:
        """Parse the `MH` text format; returns the matrix and the header modulus."""
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        else:
            raise MatrixFormatError("missing trailing newline", max(len(lines), 1))
        if not lines:
            raise MatrixFormatError("empty input", 1)
        header = lines[0].split(" ")
        if len(header) != 3 or header[0] != "MH":
            raise MatrixFormatError("header must be 'MH <n> <m>'", 1, 1)
        try:
            n, m = int(header[1]), int(header[2])
        except ValueError:
            raise MatrixFormatError("header fields must be integers", 1, 4) from None
        if n < 1 or m < 0 or m == 1:
            raise MatrixFormatError(f"invalid order/modulus {n} {m}", 1, 4)
        if len(lines) - 1 != n:
            raise MatrixFormatError(f"expected {n} rows, found {len(lines) - 1}", len(lines) + 1)
        plus = parse_rows(lines[1:], n, "+-", first_line=2)
        return cls._trusted(np.where(plus == 0, 1, -1)), m


@dataclass(frozen=True)
class GramResidues:
    """Off-diagonal entries of H H^T reduced mod m (exact when m = 0).

    The diagonal is always exactly n and is not stored. `upper` holds the
    strictly upper triangle in row-major order; the Gram matrix is symmetric.
    """

    order: int
    modulus: int
    upper: np.ndarray

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if i == j:
            raise IndexError("diagonal entries are not stored")
        if i > j:
            i, j = j, i
        n = self.order
        return int(self.upper[i * n - i * (i + 1) // 2 + (j - i - 1)])

    def is_zero(self) -> bool:
        return not np.any(self.upper)


def gram_offdiag(H: SignMatrix, m: int) -> GramResidues:
    m = check_modulus(m)
    upper = _bits.sign_gram_upper(H.packed, H.order, m)
    return GramResidues(H.order, m, upper)


def first_violation(H: SignMatrix, m: int) -> tuple[int, int] | None:
    """The first row pair (i, j) breaking H H^T = nI (mod m), or None."""
    m = check_modulus(m)
    i, j = _bits.sign_first_violation(H.packed, H.order, m)
    return None if i < 0 else (int(i), int(j))


def is_modular_hadamard(H: SignMatrix, m: int) -> bool:
    m = check_modulus(m)
    cached = H._verified.get(m)
    if cached is None:
        cached = first_violation(H, m) is None
        H._verified[m] = cached
    return cached


def normalize(H: SignMatrix) -> SignMatrix:
    """Negate columns with a -1 in the first row, then rows with a -1 in the first column."""
    a = H.entries * H.entries[0][np.newaxis, :]
    a = a * a[:, 0][:, np.newaxis]
    return SignMatrix._trusted(a)


def extract_core(H: SignMatrix) -> SignMatrix:
    if H.order < 2:
        raise ValueError("the core needs order >= 2")
    if not H.is_normalized():
        raise NotNormalizedError("core extraction requires a normalized matrix")
    return SignMatrix._trusted(H.entries[1:, 1:])


def kronecker(A: SignMatrix, B: SignMatrix) -> SignMatrix:
    return SignMatrix._trusted(np.kron(A.entries, B.entries))


def combined_modulus(m1: int, n1: int, m2: int, n2: int) -> int:
    """Modulus guaranteed for MH(n1, m1) (x) MH(n2, m2): gcd(m1 m2, m1 n2, m2 n1).

    math.gcd already treats 0 as the identity, so a result of 0 means the
    product is exactly Hadamard.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("orders must be positive")
    return math.gcd(m1 * m2, m1 * n2, m2 * n1)


class Builder(str, enum.Enum):
    ALL_ONES = "AllOnes"
    J_MINUS_TWO_I = "JMinusTwoI"
    F2 = "F2"
    F1 = "F1"
    H12 = "H12"

    @property
    def fixed_order(self) -> int | None:
        return {"F2": 2, "F1": 1, "H12": 12}.get(self.value)


def _paley_h12() -> np.ndarray:
    # Paley type I with q = 11: border the skew Jacobsthal matrix, add I.
    q = 11
    squares = {(x * x) % q for x in range(1, q)}
    chi = np.array([0] + [1 if d in squares else -1 for d in range(1, q)], dtype=np.int8)
    idx = np.arange(q)
    Q = chi[(idx[np.newaxis, :] - idx[:, np.newaxis]) % q]
    S = np.zeros((q + 1, q + 1), dtype=np.int8)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    return S + np.eye(q + 1, dtype=np.int8)


_H12: SignMatrix | None = None


def _h12() -> SignMatrix:
    global _H12
    if _H12 is None:
        H = SignMatrix(_paley_h12())
        if not is_modular_hadamard(H, 0):
            raise AssertionError("Paley order-12 matrix failed its exact Gram check")
        _H12 = H
    return _H12


def canonical(kind: Builder | str, n: int | None = None) -> SignMatrix:
    """The named base matrix; n is used only for AllOnes and JMinusTwoI."""
    kind = Builder(kind)
    if kind is Builder.F1:
        return SignMatrix._trusted(np.ones((1, 1)))
    if kind is Builder.F2:
        return SignMatrix._trusted(np.array([[1, 1], [1, -1]]))
    if kind is Builder.H12:
        return _h12()
    if n is None or n < 1:
        raise ValueError(f"{kind.value} needs an order n >= 1")
    J = np.ones((n, n), dtype=np.int8)
    if kind is Builder.ALL_ONES:
        return SignMatrix._trusted(J)
    return SignMatrix._trusted(J - 2 * np.eye(n, dtype=np.int8))
