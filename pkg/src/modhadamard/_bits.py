"""Bit-packed row kernels.

Rows are packed into uint64 words. For sign rows a set bit means -1, so the
dot product of two sign rows of length n is n - 2*popcount(a ^ b). For 0/1
rows the inner product is popcount(a & b). Padding bits are zero in every
row and never contribute.
"""

from __future__ import annotations

import numpy as np
from llvmlite import ir
from numba import njit, types
from numba.extending import intrinsic


@intrinsic
def _popcount(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        fn = builder.module.declare_intrinsic("llvm.ctpop", [ir.IntType(64)])
        return builder.call(fn, args)

    return sig, codegen


@njit(cache=True, inline="always")
def popcount(x):
    return _popcount(np.uint64(x))


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D boolean array row-wise into a (rows, words) uint64 array."""
    rows = bits.shape[0]
    packed = np.packbits(bits.astype(bool), axis=1)
    pad = (-packed.shape[1]) % 8
    if pad or packed.shape[1] == 0:
        packed = np.pad(packed, ((0, 0), (0, pad if packed.shape[1] else 8)))
    return np.ascontiguousarray(packed).view(np.uint64).reshape(rows, -1)


@njit(cache=True)
def _residue(d, m):
    if m == 0:
        return d
    r = d % m
    if r < 0:
        r += m
    return r


@njit(cache=True)
def sign_first_violation(P, n, m):
    """First pair (i, j), i < j, whose sign dot product is nonzero mod m."""
    rows, words = P.shape
    for i in range(rows):
        for j in range(i + 1, rows):
            c = 0
            for w in range(words):
                c += popcount(P[i, w] ^ P[j, w])
            if _residue(n - 2 * c, m) != 0:
                return i, j
    return -1, -1


@njit(cache=True)
def sign_gram_upper(P, n, m):
    """Residues of the strictly upper triangle of the sign Gram matrix, row-major."""
    rows, words = P.shape
    out = np.empty(rows * (rows - 1) // 2, dtype=np.int64)
    t = 0
    for i in range(rows):
        for j in range(i + 1, rows):
            c = 0
            for w in range(words):
                c += popcount(P[i, w] ^ P[j, w])
            out[t] = _residue(n - 2 * c, m)
            t += 1
    return out


@njit(cache=True)
def and_first_violation(P, m, k, lam):
    """First pair (i, j), i <= j, whose 0/1 inner product misses its target mod m.

    The target is k on the diagonal and lam off it.
    """
    rows, words = P.shape
    for i in range(rows):
        for j in range(i, rows):
            c = 0
            for w in range(words):
                c += popcount(P[i, w] & P[j, w])
            want = k if i == j else lam
            if _residue(c, m) != want:
                return i, j
    return -1, -1


@njit(cache=True)
def and_offdiag_common(P, m):
    """The common off-diagonal inner-product residue, or -1 if they differ."""
    rows, words = P.shape
    common = -1
    for i in range(rows):
        for j in range(i + 1, rows):
            c = 0
            for w in range(words):
                c += popcount(P[i, w] & P[j, w])
            r = _residue(c, m)
            if common == -1:
                common = r
            elif r != common:
                return -1
    return common
