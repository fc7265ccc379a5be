"""Lifting designs to modular Hadamard matrices: 2D - J and direct sums."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .designs import BinaryMatrix, DesignParams, ModularDesign
from .matrix import SignMatrix, is_modular_hadamard


class CongruenceError(ValueError):
    """A required congruence failed; both sides are kept for diagnosis."""

    def __init__(self, message: str, lhs: int, rhs: int, m: int):
        super().__init__(f"{message}: {lhs} != {rhs} (mod {m})")
        self.lhs = lhs
        self.rhs = rhs
        self.m = m


class CompatibilityError(ValueError):
    def __init__(self, report: CompatibilityReport):
        failed = [f"condition {i}: {lhs} != {rhs} (mod {report.m})"
                  for i, (ok, lhs, rhs) in enumerate(report.conditions, 1) if not ok]
        super().__init__("designs are not direct-sum compatible; " + "; ".join(failed))
        self.report = report


@dataclass(frozen=True)
class CompatibilityReport:
    """The three direct-sum congruences, each as (holds, lhs mod m, rhs mod m).

    1. v2 = -v1 + 4k1 - 4lambda1
    2. 2k2 = 2k1 - 4lambda1
    3. 4lambda2 = -4lambda1
    """

    m: int
    conditions: tuple[tuple[bool, int, int], ...]

    @property
    def condition1(self) -> bool:
        return self.conditions[0][0]

    @property
    def condition2(self) -> bool:
        return self.conditions[1][0]

    @property
    def condition3(self) -> bool:
        return self.conditions[2][0]

    @property
    def overall(self) -> bool:
        return all(ok for ok, _, _ in self.conditions)


def two_design_hadamard(D: ModularDesign, check: bool = True) -> SignMatrix:
    """2D - J, an MH(v, m) exactly when v = 4(k - lambda) (mod m)."""
    p = D.params
    lhs, rhs = p.v % p.m, (4 * (p.k - p.lam)) % p.m
    if lhs != rhs:
        raise CongruenceError("2D-J needs v = 4(k - lambda)", lhs, rhs, p.m)
    H = SignMatrix._trusted(2 * D.matrix.entries.astype(np.int8) - 1)
    if check and not is_modular_hadamard(H, p.m):
        raise AssertionError(f"2D-J from a {p} design failed verification")
    return H


def direct_sum(D1: ModularDesign, D2: ModularDesign) -> BinaryMatrix:
    v1, v2 = D1.v, D2.v
    out = np.ones((v1 + v2, v1 + v2), dtype=np.uint8)
    out[:v1, :v1] = D1.matrix.entries
    out[v1:, v1:] = D2.matrix.entries
    return BinaryMatrix._trusted(out)


def check_compatible(p1: DesignParams, p2: DesignParams) -> CompatibilityReport:
    if p1.m != p2.m:
        raise ValueError(f"modulus mismatch: {p1.m} vs {p2.m}")
    m = p1.m

    def cond(lhs, rhs):
        lhs, rhs = lhs % m, rhs % m
        return lhs == rhs, lhs, rhs

    return CompatibilityReport(m, (
        cond(p2.v, -p1.v + 4 * p1.k - 4 * p1.lam),
        cond(2 * p2.k, 2 * p1.k - 4 * p1.lam),
        cond(4 * p2.lam, -4 * p1.lam),
    ))


def direct_sum_hadamard(D1: ModularDesign, D2: ModularDesign, check: bool = True) -> SignMatrix:
    """2(D1 (+) D2) - J, an MH(v1 + v2, m) when the three congruences hold."""
    report = check_compatible(D1.params, D2.params)
    if not report.overall:
        raise CompatibilityError(report)
    H = SignMatrix._trusted(2 * direct_sum(D1, D2).entries.astype(np.int8) - 1)
    if check and not is_modular_hadamard(H, D1.m):
        raise AssertionError(f"direct sum of {D1.params} and {D2.params} failed verification")
    return H
