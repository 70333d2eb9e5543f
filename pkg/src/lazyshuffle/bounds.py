"""Length bounds for each network family, compared exactly where possible."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _le_half_nlogn_plus_2n(length: int, n: int) -> bool:
    # length <= n*log2(n)/2 + 2n  <=>  4**(length-2n) <= n**n
    excess = length - 2 * n
    return excess <= 0 or 4**excess <= n**n


def _le_c_nlogn(length: int, n: int, c: int) -> bool:
    # length <= c*n*log2(n)  <=>  2**length <= n**(c*n)
    return 2**length <= n ** (c * n)


def _le_4n_log2sq(length: int, n: int) -> bool:
    if _is_pow2(n):
        t = n.bit_length() - 1
        return length <= 4 * n * t * t
    with mpmath.workdps(60):
        bound = 4 * n * mpmath.log(n, 2) ** 2
        # the bound is irrational here, so a 60-digit gap decides it
        return mpmath.mpf(length) < bound


FAMILIES = ("placement", "ktuple", "u2", "hypercube", "strong1", "reach2", "division", "strong2")


@dataclass(frozen=True)
class BoundLedger:
    """A produced length next to the published bound for its family."""

    family: str
    n: int
    length: int
    bound: float
    exact: bool  # the family meets its bound with equality
    formula: str
    k: int = 0

    @property
    def ok(self) -> bool:
        return _fits(self.family, self.n, self.length, self.k)


def _fits(family: str, n: int, length: int, k: int = 0) -> bool:
    if family == "placement":
        return length == n - 1
    if family == "ktuple":
        return length == k * n - k * (k + 1) // 2
    if family == "u2":
        return length == 2 * n - 3
    if family == "hypercube":
        t = n.bit_length() - 1
        return length == t * (1 << t) // 2
    if family == "strong1":
        return _le_half_nlogn_plus_2n(length, n)
    if family == "reach2":
        return length == -(-3 * n // 2) - 2
    if family == "division":
        return _le_c_nlogn(length, n, 3)
    if family == "strong2":
        return length == 0 if n == 1 else _le_4n_log2sq(length, n)
    raise ValueError(f"unknown family {family!r}")


def bound_value(family: str, n: int, k: int = 0) -> tuple[float, bool, str]:
    """(value, met-with-equality, formula) for the family's length bound."""
    lg = math.log2(n) if n > 0 else 0.0
    if family == "placement":
        return n - 1, True, "n-1"
    if family == "ktuple":
        return k * n - k * (k + 1) // 2, True, "kn-k(k+1)/2"
    if family == "u2":
        return 2 * n - 3, True, "2n-3"
    if family == "hypercube":
        return n * lg / 2, True, "n log2(n)/2"
    if family == "strong1":
        return n * lg / 2 + 2 * n, _is_pow2(n), "n log2(n)/2 + 2n"
    if family == "reach2":
        return -(-3 * n // 2) - 2, True, "ceil(3n/2)-2"
    if family == "division":
        return 3 * n * lg, False, "3n log2(n)"
    if family == "strong2":
        return (0 if n == 1 else 4 * n * lg * lg), n == 1, "4n log2(n)^2"
    raise ValueError(f"unknown family {family!r}")


def ledger(family: str, n: int, length: int, k: int = 0) -> BoundLedger:
    value, exact, formula = bound_value(family, n, k)
    return BoundLedger(family, n, length, value, exact, formula, k)


def half_nlogn_ceil(n: int) -> int:
    """Smallest integer l with 4**l >= n**n, i.e. ceil(n*log2(n)/2)."""
    target = n**n
    lo = 0
    while 4**lo < target:
        lo += 1
    return lo
