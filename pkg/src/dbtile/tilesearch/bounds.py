from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class BoundReport:
    """Lower bound on broken edges per tile of ``K**M`` words."""

    K: int
    M: int
    best_N: int
    bound_real: Fraction
    asymptotic: Fraction

    @property
    def bound_int(self) -> int:
        return math.ceil(self.bound_real)

    @property
    def max_internal(self) -> int:
        return self.K ** (self.M + 1) - self.bound_int

    def summary(self) -> str:
        return f"best_N={self.best_N} bound={float(self.bound_real):g} ceil={self.bound_int}"


def path_bound(K: int, M: int, N: int) -> Fraction:
    """Path-counting bound ``(K**(M+1) - K**(2M+1-N)) / N`` for one host size."""
    return (Fraction(K ** (M + 1)) - Fraction(K) ** (2 * M + 1 - N)) / N


def lower_bound(K: int, M: int) -> BoundReport:
    if K < 2 or M < 1:
        raise ValueError("need K >= 2 and M >= 1")
    best_N, best = None, None
    for N in range(M + 1, 4 * M + 9):
        b = path_bound(K, M, N)
        if best is None or b > best:
            best_N, best = N, b
    return BoundReport(K, M, best_N, best, Fraction(K ** (M + 1), M))
