"""Idealized broken-edge model, score-tile tables and asymptote series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from ._accel import HAS_NUMBA, njit
from .tilesearch import lower_bound, score_counts


class TieError(RuntimeError):
    """Two variates inside one window compared equal."""


def window_probability(m: int) -> Fraction:
    """Chance that a variate is the maximum of a window of exactly ``m``."""
    if m < 1:
        raise ValueError("window size must be >= 1")
    return Fraction(2, (m + 1) * (m + 2))


def partial_break_sum(M: int, T: int) -> Fraction:
    """``sum_{m=M}^{T} p(m)`` accumulated term by term."""
    total = Fraction(0)
    for m in range(M, T + 1):
        total += window_probability(m)
    return total


def exact_break_frequency(M: int) -> Fraction:
    """``2/(M+1)``: the sum of ``p(m)`` over ``m >= M``."""
    if M < 1:
        raise ValueError("M must be >= 1")
    return Fraction(2, M + 1)


@dataclass(frozen=True)
class IdealModelResult:
    M: int
    steps: int
    breaks: int
    std_error: float
    seed: int

    @property
    def observed(self) -> Fraction:
        return Fraction(self.breaks, self.steps)

    @property
    def exact(self) -> Fraction:
        return exact_break_frequency(self.M)

    @property
    def z(self) -> float:
        if self.std_error == 0:
            return 0.0 if self.observed == self.exact else math.inf
        return (float(self.observed) - float(self.exact)) / self.std_error

    def summary(self) -> str:
        return (
            f"M={self.M} steps={self.steps} breaks={self.breaks} observed={float(self.observed):.6f} "
            f"exact={float(self.exact):.6f} std_error={self.std_error:.6f} z={self.z:+.2f}"
        )


# ---------------------------------------------------------------------------
# kernels: flag[t] = 1 when the window argmax moves between window t and t+1


@njit(cache=True)
def _argmax_moves_deque(x, M):
    n_windows = x.shape[0] - M + 1
    flags = np.zeros(n_windows - 1, np.int8)
    dq = np.empty(x.shape[0], np.int64)
    head = 0
    tail = 0
    prev = -1
    for j in range(x.shape[0]):
        while tail > head and x[dq[tail - 1]] <= x[j]:
            if x[dq[tail - 1]] == x[j]:
                return flags, j
            tail -= 1
        dq[tail] = j
        tail += 1
        if dq[head] <= j - M:
            head += 1
        if j >= M - 1:
            cur = dq[head]
            if prev >= 0 and cur != prev:
                flags[j - M] = 1
            prev = cur
    return flags, -1


def _argmax_moves_numpy(x, M):
    win = np.lib.stride_tricks.sliding_window_view(x, M)
    top = win.max(axis=1)
    arg = win.argmax(axis=1) + np.arange(win.shape[0])
    if M > 1:
        dup = np.flatnonzero((win == top[:, None]).sum(axis=1) > 1)
        if dup.size:
            return np.zeros(0, np.int8), int(dup[0] + M - 1)
    return (arg[1:] != arg[:-1]).astype(np.int8), -1


argmax_moves = _argmax_moves_deque if HAS_NUMBA else _argmax_moves_numpy


def simulate_ideal(M: int, steps: int, seed: int = 0, batches: int = 100) -> IdealModelResult:
    """Monte Carlo break frequency of the sliding-window argmax.

    Variates are raw 64-bit outputs of a seeded PCG64 stream compared as
    integers. The first ``M`` draws fill the window; then each of ``steps``
    draws advances it once. The standard error comes from batch means, since
    neighbouring breaks are correlated.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if steps < 10 * M:
        raise ValueError(f"need steps >= 10*M = {10 * M}")
    rng = np.random.Generator(np.random.PCG64(seed))
    x = rng.bit_generator.random_raw(steps + M)
    flags, tie_at = argmax_moves(x, M)
    if tie_at >= 0:
        raise TieError(f"tied 64-bit variates near position {tie_at} (seed {seed}); rerun with another seed")
    breaks = int(flags.sum())
    batches = max(2, min(batches, steps // max(M, 1)))
    means = np.array([b.mean() for b in np.array_split(flags.astype(np.float64), batches)])
    std_error = float(means.std(ddof=1) / math.sqrt(batches))
    return IdealModelResult(M, steps, breaks, std_error, seed)


# ---------------------------------------------------------------------------
# tables and series


@dataclass(frozen=True)
class ScoreRow:
    K: int
    M: int
    internal: int
    broken: int

    @property
    def total(self) -> int:
        return self.K ** (self.M + 1)

    @property
    def fraction(self) -> float:
        return self.broken / self.total

    @property
    def bound_fraction(self) -> float:
        return float(lower_bound(self.K, self.M).bound_real / self.total)


def score_table(K_range: Iterable[int], M_range: Iterable[int]) -> list[ScoreRow]:
    M_range = list(M_range)
    rows = []
    for K in K_range:
        for M in M_range:
            internal, broken = score_counts(K, M)
            rows.append(ScoreRow(K, M, internal, broken))
    return rows


CSV_HEADER = "K,M,internal,broken,fraction,two_over_M,bound_fraction"


def score_table_csv(rows: list[ScoreRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(f"{r.K},{r.M},{r.internal},{r.broken},{r.fraction:.8f},{2 / r.M:.8f},{r.bound_fraction:.8f}")
    return "\n".join(lines) + "\n"


def log_corrected(K: int, M: int) -> float:
    """Heuristic ``2 / (M + 1 - log_K(M)/2)`` curve."""
    return 2.0 / (M + 1 - math.log(M, K) / 2)


@dataclass(frozen=True)
class SeriesRow:
    M: int
    broken: int
    broken_fraction: float
    two_over_M: float
    one_over_M: float
    log_corrected: float
    bound_fraction: float


def asymptote_series(K: int, M_range: Iterable[int]) -> list[SeriesRow]:
    rows = []
    for M in M_range:
        _, broken = score_counts(K, M)
        total = K ** (M + 1)
        rows.append(SeriesRow(
            M, broken, broken / total, 2 / M, 1 / M, log_corrected(K, M),
            float(lower_bound(K, M).bound_real / total),
        ))
    return rows


SERIES_HEADER = "M\tbroken\tbroken_fraction\ttwo_over_M\tone_over_M\tlog_corrected\tbound_fraction"


def series_tsv(rows: list[SeriesRow]) -> str:
    lines = [SERIES_HEADER]
    for r in rows:
        lines.append(f"{r.M}\t{r.broken}\t{r.broken_fraction:.8f}\t{r.two_over_M:.8f}\t"
                     f"{r.one_over_M:.8f}\t{r.log_corrected:.8f}\t{r.bound_fraction:.8f}")
    return "\n".join(lines) + "\n"
