"""K-ary expansion score tiles.

Scores are kept as integers scaled by ``K**(M+1)``: the infinite tail of
``(K-1)`` boundary digits sums to exactly ``K**i`` in those units, so ties
are exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .._accel import HAS_NUMBA, njit
from ..graphs import index_to_word
from ..stratification import TileGraph


def scaled_score(word: Sequence[int], i: int, K: int) -> int:
    """``phi_i(word) * K**(M+1)`` as an exact integer."""
    M = len(word)
    if not 0 <= i <= M:
        raise ValueError(f"position {i} outside [0, {M}]")
    if any(not 0 <= d < K for d in word):
        raise ValueError(f"word {tuple(word)} has digits outside base {K}")
    lead = 0 if i == 0 else word[i - 1]
    value = (K - 1 - lead) * K**M + K**i
    for j in range(1, M - i + 1):
        value += word[i + j - 1] * K ** (M - j)
    return value


def score(word: Sequence[int], i: int, K: int) -> Fraction:
    return Fraction(scaled_score(word, i, K), K ** (len(word) + 1))


def is_tie_pattern(x: int, K: int, M: int) -> bool:
    """Word ends in ``n >= 1`` digits ``K-1`` with every earlier digit below ``K-1``."""
    word = index_to_word(x, K, M)
    n = 0
    while n < M and word[M - 1 - n] == K - 1:
        n += 1
    return n >= 1 and all(d < K - 1 for d in word[: M - n])


def tie_node_count(K: int, M: int) -> int:
    """Number of words matching the tie pattern, ``sum_{j<M} (K-1)**j``."""
    if K < 2 or M < 1:
        raise ValueError("need K >= 2 and M >= 1")
    if K == 2:
        return M
    return ((K - 1) ** M - 1) // (K - 2)


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True)
def _levels_loop(K, M):
    n = K**M
    KM = K**M
    levels = np.empty(n, np.int64)
    ties = np.empty(n, np.int64)
    for x in range(n):
        best = -1
        arg = 0
        count = 0
        tail_mod = KM
        powi = 1
        for i in range(M + 1):
            if i == 0:
                lead = 0
            else:
                lead = (x // (KM // powi)) % K
            s = (K - 1 - lead) * KM + (x % tail_mod) * powi + powi
            if best < 0 or s < best:
                best = s
                arg = i
                count = 1
            elif s == best:
                count += 1
            tail_mod //= K
            powi *= K
        levels[x] = arg
        ties[x] = count
    return levels, ties


def _levels_numpy(K, M):
    n = K**M
    x = np.arange(n, dtype=np.int64)
    best = None
    for i in range(M + 1):
        lead = 0 if i == 0 else (x // K ** (M - i)) % K
        s = (K - 1 - lead) * K**M + (x % K ** (M - i)) * K**i + K**i
        if best is None:
            best = s
            levels = np.zeros(n, np.int64)
            ties = np.ones(n, np.int64)
            continue
        lower = s < best
        ties[s == best] += 1
        ties[lower] = 1
        levels[lower] = i
        best = np.minimum(best, s)
    return levels, ties


@njit(cache=True)
def _internal_loop(levels, K):
    n = levels.shape[0]
    count = 0
    for u in range(n):
        for m in range(K):
            if levels[u] == levels[(K * u + m) % n] + 1:
                count += 1
    return count


def _internal_numpy(levels, K):
    n = levels.shape[0]
    u = np.arange(n, dtype=np.int64)
    return int(sum(int(np.count_nonzero(levels == levels[(K * u + m) % n] + 1)) for m in range(K)))


if HAS_NUMBA:
    raw_levels, count_internal = _levels_loop, _internal_loop
else:
    raw_levels, count_internal = _levels_numpy, _internal_numpy


def score_levels(K: int, M: int) -> np.ndarray:
    """Level of every word of ``B_K^M``: the argmin position, tie nodes on ``M``."""
    if K < 2 or M < 1:
        raise ValueError("need K >= 2 and M >= 1")
    if K ** (M + 1) >= 2**62:
        raise ValueError(f"K^(M+1) = {K}^{M + 1} overflows the scaled integer scores")
    levels, ties = raw_levels(K, M)
    tied = np.flatnonzero(ties > 1)
    for x in tied:
        # only words ending in a run of K-1 digits can tie
        assert is_tie_pattern(int(x), K, M), f"unexpected score tie at {index_to_word(int(x), K, M)}"
    levels[tied] = M
    return levels


def tied_words(K: int, M: int) -> np.ndarray:
    """Words whose minimum score is attained at more than one position."""
    _, ties = raw_levels(K, M)
    return np.flatnonzero(ties > 1)


def score_counts(K: int, M: int) -> tuple[int, int]:
    """``(internal, broken)`` edge counts of the score tile without building it."""
    internal = int(count_internal(score_levels(K, M), K))
    return internal, K ** (M + 1) - internal


def score_tile(K: int, M: int) -> TileGraph:
    return TileGraph.from_levels(K, M, score_levels(K, M))
