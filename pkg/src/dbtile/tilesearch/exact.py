"""Exact branch-and-bound over level maps of ``B_K^M``.

A candidate tile is the saturated edge set of a level map
``sigma: words -> {0..L}`` (every ``B_K^M`` edge with
``sigma(u) = sigma(v) + 1``). The search maximizes the edge count subject to
every loop having height at most ``M``.

Two upper bounds prune it:

* blocks: ``B_K^M`` splits into ``K**(M-1)`` complete bipartite ``K x K``
  blocks (parents ``a y``, children ``y b``). Each block is relaxed on its
  own, which lets every free vertex pick a level per block.
* necklaces: rotation classes of ``(M+1)``-words are edge-disjoint directed
  cycles, and each loses at least one edge.
"""

from __future__ import annotations

import enum
import itertools
import logging
import time
from dataclasses import dataclass

import numpy as np

from .._accel import njit
from ..graphs import index_to_word, word_to_index
from ..stratification import TileGraph, block_span, validate_tile
from .score import score_levels

log = logging.getLogger(__name__)

DEFAULT_MAX_WORDS = 32


class SearchStatus(str, enum.Enum):
    PROVED_OPTIMAL = "ProvedOptimal"
    BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass(frozen=True)
class ExactResult:
    tile: TileGraph
    status: SearchStatus
    nodes: int
    seconds: float
    level_range: int

    @property
    def proved(self) -> bool:
        return self.status is SearchStatus.PROVED_OPTIMAL


def necklace_ids(K: int, M: int) -> tuple[np.ndarray, int]:
    """Necklace class of each edge ``e = u*K + m`` (the word ``u m``)."""
    n_words = K ** (M + 1)
    canon = {}
    ids = np.empty(n_words, np.int64)
    top = K**M
    for w in range(n_words):
        r, best = w, w
        for _ in range(M):
            r = (r % top) * K + r // top
            best = min(best, r)
        ids[w] = canon.setdefault(best, len(canon))
    return ids, len(canon)


def assignment_order(K: int, M: int) -> np.ndarray:
    """Grow the order by the word with most edges into the already-ordered set."""
    n = K**M
    nbrs = [set() for _ in range(n)]
    for u in range(n):
        for m in range(K):
            v = (K * u + m) % n
            if v != u:
                nbrs[u].add(v)
                nbrs[v].add(u)
    placed = [False] * n
    weight = [0] * n
    order = []
    for _ in range(n):
        x = max((v for v in range(n) if not placed[v]), key=lambda v: (weight[v], -v))
        placed[x] = True
        order.append(x)
        for y in nbrs[x]:
            weight[y] += 1
    return np.array(order, dtype=np.int64)


@njit(cache=True)
def _block_value(pc, cc, fp, fc, L):
    """Best count of satisfied pairs in one block with free vertices placed freely."""
    base = 0
    for lv in range(L):
        base += pc[lv + 1] * cc[lv]
    best_a = 0
    best_b = 0
    best_joint = 0
    for lv in range(L + 1):
        gb = fc * pc[lv + 1] if lv < L else 0  # free children at lv
        if gb > best_b:
            best_b = gb
        if lv >= 1:
            ga = fp * cc[lv - 1]  # free parents at lv
            if ga > best_a:
                best_a = ga
            joint = ga + fc * pc[lv] + fp * fc
            if joint > best_joint:
                best_joint = joint
    if best_a + best_b > best_joint:
        return base + best_a + best_b
    return base + best_joint


@njit(cache=True)
def _touch(v, lvl, sign, level, K, M, n, sub, neck, neck_broken, counters, pc, cc, fp, fc):
    """Apply (sign=+1) or revert (sign=-1) putting word v on level lvl.

    counters = [satisfied, known broken, necklaces without a known broken edge].
    Returns the number of satisfied edges incident to v among assigned words.
    """
    gained = 0
    for m in range(K):
        w = (K * v + m) % n
        if w == v:
            e = v * K + m
            c = neck[e]
            if sign > 0:
                if neck_broken[c] == 0:
                    counters[2] -= 1
                neck_broken[c] += 1
            else:
                neck_broken[c] -= 1
                if neck_broken[c] == 0:
                    counters[2] += 1
            counters[1] += sign
            continue
        if level[w] < 0:
            continue
        e = v * K + m
        if lvl == level[w] + 1:
            counters[0] += sign
            gained += 1
        else:
            c = neck[e]
            if sign > 0:
                if neck_broken[c] == 0:
                    counters[2] -= 1
                neck_broken[c] += 1
            else:
                neck_broken[c] -= 1
                if neck_broken[c] == 0:
                    counters[2] += 1
            counters[1] += sign
    for a in range(K):
        p = a * sub + v // K
        if p == v or level[p] < 0:
            continue
        e = p * K + v % K
        if level[p] == lvl + 1:
            counters[0] += sign
            gained += 1
        else:
            c = neck[e]
            if sign > 0:
                if neck_broken[c] == 0:
                    counters[2] -= 1
                neck_broken[c] += 1
            else:
                neck_broken[c] -= 1
                if neck_broken[c] == 0:
                    counters[2] += 1
            counters[1] += sign
    bp = v % sub
    bc = v // K
    pc[bp, lvl] += sign
    fp[bp] -= sign
    cc[bc, lvl] += sign
    fc[bc] -= sign
    return gained


@njit(cache=True)
def _height_ok(level, K, n, M):
    cnt = 0
    for u in range(n):
        if level[u] < 0:
            continue
        for m in range(K):
            w = (K * u + m) % n
            if level[w] >= 0 and level[u] == level[w] + 1:
                cnt += 1
    src = np.empty(cnt, np.int64)
    dst = np.empty(cnt, np.int64)
    i = 0
    for u in range(n):
        if level[u] < 0:
            continue
        for m in range(K):
            w = (K * u + m) % n
            if level[w] >= 0 and level[u] == level[w] + 1:
                src[i] = u
                dst[i] = w
                i += 1
    return block_span(n, src, dst, level) <= M


def symmetry_table(K: int, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Automorphisms of ``B_K^M`` as word permutations plus a level sign.

    Digit relabelings keep levels; word reversal flips edge direction and so
    negates them. The identity is omitted.
    """
    n = K**M
    words = [index_to_word(x, K, M) for x in range(n)]
    perms, signs = [], []
    for relabel in itertools.permutations(range(K)):
        for reverse in (False, True):
            if not reverse and relabel == tuple(range(K)):
                continue
            table = []
            for w in words:
                img = [relabel[c] for c in w]
                if reverse:
                    img.reverse()
                table.append(word_to_index(img, K))
            perms.append(table)
            signs.append(-1 if reverse else 1)
    return np.array(perms, dtype=np.int64).reshape(len(perms), n), np.array(signs, dtype=np.int64)


@njit(cache=True)
def _lex_ok(d, order, level, perms, signs, status, ptr):
    """Advance the lex-leader comparison against every symmetry at depth d.

    status[d, g]: 0 undecided, 1 already strictly smaller. ptr[d, g] is the
    first order position not yet known to compare equal.
    """
    n_sym = perms.shape[0]
    o0 = order[0]
    for g in range(n_sym):
        st = status[d, g]
        i = ptr[d, g]
        if st == 0:
            img0 = perms[g, o0]
            if level[img0] >= 0:
                base = level[o0]
                sbase = level[img0]
                while i <= d:
                    img = perms[g, order[i]]
                    if level[img] < 0:
                        break
                    a = level[order[i]] - base
                    b = signs[g] * (level[img] - sbase)
                    if a < b:
                        st = 1
                        break
                    if a > b:
                        return False
                    i += 1
        status[d + 1, g] = st
        ptr[d + 1, g] = i
    return True


@njit(cache=True)
def _search(K, M, L, order, neck, level, depth_arr, choice, cand, ncand, lo, hi,
            counters, neck_broken, pc, cc, fp, fc, perms, signs, status, ptr,
            best, best_levels, max_nodes):
    """Resumable depth-first search. Returns (finished, nodes_spent).

    Internal levels live in 0..2L with order[0] pinned at L; lo/hi[d] hold the
    level extremes of order[:d] so the span stays within L.
    """
    n = K**M
    sub = n // K
    n_edges = n * K
    n_blocks = sub
    top = 2 * L
    d = depth_arr[0]
    nodes = 0
    gains = np.empty(top + 1, np.int64)
    while True:
        if d == n:
            if counters[0] > best[0]:
                best[0] = counters[0]
                best_levels[:] = level
            d -= 1
            continue
        if d < 0:
            depth_arr[0] = d
            return True, nodes
        if nodes >= max_nodes:
            depth_arr[0] = d
            return False, nodes
        v = order[d]
        if choice[d] < 0:
            if d == 0:
                cand[0, 0] = L
                ncand[0] = 1
            else:
                first = max(hi[d] - L, 0)
                last = min(lo[d] + L, top)
                # candidate levels by immediate gain, highest first
                for lv in range(first, last + 1):
                    g = 0
                    for m in range(K):
                        w = (K * v + m) % n
                        if w != v and level[w] >= 0 and lv == level[w] + 1:
                            g += 1
                    for a in range(K):
                        p = a * sub + v // K
                        if p != v and level[p] >= 0 and level[p] == lv + 1:
                            g += 1
                    gains[lv] = g
                k = 0
                for g in range(2 * K, -1, -1):
                    for lv in range(first, last + 1):
                        if gains[lv] == g:
                            cand[d, k] = lv
                            k += 1
                ncand[d] = k
            choice[d] = 0
        elif level[v] >= 0:
            _touch(v, level[v], -1, level, K, M, n, sub, neck, neck_broken, counters, pc, cc, fp, fc)
            level[v] = -1
        if choice[d] >= ncand[d]:
            choice[d] = -1
            d -= 1
            continue
        lvl = cand[d, choice[d]]
        choice[d] += 1
        level[v] = lvl
        gained = _touch(v, lvl, 1, level, K, M, n, sub, neck, neck_broken, counters, pc, cc, fp, fc)
        nodes += 1
        if n_edges - counters[1] - counters[2] <= best[0]:
            continue
        bound_block = 0
        for b in range(n_blocks):
            bound_block += _block_value(pc[b], cc[b], fp[b], fc[b], top)
        if bound_block <= best[0]:
            continue
        if gained >= 2 and not _height_ok(level, K, n, M):
            continue
        if not _lex_ok(d, order, level, perms, signs, status, ptr):
            continue
        lo[d + 1] = min(lo[d], lvl) if d > 0 else lvl
        hi[d + 1] = max(hi[d], lvl) if d > 0 else lvl
        d += 1
        choice[d] = -1 if d < n else 0


def exact_optimal_tile(
    K: int,
    M: int,
    level_range: int | None = None,
    budget_seconds: float | None = 60.0,
    max_words: int = DEFAULT_MAX_WORDS,
    incumbent: TileGraph | None = None,
    chunk_nodes: int = 2_000_000,
    symmetry: bool = True,
) -> ExactResult:
    """Maximum-edge saturated tile with levels in ``0..L`` and loop heights <= M.

    ``level_range`` defaults to ``2M+1``. The result is ``ProvedOptimal`` only
    when the whole tree was exhausted within ``budget_seconds``.
    """
    if K < 2 or M < 1:
        raise ValueError("need K >= 2 and M >= 1")
    n = K**M
    if n > max_words:
        raise ValueError(f"K^M = {n} exceeds the exact-search guard of {max_words} words")
    L = 2 * M + 1 if level_range is None else level_range
    if L < 1:
        raise ValueError("level range must be >= 1")

    start = np.asarray(score_levels(K, M), dtype=np.int64) if incumbent is None else None
    if incumbent is not None:
        rep = validate_tile(incumbent)
        if not rep.certified:
            raise ValueError("incumbent tile is not certified")
        start = np.asarray(rep.levels, dtype=np.int64)
    if start.max() - start.min() > L:
        start = np.asarray(score_levels(K, M), dtype=np.int64)
        if start.max() - start.min() > L:
            # no incumbent inside the level range: start from the empty tile
            start = np.zeros(n, np.int64)
    start = start - start.min()
    start_tile = TileGraph.from_levels(K, M, start)

    neck, n_neck = necklace_ids(K, M)
    order = assignment_order(K, M)
    level = np.full(n, -1, np.int64)
    depth = np.zeros(1, np.int64)
    choice = np.full(n + 1, -1, np.int64)
    cand = np.zeros((n + 1, 2 * L + 1), np.int64)
    ncand = np.zeros(n + 1, np.int64)
    lo = np.zeros(n + 1, np.int64)
    hi = np.zeros(n + 1, np.int64)
    perms, signs = symmetry_table(K, M) if symmetry else (np.zeros((0, n), np.int64), np.zeros(0, np.int64))
    status = np.zeros((n + 1, perms.shape[0]), np.int64)
    ptr = np.zeros((n + 1, perms.shape[0]), np.int64)
    counters = np.array([0, 0, n_neck], np.int64)
    neck_broken = np.zeros(n_neck, np.int64)
    sub = n // K
    pc = np.zeros((sub, 2 * L + 1), np.int64)
    cc = np.zeros((sub, 2 * L + 1), np.int64)
    fp = np.full(sub, K, np.int64)
    fc = np.full(sub, K, np.int64)
    best = np.array([start_tile.n_edges], np.int64)
    best_levels = start.copy()

    t0 = time.monotonic()
    nodes = 0
    finished = False
    while True:
        finished, spent = _search(K, M, L, order, neck, level, depth, choice, cand, ncand, lo, hi,
                                  counters, neck_broken, pc, cc, fp, fc, perms, signs, status, ptr,
                                  best, best_levels, chunk_nodes)
        nodes += spent
        elapsed = time.monotonic() - t0
        if finished:
            break
        log.info("exact K=%d M=%d: %d nodes, best=%d, %.1fs", K, M, nodes, best[0], elapsed)
        if budget_seconds is not None and elapsed > budget_seconds:
            break
    elapsed = time.monotonic() - t0
    status = SearchStatus.PROVED_OPTIMAL if finished else SearchStatus.BUDGET_EXCEEDED
    tile = TileGraph.from_levels(K, M, best_levels - best_levels.min())
    log.info("exact K=%d M=%d: %s with %d edges after %d nodes (%.2fs)",
             K, M, status.value, tile.n_edges, nodes, elapsed)
    return ExactResult(tile, status, nodes, elapsed, L)
