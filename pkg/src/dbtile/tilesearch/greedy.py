"""Greedy tiles grown edge by edge with a weighted union-find.

Each union-find node stores its level offset from the parent. An edge
``(u, v)`` asks for ``level(u) - level(v) = 1``: across components it merges
them at that offset, inside a component it is kept only when the offsets
already agree and the new cycle leaves every loop height at most ``M``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..stratification import TileGraph, block_span, debruijn_edges
from .score import score_levels

log = logging.getLogger(__name__)


class OffsetUnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.offset = [0] * n  # level(x) - level(parent[x])
        self.rank = [0] * n

    def find(self, x: int) -> tuple[int, int]:
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root, acc = x, 0
        for y in reversed(path):
            acc += self.offset[y]
            self.offset[y] = acc
            self.parent[y] = root
        return root, (self.offset[path[0]] if path else 0)

    def union(self, a: int, b: int, diff: int) -> bool:
        """Merge so that ``level(a) - level(b) = diff``; False if already joined."""
        ra, oa = self.find(a)
        rb, ob = self.find(b)
        if ra == rb:
            return False
        # level(rb) - level(ra) = oa - diff - ob
        delta = oa - diff - ob
        if self.rank[ra] < self.rank[rb]:
            ra, rb, delta = rb, ra, -delta
        self.parent[rb] = ra
        self.offset[rb] = delta
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True

    def levels(self) -> np.ndarray:
        return np.array([self.find(x)[1] for x in range(len(self.parent))], dtype=np.int64)


def _grow(K: int, M: int, order: list[tuple[int, int]]) -> TileGraph:
    n = K**M
    uf = OffsetUnionFind(n)
    kept: list[tuple[int, int]] = []
    for u, v in order:
        if u == v:
            continue
        if uf.union(u, v, 1):
            kept.append((u, v))
            continue
        _, ou = uf.find(u)
        _, ov = uf.find(v)
        if ou - ov != 1:
            continue
        trial = kept + [(u, v)]
        src = np.array([a for a, _ in trial], dtype=np.int64)
        dst = np.array([b for _, b in trial], dtype=np.int64)
        if block_span(n, src, dst, uf.levels()) <= M:
            kept.append((u, v))
    levels = uf.levels()
    return TileGraph(K, M, frozenset(kept), tuple(int(x) for x in levels - levels.min()))


def _edge_order(K: int, M: int, rng: np.random.Generator | None, demote: float) -> list[tuple[int, int]]:
    base = score_levels(K, M)
    edges = debruijn_edges(K, M)
    first, rest = [], []
    for u, v in edges:
        keep = base[u] == base[v] + 1
        if keep and rng is not None and rng.random() < demote:
            keep = False
        (first if keep else rest).append((u, v))
    if rng is not None:
        rng.shuffle(first)
        rng.shuffle(rest)
    return first + rest


def greedy_tile(K: int, M: int, seed: int = 0, restarts: int = 8, threads: int = 1) -> TileGraph:
    """Best of ``restarts`` greedy runs.

    Run 0 keeps the score tile's edges first and in index order, so it never
    does worse than the score tile. Later runs shuffle and demote a growing
    share of those edges. Ties go to the lexicographically smallest edge list,
    so the result does not depend on ``threads``.
    """
    if K < 2 or M < 1:
        raise ValueError("need K >= 2 and M >= 1")
    restarts = max(1, restarts)
    streams = np.random.SeedSequence(seed).spawn(restarts)

    def run(r: int) -> TileGraph:
        rng = None if r == 0 else np.random.default_rng(streams[r])
        demote = 0.0 if r == 0 else 0.5 * r / restarts
        tile = _grow(K, M, _edge_order(K, M, rng, demote))
        log.info("greedy K=%d M=%d restart %d: %d edges", K, M, r, tile.n_edges)
        return tile

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tiles = list(pool.map(run, range(restarts)))
    else:
        tiles = [run(r) for r in range(restarts)]
    return min(tiles, key=lambda t: (-t.n_edges, t.sorted_edges()))
