"""Stratifications, loop witnesses, loop heights and tile validation."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._accel import njit


class TileStructureError(ValueError):
    """A tile edge is not an edge of ``B_K^M``."""


@dataclass(frozen=True)
class Stratification:
    levels: tuple[int, ...]

    def respects(self, edges: Iterable[tuple[int, int]]) -> bool:
        return all(self.levels[u] == self.levels[v] + 1 for u, v in edges)


@dataclass(frozen=True)
class LoopTrace:
    """Closed walk ``vertices[0] -> ... -> vertices[-1] == vertices[0]``.

    ``forward[i]`` tells whether step ``i`` follows the edge
    ``(vertices[i], vertices[i+1])`` (True) or ``(vertices[i+1], vertices[i])``.
    """

    vertices: tuple[int, ...]
    forward: tuple[bool, ...]

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i, fwd in enumerate(self.forward):
            a, b = self.vertices[i], self.vertices[i + 1]
            out.append((a, b) if fwd else (b, a))
        return out

    def __str__(self) -> str:
        parts = [str(self.vertices[0])]
        for i, fwd in enumerate(self.forward):
            parts.append("->" if fwd else "<-")
            parts.append(str(self.vertices[i + 1]))
        return "[" + " ".join(parts) + "]"


def loop_balance(trace: LoopTrace, edges: Iterable[tuple[int, int]] | None = None) -> tuple[int, int]:
    """Forward and backward step counts of a loop."""
    verts, fwd = trace.vertices, trace.forward
    if len(fwd) == 0 or len(verts) != len(fwd) + 1 or verts[0] != verts[-1]:
        raise ValueError(f"malformed loop trace {trace}")
    if edges is not None:
        edge_set = set(edges)
        for e in trace.edges():
            if e not in edge_set:
                raise ValueError(f"loop step {e} is not an edge of the graph")
    n_fwd = sum(fwd)
    return n_fwd, len(fwd) - n_fwd


def stratify(
    n_vertices: int,
    edges: Iterable[tuple[int, int]],
    order: Sequence[int] | None = None,
) -> Stratification | LoopTrace:
    """Level every vertex so that ``level(u) = level(v) + 1`` on each edge.

    Components are explored breadth-first from their first vertex in ``order``
    and shifted so their smallest level is 0. When the rule cannot be met the
    conflicting edge is spliced with the two tree paths into an unbalanced
    :class:`LoopTrace`.
    """
    adj: list[list[tuple[int, int, bool]]] = [[] for _ in range(n_vertices)]
    for u, v in edges:
        adj[u].append((v, -1, True))
        adj[v].append((u, 1, False))

    level = [None] * n_vertices
    tree: list[tuple[int, bool] | None] = [None] * n_vertices
    comp = [-1] * n_vertices
    roots = range(n_vertices) if order is None else order
    n_comp = 0
    for root in roots:
        if level[root] is not None:
            continue
        level[root] = 0
        comp[root] = n_comp
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b, delta, fwd in adj[a]:
                want = level[a] + delta
                if level[b] is None:
                    level[b] = want
                    tree[b] = (a, fwd)
                    comp[b] = n_comp
                    queue.append(b)
                elif level[b] != want:
                    return _splice(tree, a, b, fwd)
        n_comp += 1

    low = [0] * n_comp
    for v in range(n_vertices):
        low[comp[v]] = min(low[comp[v]], level[v])
    return Stratification(tuple(level[v] - low[comp[v]] for v in range(n_vertices)))


def _splice(tree, a: int, b: int, fwd: bool) -> LoopTrace:
    def to_root(x):
        path = [x]
        while tree[x] is not None:
            x = tree[x][0]
            path.append(x)
        return path

    pa, pb = to_root(a), to_root(b)
    on_b = {x: i for i, x in enumerate(pb)}
    ia = next(i for i, x in enumerate(pa) if x in on_b)
    ib = on_b[pa[ia]]
    # lca -> a along the tree, then a -> b, then b -> lca
    verts = list(reversed(pa[: ia + 1]))
    steps = [tree[x][1] for x in reversed(pa[:ia])]
    verts.append(b)
    steps.append(fwd)
    for x in pb[:ib]:
        verts.append(tree[x][0])
        steps.append(not tree[x][1])
    return LoopTrace(tuple(verts), tuple(steps))


# ---------------------------------------------------------------------------
# loop heights


@njit(cache=True)
def block_span(n_vertices, src, dst, levels):
    """Largest level span over biconnected blocks that contain a cycle.

    Any two vertices of a 2-connected block share a simple cycle, so this is
    the maximum loop height. Returns -1 when the graph has no cycle.
    """
    n_edges = src.shape[0]
    deg = np.zeros(n_vertices + 1, np.int64)
    for e in range(n_edges):
        deg[src[e] + 1] += 1
        deg[dst[e] + 1] += 1
    for v in range(n_vertices):
        deg[v + 1] += deg[v]
    nbr = np.empty(2 * n_edges, np.int64)
    eid = np.empty(2 * n_edges, np.int64)
    fill = deg[:-1].copy()
    for e in range(n_edges):
        a = src[e]
        b = dst[e]
        nbr[fill[a]] = b
        eid[fill[a]] = e
        fill[a] += 1
        nbr[fill[b]] = a
        eid[fill[b]] = e
        fill[b] += 1

    disc = np.full(n_vertices, -1, np.int64)
    low = np.zeros(n_vertices, np.int64)
    stack_v = np.empty(n_vertices, np.int64)
    stack_pe = np.empty(n_vertices, np.int64)
    stack_pos = np.empty(n_vertices, np.int64)
    estack = np.empty(n_edges, np.int64)
    ne = 0
    best = -1
    clock = 0
    for root in range(n_vertices):
        if disc[root] != -1:
            continue
        disc[root] = clock
        low[root] = clock
        clock += 1
        top = 0
        stack_v[0] = root
        stack_pe[0] = -1
        stack_pos[0] = deg[root]
        while top >= 0:
            v = stack_v[top]
            pos = stack_pos[top]
            if pos < deg[v + 1]:
                stack_pos[top] = pos + 1
                w = nbr[pos]
                e = eid[pos]
                if e == stack_pe[top]:
                    continue
                if disc[w] == -1:
                    estack[ne] = e
                    ne += 1
                    disc[w] = clock
                    low[w] = clock
                    clock += 1
                    top += 1
                    stack_v[top] = w
                    stack_pe[top] = e
                    stack_pos[top] = deg[w]
                elif disc[w] < disc[v]:
                    estack[ne] = e
                    ne += 1
                    if disc[w] < low[v]:
                        low[v] = disc[w]
            else:
                top -= 1
                if top < 0:
                    break
                u = stack_v[top]
                if low[v] < low[u]:
                    low[u] = low[v]
                if low[v] >= disc[u]:
                    pe = stack_pe[top + 1]
                    count = 0
                    lo = levels[u]
                    hi = levels[u]
                    while True:
                        ne -= 1
                        f = estack[ne]
                        count += 1
                        for x in (src[f], dst[f]):
                            if levels[x] < lo:
                                lo = levels[x]
                            if levels[x] > hi:
                                hi = levels[x]
                        if f == pe:
                            break
                    if count >= 2 and hi - lo > best:
                        best = hi - lo
    return best


def max_loop_height(
    n_vertices: int, edges: Iterable[tuple[int, int]], levels: Sequence[int]
) -> int | None:
    """Maximum ``max(level) - min(level)`` over simple cycles; ``None`` if acyclic."""
    edges = list(edges)
    src = np.array([u for u, _ in edges], dtype=np.int64)
    dst = np.array([v for _, v in edges], dtype=np.int64)
    h = block_span(n_vertices, src, dst, np.asarray(levels, dtype=np.int64))
    return None if h < 0 else int(h)


# ---------------------------------------------------------------------------
# tiles


def debruijn_edges(K: int, M: int) -> list[tuple[int, int]]:
    n = K**M
    return [(u, (K * u + m) % n) for u in range(n) for m in range(K)]


def saturated_edges(K: int, M: int, levels: Sequence[int]) -> frozenset[tuple[int, int]]:
    """All ``B_K^M`` edges ``(u, v)`` with ``level(u) = level(v) + 1``."""
    sig = np.asarray(levels, dtype=np.int64)
    n = K**M
    u = np.repeat(np.arange(n, dtype=np.int64), K)
    v = (K * u + np.tile(np.arange(K, dtype=np.int64), n)) % n
    keep = sig[u] == sig[v] + 1
    return frozenset(zip(u[keep].tolist(), v[keep].tolist()))


@dataclass(frozen=True)
class TileGraph:
    """Subgraph of ``B_K^M`` on all ``K**M`` words, optionally levelled."""

    K: int
    M: int
    edges: frozenset = field(default_factory=frozenset)
    levels: tuple[int, ...] | None = None

    @property
    def n_vertices(self) -> int:
        return self.K**self.M

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def broken(self) -> int:
        return self.K ** (self.M + 1) - len(self.edges)

    @classmethod
    def from_levels(cls, K: int, M: int, levels: Sequence[int]) -> "TileGraph":
        levels = tuple(int(x) for x in levels)
        if len(levels) != K**M:
            raise ValueError(f"expected {K**M} levels, got {len(levels)}")
        return cls(K, M, saturated_edges(K, M, levels), levels)

    @classmethod
    def from_edges(cls, K: int, M: int, edges: Iterable[tuple[int, int]]) -> "TileGraph":
        edges = frozenset((int(u), int(v)) for u, v in edges)
        res = stratify(K**M, sorted(edges))
        levels = res.levels if isinstance(res, Stratification) else None
        return cls(K, M, edges, levels)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def check_structure(tile: TileGraph) -> None:
    n = tile.n_vertices
    for u, v in tile.edges:
        if not (0 <= u < n and 0 <= v < n) or v // tile.K != u % (n // tile.K):
            raise TileStructureError(f"({u}, {v}) is not an edge of B_{tile.K}^{tile.M}")
    if tile.levels is not None and len(tile.levels) != n:
        raise TileStructureError(f"tile carries {len(tile.levels)} levels for {n} vertices")


@dataclass(frozen=True)
class TileReport:
    K: int
    M: int
    stratifiable: bool
    height: int | None
    internal: int
    broken: int
    witness: LoopTrace | None = None
    levels: tuple[int, ...] | None = None

    @property
    def certified(self) -> bool:
        """Stratifiable with every loop no higher than ``M``."""
        return self.stratifiable and (self.height is None or self.height <= self.M)

    def summary(self) -> str:
        if not self.stratifiable:
            h = "undefined"
        else:
            h = "no-loops" if self.height is None else str(self.height)
        ok = str(self.certified).lower()
        return (
            f"K={self.K} M={self.M} internal={self.internal} broken={self.broken} "
            f"stratifiable={str(self.stratifiable).lower()} height={h} certified={ok}"
        )


def validate_tile(tile: TileGraph) -> TileReport:
    """Structural check, stratifiability, loop height and edge accounting."""
    if tile.K < 2 or tile.M < 1:
        raise ValueError(f"tile needs K >= 2 and M >= 1, got K={tile.K} M={tile.M}")
    check_structure(tile)
    edges = tile.sorted_edges()
    res = stratify(tile.n_vertices, edges)
    common = dict(K=tile.K, M=tile.M, internal=len(edges), broken=tile.broken)
    if isinstance(res, LoopTrace):
        return TileReport(stratifiable=False, height=None, witness=res, **common)
    if tile.levels is not None and not Stratification(tile.levels).respects(edges):
        raise TileStructureError("tile levels do not respect its edges")
    h = max_loop_height(tile.n_vertices, edges, res.levels)
    return TileReport(stratifiable=True, height=h, levels=res.levels, **common)
