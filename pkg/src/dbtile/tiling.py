"""Assemble tilings of host graphs from certified tiles, verify and export them."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graphs import (
    HostGraph,
    LatinSquare,
    Kind,
    Projection,
    build_host,
    children_table,
    factor_size,
    format_word,
    index_to_word,
    parse_kind,
    parse_word,
    vertex_label,
    word_to_index,
)
from .stratification import LoopTrace, TileGraph, validate_tile


class TilingParameterError(ValueError):
    pass


class ObstructionError(RuntimeError):
    """Two lifting paths disagree on the host vertex of a tile copy."""

    def __init__(self, loop: LoopTrace, tile_index: int):
        self.loop = loop
        self.tile_index = tile_index
        super().__init__(f"tile loop {loop} does not lift consistently (tile copy {tile_index})")


@dataclass(frozen=True)
class Tiling:
    host: HostGraph
    tile: TileGraph
    latin: LatinSquare
    table: np.ndarray  # table[i, x] = host vertex of copy i, tile word x

    @property
    def n_tiles(self) -> int:
        return self.table.shape[0]

    def t(self, i: int, x: int) -> int:
        return int(self.table[i, x])


@dataclass(frozen=True)
class TilingReport:
    bijective: bool
    embedding: bool
    parallel_routing: bool
    internal_edges: int
    inter_tile_edges: int

    @property
    def ok(self) -> bool:
        return self.bijective and self.embedding and self.parallel_routing

    def summary(self) -> str:
        return (
            f"bijective={str(self.bijective).lower()} embedding={str(self.embedding).lower()} "
            f"parallel_routing={str(self.parallel_routing).lower()} "
            f"inter={self.inter_tile_edges} internal={self.internal_edges}"
        )


def parents_table(children: np.ndarray) -> np.ndarray:
    """``(V, K)`` parents in ascending order, from a children table."""
    V, K = children.shape
    flat = children.ravel()
    order = np.argsort(flat, kind="stable")
    return np.repeat(np.arange(V, dtype=np.int64), K)[order].reshape(V, K)


def _components(tile: TileGraph) -> list[list[int]]:
    n = tile.n_vertices
    adj = [[] for _ in range(n)]
    for u, v in tile.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * n
    comps = []
    for x in range(n):
        if seen[x]:
            continue
        seen[x] = True
        comp, stack = [], [x]
        while stack:
            y = stack.pop()
            comp.append(y)
            for z in adj[y]:
                if not seen[z]:
                    seen[z] = True
                    stack.append(z)
        comps.append(sorted(comp))
    return comps


def build_tiling(
    host: HostGraph,
    tile: TileGraph,
    latin: LatinSquare | None = None,
    force: bool = False,
) -> Tiling:
    """Lift a certified tile onto every fibre of the projection ``host -> B_K^M``.

    Each tile component starts from its smallest word ``x0``; the fibre over
    ``x0`` sorted by host index numbers the copies. Forward tile edges lift
    through the unique child with the right projection, backward ones through
    the unique parent. ``force`` skips the loop-height certificate and lets a
    failed lift surface as :class:`ObstructionError`.
    """
    K, M = tile.K, tile.M
    if host.K != K:
        raise TilingParameterError(f"tile degree {K} differs from host degree {host.K}")
    if M < 1 or host.N < M:
        raise TilingParameterError(f"host {host} has N={host.N} < M={M}; tiles of K^{M} do not divide it")
    latin = LatinSquare.difference(K) if latin is None else latin
    report = validate_tile(tile)
    if not report.stratifiable:
        raise TilingParameterError(f"tile is not stratifiable (loop {report.witness})")
    if not report.certified and not force:
        raise TilingParameterError(f"tile has a loop of height {report.height} > M={M}; pass force to try anyway")

    pi = Projection(host, M, latin).table()
    n_words = K**M
    n_tiles = host.V // n_words
    fibres = np.argsort(pi, kind="stable").reshape(n_words, n_tiles)
    kids = children_table(host)
    pars = parents_table(kids)
    out_edges = [[] for _ in range(n_words)]
    in_edges = [[] for _ in range(n_words)]
    for u, v in tile.sorted_edges():
        out_edges[u].append(v)
        in_edges[v].append(u)

    table = np.full((n_tiles, n_words), -1, dtype=np.int64)
    rows = np.arange(n_tiles)
    for comp in _components(tile):
        x0 = comp[0]
        table[:, x0] = fibres[x0]
        tree: dict[int, tuple[int, bool]] = {}
        queue = deque([x0])
        while queue:
            x = queue.popleft()
            hosts = table[:, x]
            steps = [(y, True, kids) for y in out_edges[x]] + [(y, False, pars) for y in in_edges[x]]
            for y, forward, near in steps:
                cand = near[hosts]
                hit = pi[cand] == y
                if not np.all(hit.sum(axis=1) == 1):
                    raise TilingParameterError("projection lacks the distribution property")
                lifted = cand[rows, hit.argmax(axis=1)]
                if table[0, y] < 0:
                    table[:, y] = lifted
                    tree[y] = (x, forward)
                    queue.append(y)
                elif not np.array_equal(table[:, y], lifted):
                    bad = int(np.flatnonzero(table[:, y] != lifted)[0])
                    raise ObstructionError(_tree_loop(tree, x, y, forward), bad)
    return Tiling(host, tile, latin, table)


def _tree_loop(tree, x: int, y: int, forward: bool) -> LoopTrace:
    def up(z):
        path = [z]
        while z in tree:
            z = tree[z][0]
            path.append(z)
        return path

    px, py = up(x), up(y)
    on_y = {z: i for i, z in enumerate(py)}
    ix = next(i for i, z in enumerate(px) if z in on_y)
    iy = on_y[px[ix]]
    verts = list(reversed(px[: ix + 1]))
    steps = [tree[z][1] for z in reversed(px[:ix])]
    verts.append(y)
    steps.append(forward)
    for z in py[:iy]:
        verts.append(tree[z][0])
        steps.append(not tree[z][1])
    return LoopTrace(tuple(verts), tuple(steps))


def _locate(t: Tiling) -> tuple[bool, np.ndarray, np.ndarray]:
    V = t.host.V
    tile_of = np.full(V, -1, dtype=np.int64)
    local = np.full(V, -1, dtype=np.int64)
    flat = t.table.ravel()
    ok = t.table.shape == (V // t.tile.n_vertices, t.tile.n_vertices)
    ok = ok and flat.min(initial=0) >= 0 and flat.max(initial=0) < V
    if ok:
        ok = np.unique(flat).size == V == flat.size
    for i in range(t.table.shape[0]):
        for x in range(t.table.shape[1]):
            h = t.table[i, x]
            if 0 <= h < V:
                tile_of[h], local[h] = i, x
    return bool(ok), tile_of, local


def verify_tiling(t: Tiling) -> TilingReport:
    """Re-check bijectivity, per-copy edge embedding and parallel routing."""
    K, V = t.host.K, t.host.V
    bijective, tile_of, local = _locate(t)
    kids = children_table(t.host)
    child_sets = [set(map(int, row)) for row in kids]

    in_range = bool(np.all((t.table >= 0) & (t.table < V)))
    embedding = in_range
    for x, y in t.tile.sorted_edges() if in_range else ():
        for i in range(t.n_tiles):
            if int(t.table[i, y]) not in child_sets[int(t.table[i, x])]:
                embedding = False
                break
        if not embedding:
            break

    parallel = bijective
    if parallel:
        for x in range(t.tile.n_vertices):
            pattern = sorted(local[kids[t.table[:, x]]][0])
            for i in range(1, t.n_tiles):
                if sorted(local[kids[t.table[i, x]]]) != pattern:
                    parallel = False
                    break
            if not parallel:
                break

    internal = 0
    if bijective:
        edges = t.tile.edges
        for u in range(V):
            for w in kids[u]:
                if tile_of[u] == tile_of[w] and (int(local[u]), int(local[w])) in edges:
                    internal += 1
    return TilingReport(bijective, embedding, parallel, internal, V * K - internal)


# ---------------------------------------------------------------------------
# exports


def cable_list(t: Tiling) -> list[tuple[int, int, int, int]]:
    """Every host edge not realised on a board, as ``(i, x, j, y)``."""
    _, tile_of, local = _locate(t)
    kids = children_table(t.host)
    edges = t.tile.edges
    cables = []
    for u in range(t.host.V):
        for w in kids[u]:
            i, x, j, y = int(tile_of[u]), int(local[u]), int(tile_of[w]), int(local[w])
            if not (i == j and (x, y) in edges):
                cables.append((i, x, j, y))
    cables.sort()
    return cables


def export_netlist(t: Tiling) -> str:
    K, M = t.tile.K, t.tile.M

    def w(x):
        return format_word(index_to_word(x, K, M), K)

    lines = [f"BOARD K={K} M={M} nodes={K**M} edges={t.tile.n_edges}"]
    lines += [f"{w(x)} -> {w(y)}" for x, y in t.tile.sorted_edges()]
    cables = cable_list(t)
    lines.append(f"CABLES boards={t.n_tiles} count={len(cables)}")
    lines += [f"tile_{i} {w(x)} -> tile_{j} {w(y)}" for i, x, j, y in cables]
    return "\n".join(lines) + "\n"


_PALETTE = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
]


def tiling_to_dot(t: Tiling) -> str:
    K, M = t.tile.K, t.tile.M
    _, tile_of, local = _locate(t)
    lines = [f'digraph "tiling_{t.host.kind.value}_K{K}_V{t.host.V}_M{M}" {{',
             "  node [shape=box, style=filled];"]
    for i in range(t.n_tiles):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f'    label="tile {i}";')
        color = _PALETTE[i % len(_PALETTE)]
        for x in range(K**M):
            h = int(t.table[i, x])
            label = f"{vertex_label(t.host, h)}\\n[{format_word(index_to_word(x, K, M), K)}]"
            lines.append(f'    {h} [label="{label}", fillcolor="{color}"];')
        lines.append("  }")
    kids = children_table(t.host)
    for u in range(t.host.V):
        for w in kids[u]:
            inside = tile_of[u] == tile_of[w] and (int(local[u]), int(local[w])) in t.tile.edges
            style = " [style=bold, penwidth=2]" if inside else " [style=dashed, color=gray40]"
            lines.append(f"  {u} -> {int(w)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps_tiling(t: Tiling) -> str:
    """JSON header line, then ``host_index tile_index local_word`` per host vertex."""
    K, M = t.tile.K, t.tile.M
    header = {
        "kind": t.host.kind.value,
        "K": K,
        "V": t.host.V,
        "M": M,
        "latin": t.latin.name,
        "latin_table": t.latin.table.tolist(),
        "tile_edges": [[format_word(index_to_word(x, K, M), K), format_word(index_to_word(y, K, M), K)]
                       for x, y in t.tile.sorted_edges()],
        "tile_levels": None if t.tile.levels is None else list(t.tile.levels),
    }
    _, tile_of, local = _locate(t)
    lines = [json.dumps(header)]
    for h in range(t.host.V):
        word = format_word(index_to_word(int(local[h]), K, M), K) if local[h] >= 0 else "?"
        lines.append(f"{h} {int(tile_of[h])} {word}")
    return "\n".join(lines) + "\n"


def loads_tiling(text: str) -> Tiling:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty tiling dump")
    head = json.loads(lines[0])
    K, M, V = int(head["K"]), int(head["M"]), int(head["V"])
    kind = parse_kind(head["kind"])
    host = build_host(kind, K, V if kind.generalized else _standard_size(kind, K, V))
    edges = frozenset(
        (word_to_index(parse_word(a, K, M), K), word_to_index(parse_word(b, K, M), K))
        for a, b in head["tile_edges"]
    )
    levels = head.get("tile_levels")
    tile = TileGraph(K, M, edges, None if levels is None else tuple(levels))
    latin = LatinSquare(head["latin_table"], head.get("latin", "custom"))
    n_words = K**M
    table = np.full((V // n_words, n_words), -1, dtype=np.int64)
    for ln in lines[1:]:
        h, i, word = ln.split()
        table[int(i), word_to_index(parse_word(word, K, M), K)] = int(h)
    return Tiling(host, tile, latin, table)


def _standard_size(kind, K: int, V: int) -> int:
    _, N = factor_size(V, K)
    return N if kind is Kind.DEBRUIJN else N + 1
