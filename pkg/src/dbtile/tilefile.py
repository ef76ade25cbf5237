"""Plain-text tile files.

::

    K M
    <word> <level>        (K**M lines, word as an M-digit base-K string)
    EDGES                 (optional)
    <word> <word>         (one tile edge per line)

Without an ``EDGES`` section the edges are every ``B_K^M`` edge consistent
with the levels.
"""

from __future__ import annotations

from typing import TextIO

from .graphs import format_word, index_to_word, parse_word, word_to_index
from .stratification import Stratification, TileGraph, stratify


class TileFileError(ValueError):
    pass


def dumps(tile: TileGraph) -> str:
    levels = tile.levels
    if levels is None:
        res = stratify(tile.n_vertices, tile.sorted_edges())
        if not isinstance(res, Stratification):
            raise TileFileError(f"tile is not stratifiable (loop {res}); cannot write levels")
        levels = res.levels
    K, M = tile.K, tile.M
    lines = [f"{K} {M}"]
    for x in range(tile.n_vertices):
        lines.append(f"{format_word(index_to_word(x, K, M), K)} {levels[x]}")
    lines.append("EDGES")
    for u, v in tile.sorted_edges():
        lines.append(f"{format_word(index_to_word(u, K, M), K)} {format_word(index_to_word(v, K, M), K)}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> TileGraph:
    rows = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows:
        raise TileFileError("empty tile file")
    try:
        K, M = (int(t) for t in rows[0].split())
    except ValueError:
        raise TileFileError(f"bad header {rows[0]!r}; expected 'K M'") from None
    n = K**M
    levels: list[int | None] = [None] * n
    body = rows[1:]
    try:
        split = body.index("EDGES")
    except ValueError:
        split = len(body)
    try:
        for row in body[:split]:
            word, lvl = row.split()
            x = word_to_index(parse_word(word, K, M), K)
            if levels[x] is not None:
                raise TileFileError(f"duplicate level for {word}")
            levels[x] = int(lvl)
    except ValueError as exc:
        raise TileFileError(f"bad level line: {exc}") from None
    missing = [x for x in range(n) if levels[x] is None]
    if missing:
        raise TileFileError(f"{len(missing)} words have no level (first: {index_to_word(missing[0], K, M)})")
    if split == len(body):
        return TileGraph.from_levels(K, M, levels)
    edges = set()
    try:
        for row in body[split + 1 :]:
            a, b = row.split()
            edges.add((word_to_index(parse_word(a, K, M), K), word_to_index(parse_word(b, K, M), K)))
    except ValueError as exc:
        raise TileFileError(f"bad edge line: {exc}") from None
    return TileGraph(K, M, frozenset(edges), tuple(levels))


def read(fh: TextIO) -> TileGraph:
    return loads(fh.read())


def load(path: str) -> TileGraph:
    with open(path) as fh:
        return loads(fh.read())
