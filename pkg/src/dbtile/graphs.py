"""Implicit de Bruijn / Kautz host graphs, vertex codecs and projections.

Vertices are canonical integers in ``[0, V)``. Words (digit tuples) are a
presentation layer on top of the integers. Tile words of ``B_K^M`` are
stored as integers too, with ``d_1`` the most significant base-K digit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Sequence

import numpy as np


class Kind(str, enum.Enum):
    DEBRUIJN = "debruijn"
    KAUTZ = "kautz"
    GEN_DEBRUIJN = "gdebruijn"
    GEN_KAUTZ = "gkautz"

    @property
    def kautz_like(self) -> bool:
        return self in (Kind.KAUTZ, Kind.GEN_KAUTZ)

    @property
    def generalized(self) -> bool:
        return self in (Kind.GEN_DEBRUIJN, Kind.GEN_KAUTZ)


KIND_ALIASES = {
    "debruijn": Kind.DEBRUIJN,
    "db": Kind.DEBRUIJN,
    "kautz": Kind.KAUTZ,
    "gdebruijn": Kind.GEN_DEBRUIJN,
    "generalized-debruijn": Kind.GEN_DEBRUIJN,
    "gkautz": Kind.GEN_KAUTZ,
    "generalized-kautz": Kind.GEN_KAUTZ,
}


def parse_kind(name: str | Kind) -> Kind:
    if isinstance(name, Kind):
        return name
    try:
        return KIND_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown graph kind {name!r}") from None


@dataclass(frozen=True)
class HostGraph:
    """Arithmetic digraph on ``V = F * K**N`` vertices, ``gcd(F, K) = 1``."""

    kind: Kind
    K: int
    V: int
    F: int
    N: int

    @property
    def n_edges(self) -> int:
        return self.V * self.K

    def __str__(self) -> str:
        return f"{self.kind.value}(K={self.K}, V={self.V}, F={self.F}, N={self.N})"


@dataclass(frozen=True)
class MixedRadixCode:
    f: int
    digits: tuple[int, ...]


def factor_size(V: int, K: int) -> tuple[int, int]:
    """Split ``V`` into ``(F, N)`` with ``V = F * K**N`` and ``K`` not dividing ``F``."""
    F, N = V, 0
    while F % K == 0:
        F //= K
        N += 1
    return F, N


def build_host(kind: str | Kind, K: int, size: int) -> HostGraph:
    """Build a host graph.

    ``size`` is the word length for the standard kinds: ``N`` for de Bruijn
    (``V = K**N``) and the Kautz diameter ``N + 1`` for Kautz
    (``V = (K+1) * K**N``). For the generalized kinds it is ``V`` itself.
    """
    kind = parse_kind(kind)
    if K < 2:
        raise ValueError(f"degree K must be >= 2, got {K}")
    if kind is Kind.DEBRUIJN:
        if size < 1:
            raise ValueError(f"de Bruijn word length must be >= 1, got {size}")
        V = K**size
    elif kind is Kind.KAUTZ:
        if size < 1:
            raise ValueError(f"Kautz diameter must be >= 1, got {size}")
        V = (K + 1) * K ** (size - 1)
    else:
        V = size
    if V < K:
        raise ValueError(f"host needs at least K={K} vertices, got V={V}")
    F, N = factor_size(V, K)
    if gcd(F, K) != 1:
        raise ValueError(f"V={V} = {F}*{K}^{N} has a cofactor sharing factors with K={K}")
    if kind is Kind.DEBRUIJN and F != 1:
        raise ValueError(f"de Bruijn host needs V a power of K, got V={V}")
    if kind is Kind.KAUTZ and F != K + 1:
        raise ValueError(f"Kautz host needs V = (K+1)*K^N, got V={V}")
    return HostGraph(kind, K, V, F, N)


def _check_vertex(g: HostGraph, v: int) -> None:
    if not 0 <= v < g.V:
        raise IndexError(f"vertex {v} out of range [0, {g.V})")


def children(g: HostGraph, v: int) -> tuple[int, ...]:
    """The K children of ``v`` ordered by the appended symbol ``m``."""
    _check_vertex(g, v)
    K, V = g.K, g.V
    if g.kind.kautz_like:
        return tuple((-1 - K * v - m) % V for m in range(K))
    return tuple((K * v + m) % V for m in range(K))


def parents(g: HostGraph, v: int) -> tuple[int, ...]:
    """The K parents of ``v`` in ascending order, with multiplicity."""
    _check_vertex(g, v)
    K, V = g.K, g.V
    step = gcd(K, V)
    period = V // step
    inv = pow(K // step, -1, period) if period > 1 else 0
    out = []
    for m in range(K):
        # solve K*w = rhs (mod V)
        rhs = (v - m) % V if not g.kind.kautz_like else (-1 - m - v) % V
        if rhs % step:
            continue
        w0 = (rhs // step) * inv % period
        out.extend(w0 + j * period for j in range(step))
    return tuple(sorted(out))


def children_table(g: HostGraph) -> np.ndarray:
    """``(V, K)`` array of children, row ``v`` matching :func:`children`."""
    v = np.arange(g.V, dtype=np.int64)[:, None]
    m = np.arange(g.K, dtype=np.int64)[None, :]
    if g.kind.kautz_like:
        return (-1 - g.K * v - m) % g.V
    return (g.K * v + m) % g.V


# ---------------------------------------------------------------------------
# codecs


def index_to_word(i: int, K: int, length: int) -> tuple[int, ...]:
    digits = [0] * length
    for j in range(length - 1, -1, -1):
        i, digits[j] = divmod(i, K)
    return tuple(digits)


def word_to_index(word: Sequence[int], K: int) -> int:
    i = 0
    for d in word:
        if not 0 <= d < K:
            raise ValueError(f"digit {d} outside base {K}")
        i = i * K + d
    return i


def format_word(word: Sequence[int], K: int | None = None) -> str:
    """Digit string; dot-separated when ``K > 10`` or a digit exceeds 9."""
    if (K is not None and K > 10) or any(d > 9 for d in word):
        return ".".join(str(d) for d in word)
    return "".join(str(d) for d in word)


def parse_word(text: str, K: int, length: int | None = None) -> tuple[int, ...]:
    text = text.strip()
    if K > 10 or "." in text:
        word = tuple(int(t) for t in text.split("."))
    else:
        word = tuple(int(c) for c in text)
    if any(not 0 <= d < K for d in word):
        raise ValueError(f"word {text!r} has digits outside base {K}")
    if length is not None and len(word) != length:
        raise ValueError(f"word {text!r} should have {length} digits")
    return word


def encode(g: HostGraph, v: int) -> MixedRadixCode:
    """Mixed-radix code ``f c_1 ... c_N`` of vertex ``v``.

    For Kautz kinds the raw digits at odd positions are stored complemented
    (``u_j = K-1-c_j``); the returned digits are the unbarred ``c_j``.
    """
    _check_vertex(g, v)
    f, rest = divmod(v, g.K**g.N)
    raw = index_to_word(rest, g.K, g.N)
    if g.kind.kautz_like:
        raw = tuple(g.K - 1 - u if j % 2 == 0 else u for j, u in enumerate(raw))
    return MixedRadixCode(f, raw)


def decode(g: HostGraph, code: MixedRadixCode) -> int:
    if not 0 <= code.f < g.F or len(code.digits) != g.N:
        raise ValueError(f"code {code} does not fit {g}")
    raw = code.digits
    if g.kind.kautz_like:
        raw = tuple(g.K - 1 - c if j % 2 == 0 else c for j, c in enumerate(raw))
    return code.f * g.K**g.N + word_to_index(raw, g.K)


def digit_matrix(g: HostGraph) -> np.ndarray:
    """``(V, N)`` array of unbarred digits for every vertex."""
    v = np.arange(g.V, dtype=np.int64)
    powers = g.K ** np.arange(g.N - 1, -1, -1, dtype=np.int64)
    digits = (v[:, None] // powers[None, :]) % g.K
    if g.kind.kautz_like:
        digits[:, 0::2] = g.K - 1 - digits[:, 0::2]
    return digits


def kautz_symbols(g: HostGraph, v: int) -> tuple[int, ...]:
    """Kautz word ``s_0 ... s_N`` of a standard Kautz vertex (``F = K+1``)."""
    if not g.kind.kautz_like or g.F != g.K + 1:
        raise ValueError("Kautz symbols exist only for hosts with F = K+1")
    code = encode(g, v)
    s = [code.f]
    for c in code.digits:
        s.append((s[-1] + c + 1) % (g.K + 1))
    return tuple(s)


def kautz_to_debruijn(symbols: Sequence[int], K: int) -> tuple[int, ...]:
    """Map a Kautz word onto its de Bruijn word, ``c_i = s_i - s_{i-1} - 1 mod K+1``."""
    if len(symbols) == 0:
        raise ValueError("empty Kautz word")
    for a, b in zip(symbols, symbols[1:]):
        if a == b:
            raise ValueError(f"Kautz word {tuple(symbols)} repeats adjacent symbol {a}")
    if any(not 0 <= s <= K for s in symbols):
        raise ValueError(f"Kautz word {tuple(symbols)} has symbols outside [0, {K}]")
    return tuple((b - a - 1) % (K + 1) for a, b in zip(symbols, symbols[1:]))


def kautz_index(g: HostGraph, symbols: Sequence[int]) -> int:
    """Vertex index of a Kautz word, inverse of :func:`kautz_symbols`."""
    digits = kautz_to_debruijn(symbols, g.K)
    return decode(g, MixedRadixCode(symbols[0], digits))


# ---------------------------------------------------------------------------
# Latin squares and projections


class LatinSquare:
    """A ``K x K`` table ``f(c, c')`` that is a permutation along rows and columns."""

    def __init__(self, table, name: str = "custom"):
        table = np.asarray(table, dtype=np.int64)
        K = table.shape[0]
        if table.shape != (K, K) or K < 2:
            raise ValueError(f"Latin square must be K x K with K >= 2, got shape {table.shape}")
        full = np.arange(K)
        for r in range(K):
            if not (np.array_equal(np.sort(table[r]), full) and np.array_equal(np.sort(table[:, r]), full)):
                raise ValueError(f"table is not a Latin square on [0, {K})")
        self.table = table
        self.table.setflags(write=False)
        self.name = name

    @property
    def K(self) -> int:
        return self.table.shape[0]

    def __call__(self, c: int, c_prev: int) -> int:
        return int(self.table[c, c_prev])

    def __eq__(self, other) -> bool:
        return isinstance(other, LatinSquare) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash(self.table.tobytes())

    def __repr__(self) -> str:
        return f"LatinSquare({self.name}, K={self.K})"

    @classmethod
    def difference(cls, K: int) -> "LatinSquare":
        c = np.arange(K)
        return cls((c[:, None] - c[None, :]) % K, "f1")

    @classmethod
    def sum(cls, K: int) -> "LatinSquare":
        c = np.arange(K)
        return cls((c[:, None] + c[None, :]) % K, "f2")

    @classmethod
    def from_text(cls, text: str) -> "LatinSquare":
        rows = [[int(t) for t in line.split()] for line in text.splitlines() if line.strip()]
        return cls(rows, "file")


def latin_square(spec: str, K: int) -> LatinSquare:
    """Resolve ``f1``, ``f2`` or a path to a whitespace table."""
    if spec == "f1":
        return LatinSquare.difference(K)
    if spec == "f2":
        return LatinSquare.sum(K)
    with open(spec) as fh:
        sq = LatinSquare.from_text(fh.read())
    if sq.K != K:
        raise ValueError(f"Latin square in {spec} has K={sq.K}, expected {K}")
    return sq


def discrete_differential(word: Sequence[int], k: int, latin: LatinSquare) -> tuple[int, ...]:
    """``d_i = f(c_{i+k}, c_i)``; the zeroth differential is the word itself."""
    if not 0 <= k <= len(word):
        raise ValueError(f"shift k={k} outside [0, {len(word)}]")
    if k == 0:
        return tuple(word)
    return tuple(latin(word[i + k], word[i]) for i in range(len(word) - k))


@dataclass(frozen=True)
class Projection:
    """Homomorphism from a host onto ``B_K^M``: drop ``f``, take k-th differentials."""

    host: HostGraph
    M: int
    latin: LatinSquare

    def __post_init__(self):
        if not 1 <= self.M <= self.host.N:
            raise ValueError(f"tile exponent M={self.M} must lie in [1, N={self.host.N}]")
        if self.latin.K != self.host.K:
            raise ValueError("Latin square degree does not match the host")

    @property
    def shift(self) -> int:
        return self.host.N - self.M

    def word(self, v: int) -> tuple[int, ...]:
        return discrete_differential(encode(self.host, v).digits, self.shift, self.latin)

    def __call__(self, v: int) -> int:
        return word_to_index(self.word(v), self.host.K)

    def table(self) -> np.ndarray:
        """Projection of every host vertex as a tile-word index."""
        K, M, k = self.host.K, self.M, self.shift
        c = digit_matrix(self.host)
        d = c[:, :M] if k == 0 else self.latin.table[c[:, k:], c[:, : M]]
        powers = K ** np.arange(M - 1, -1, -1, dtype=np.int64)
        return d @ powers


def project(p: Projection, v: int) -> int:
    return p(v)


def debruijn_children(x: int, K: int, M: int) -> tuple[int, ...]:
    n = K**M
    return tuple((K * x + m) % n for m in range(K))


def debruijn_parents(x: int, K: int, M: int) -> tuple[int, ...]:
    step = K ** (M - 1)
    return tuple(a * step + x // K for a in range(K))


def check_distribution(
    host: HostGraph,
    M: int,
    vmap: Callable[[int], int],
    side: str,
    vertices: Iterable[int] | None = None,
) -> int | None:
    """Check ``vmap(P(u)) = P(vmap(u))`` (``side='parent'``) or the child analogue.

    Returns ``None`` when the property holds for every checked vertex, else the
    first failing vertex.
    """
    if side not in ("parent", "child"):
        raise ValueError(f"side must be 'parent' or 'child', got {side!r}")
    near = parents if side == "parent" else children
    near_b = debruijn_parents if side == "parent" else debruijn_children
    for u in range(host.V) if vertices is None else vertices:
        image = sorted(vmap(w) for w in near(host, u))
        if image != sorted(near_b(vmap(u), host.K, M)):
            return u
    return None


def substring_map(host: HostGraph, M: int, start: int = None) -> Callable[[int], int]:
    """Contiguous-substring map ``c_a ... c_{a+M-1}`` (default: the last M digits)."""
    start = host.N - M if start is None else start
    if not 0 <= start <= host.N - M:
        raise ValueError("substring window does not fit the word")

    def vmap(v: int) -> int:
        return word_to_index(encode(host, v).digits[start : start + M], host.K)

    return vmap


# ---------------------------------------------------------------------------
# DOT


def vertex_label(g: HostGraph, v: int) -> str:
    code = encode(g, v)
    word = format_word(code.digits, g.K)
    if g.F > 1:
        word = f"{code.f}:{word}"
    label = f"{v} | {word}"
    if g.kind.kautz_like and g.F == g.K + 1:
        label += f" | {format_word(kautz_symbols(g, v), g.K + 1)}"
    return label


def to_dot(g: HostGraph) -> str:
    lines = [f'digraph "{g.kind.value}_K{g.K}_V{g.V}" {{', "  node [shape=box];"]
    for v in range(g.V):
        lines.append(f'  {v} [label="{vertex_label(g, v)}"];')
    for v in range(g.V):
        for w in children(g, v):
            lines.append(f"  {v} -> {w};")
    lines.append("}")
    return "\n".join(lines) + "\n"
