import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from dbtile._accel import py_func
from dbtile.graphs import parse_word, word_to_index
from dbtile.stratification import (
    LoopTrace,
    Stratification,
    TileGraph,
    TileStructureError,
    block_span,
    debruijn_edges,
    loop_balance,
    max_loop_height,
    saturated_edges,
    stratify,
    validate_tile,
)


def w(text, K=2):
    return word_to_index(parse_word(text, K), K)


# the four loops of B_2^2 written as vertex walks with step directions
B22_LOOPS = {
    "[00->00]": (("00", "00"), (True,), (1, 0)),
    "[00->01->10->00]": (("00", "01", "10", "00"), (True, True, True), (3, 0)),
    "[00->01<-10->00]": (("00", "01", "10", "00"), (True, False, True), (2, 1)),
    "[00->01->11->10->00]": (("00", "01", "11", "10", "00"), (True, True, True, True), (4, 0)),
}


def random_stratified(rng, n, n_levels=5, p=0.45):
    levels = rng.integers(0, n_levels, n)
    edges = [(u, v) for u in range(n) for v in range(n) if levels[u] == levels[v] + 1 and rng.random() < p]
    return levels, edges


def brute_height(n, edges, levels):
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    best = -1
    for cyc in nx.simple_cycles(g):
        if len(cyc) < 3:
            continue
        span = max(levels[x] for x in cyc) - min(levels[x] for x in cyc)
        best = max(best, span)
    return best


@pytest.mark.parametrize("name", sorted(B22_LOOPS))
def test_b22_loops_are_unstratifiable(name):
    words, fwd, balance = B22_LOOPS[name]
    trace = LoopTrace(tuple(w(x) for x in words), fwd)
    edges = trace.edges()
    assert all(e in set(debruijn_edges(2, 2)) for e in edges)
    assert loop_balance(trace, edges) == balance
    res = stratify(4, edges)
    assert isinstance(res, LoopTrace)
    fw, bw = loop_balance(res, edges)
    assert fw != bw


def test_loop_trace_str():
    t = LoopTrace((0, 1, 2, 0), (True, False, True))
    assert str(t) == "[0 -> 1 <- 2 -> 0]"
    assert t.edges() == [(0, 1), (2, 1), (2, 0)]
    with pytest.raises(ValueError):
        loop_balance(LoopTrace((0, 1), (True,)))
    with pytest.raises(ValueError):
        loop_balance(t, [(0, 1)])


@given(st.sampled_from([(2, 2), (2, 3), (3, 2)]), st.data())
def test_stratify_levels_or_witness(km, data):
    K, M = km
    all_edges = debruijn_edges(K, M)
    mask = data.draw(st.lists(st.booleans(), min_size=len(all_edges), max_size=len(all_edges)))
    edges = [e for e, keep in zip(all_edges, mask) if keep]
    res = stratify(K**M, edges)
    if isinstance(res, Stratification):
        assert res.respects(edges)
        assert min(res.levels) == 0
    else:
        fw, bw = loop_balance(res, edges)
        assert fw != bw


def test_stratify_levels_are_per_component_minimal():
    res = stratify(5, [(0, 1), (1, 2), (4, 3)])
    assert res.levels == (2, 1, 0, 0, 1)


def test_block_span_matches_cycle_enumeration():
    rng = np.random.default_rng(20240611)
    checked = 0
    while checked < 50:
        n = int(rng.integers(3, 13))
        levels, edges = random_stratified(rng, n)
        src = np.array([u for u, _ in edges], dtype=np.int64)
        dst = np.array([v for _, v in edges], dtype=np.int64)
        assert block_span(n, src, dst, levels.astype(np.int64)) == brute_height(n, edges, levels)
        checked += 1


def test_block_span_python_body_agrees():
    rng = np.random.default_rng(7)
    kernel = py_func(block_span)
    for _ in range(30):
        n = int(rng.integers(3, 13))
        levels, edges = random_stratified(rng, n)
        src = np.array([u for u, _ in edges], dtype=np.int64)
        dst = np.array([v for _, v in edges], dtype=np.int64)
        lv = levels.astype(np.int64)
        assert kernel(n, src, dst, lv) == block_span(n, src, dst, lv)


def test_max_loop_height_distinguishes_no_loops():
    assert max_loop_height(3, [(0, 1), (1, 2)], [2, 1, 0]) is None
    # a 4-cycle over two levels has height 1
    assert max_loop_height(4, [(0, 1), (0, 3), (2, 1), (2, 3)], [1, 0, 1, 0]) == 1


def test_saturated_edges_brute_force():
    for K, M in [(2, 2), (2, 3), (3, 2)]:
        rng = np.random.default_rng(K * 10 + M)
        levels = rng.integers(0, 4, K**M)
        brute = {(u, v) for u, v in debruijn_edges(K, M) if levels[u] == levels[v] + 1}
        assert saturated_edges(K, M, levels) == brute


def test_exhaustive_b22_subsets_give_three():
    edges = debruijn_edges(2, 2)
    best = 0
    for mask in range(1 << len(edges)):
        sub = [e for i, e in enumerate(edges) if mask >> i & 1]
        rep = validate_tile(TileGraph(2, 2, frozenset(sub)))
        if rep.certified:
            best = max(best, len(sub))
    assert best == 3


def test_validate_tile_reports():
    tile = TileGraph.from_levels(2, 2, [0, 1, 2, 1])
    rep = validate_tile(tile)
    assert rep.stratifiable and rep.certified
    assert rep.internal + rep.broken == 8
    assert "certified=true" in rep.summary()

    looped = TileGraph(2, 2, frozenset({(0, 0)}))
    rep = validate_tile(looped)
    assert not rep.stratifiable and not rep.certified
    assert rep.witness is not None
    assert "height=undefined" in rep.summary()

    acyclic = TileGraph(2, 2, frozenset({(1, 2)}))
    assert "height=no-loops" in validate_tile(acyclic).summary()


def test_height_above_m_is_not_certified():
    tile = TileGraph.from_levels(3, 2, [1, 3, 4, 5, 3, 2, 4, 4, 5])
    rep = validate_tile(tile)
    assert rep.stratifiable and rep.height == 3
    assert not rep.certified


def test_structure_errors():
    with pytest.raises(TileStructureError):
        validate_tile(TileGraph(2, 2, frozenset({(0, 3)})))
    with pytest.raises(TileStructureError):
        validate_tile(TileGraph(2, 2, frozenset({(0, 1)}), (0, 0, 0, 0)))
    with pytest.raises(TileStructureError):
        validate_tile(TileGraph(2, 2, frozenset(), (0, 0)))


def test_triangle_witness_is_two_forward_one_back():
    res = stratify(3, [(0, 1), (1, 2), (0, 2)])
    assert isinstance(res, LoopTrace)
    assert sorted(loop_balance(res)) == [1, 2]


def test_balanced_four_loop_is_stratifiable():
    # u -> v <- w -> x <- u
    edges = [(0, 1), (2, 1), (2, 3), (0, 3)]
    assert loop_balance(LoopTrace((0, 1, 2, 3, 0), (True, False, True, False))) == (2, 2)
    res = stratify(4, edges)
    assert isinstance(res, Stratification) and res.respects(edges)
    assert max_loop_height(4, edges, res.levels) == 1


def test_three_edge_path_tile_levels():
    tile = TileGraph.from_edges(2, 2, [(w("00"), w("01")), (w("01"), w("11")), (w("11"), w("10"))])
    assert tile.levels == (3, 2, 0, 1)  # words 00, 01, 10, 11
    rep = validate_tile(tile)
    assert rep.height is None and rep.broken == 5


def test_eleven_edge_tile_has_four_height_one_loops():
    edges = [(0, 1), (0, 2), (1, 3), (1, 4), (1, 5), (2, 8), (6, 1), (6, 2), (7, 3), (7, 4), (7, 5)]
    tile = TileGraph.from_edges(3, 2, edges)
    rep = validate_tile(tile)
    assert rep.height == 1 and rep.broken == 16
    cycles = list(nx.simple_cycles(nx.Graph(edges)))
    assert len(cycles) == 4 and all(len(c) == 4 for c in cycles)


def test_mixed_loop_tile_is_unstratifiable():
    # (00,01) plus the directed 3-cycle 01 -> 10 -> 01? B_2^2 has 001->010->100->001 only at M=3
    edges = [(1, 2), (2, 4), (4, 1), (0, 1)]
    assert not validate_tile(TileGraph(2, 3, frozenset(edges))).stratifiable
