from itertools import permutations

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from autensemble import perm as P
from autensemble.codes import bb_shift_generators, qrm15_generators
from autensemble.gf2 import BinaryMatrix
from autensemble.tanner_aut import (
    GeneratorSet,
    Overflow,
    build_joint_tanner,
    build_tanner,
    find_automorphism_generators,
    graph_from_edges,
    group_elements,
    group_order,
    prior_colors,
    sample_ensemble,
)


def edge_set(g) -> set[tuple[int, int]]:
    return {(int(k) // g.n_vertices, int(k) % g.n_vertices) for k in g.edge_keys()}


def brute_force_order(g) -> int:
    adj = edge_set(g)
    count = 0
    for p in permutations(range(g.n_vertices)):
        if any(g.colors[p[v]] != g.colors[v] for v in range(g.n_vertices)):
            continue
        if all((p[u], p[v]) in adj for u, v in adj):
            count += 1
    return count


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 7))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    colors = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    return graph_from_edges(n, edges, colors)


@given(small_graphs())
def test_matches_brute_force(g):
    gs = find_automorphism_generators(g)
    assert all(g.is_automorphism(x) for x in gs.generators)
    assert group_order(gs.generators or [P.identity(g.n_vertices)]) == brute_force_order(g)
    assert gs.stats["order_from_chain"] == brute_force_order(g)


def test_path_with_distinct_end_colors():
    g = graph_from_edges(4, [(0, 1), (1, 2), (2, 3)], [0, 1, 1, 2])
    assert find_automorphism_generators(g).generators == []


def test_qrm_graph_sizes(qrm):
    g = build_tanner(qrm.hx)
    assert g.n_vertices == 19 and g.n_edges == 32
    empty = build_tanner(BinaryMatrix.zeros(3, 4))
    assert empty.n_edges == 0
    assert list(empty.colors) == [0] * 4 + [1] * 3


def test_bipartite_and_symmetric(bb72):
    g = build_tanner(bb72.hx)
    keys = edge_set(g)
    assert all((v, u) in keys for u, v in keys)
    assert all((u < 72) != (v < 72) for u, v in keys)


def test_qrm_joint_group(qrm):
    g = build_joint_tanner(qrm.hx, qrm.hz)
    gs = find_automorphism_generators(g)
    assert group_order(gs) == 24


def test_bb72_contains_shifts(bb72):
    gs = find_automorphism_generators(build_tanner(bb72.hx))
    order = group_order(gs)
    assert order >= 36 and order % 36 == 0
    elems = set(group_elements(gs.variable_permutations(), cap=10_000))
    for s in bb_shift_generators(6, 6):
        assert s in elems


def test_group_order_examples():
    assert group_order([]) == 1
    assert group_order(qrm15_generators()) == 20160
    capped = group_order(qrm15_generators(), cap=100)
    assert isinstance(capped, Overflow) and int(capped) == 100


def test_sample_ensemble_examples(qrm):
    gens = qrm15_generators()
    assert sample_ensemble(gens, 1, seed=0) == [P.identity(15)]
    a = sample_ensemble(gens, 5, seed=11)
    assert a == sample_ensemble(gens, 5, seed=11)
    assert len(set(a)) == 5 and a[0] == P.identity(15)
    joint = find_automorphism_generators(build_joint_tanner(qrm.hx, qrm.hz)).variable_permutations()
    full = sample_ensemble(joint, 30, seed=0)
    assert len(full) == 24 and len(set(full)) == 24


def test_sample_include_first():
    gens = qrm15_generators()
    extra = sample_ensemble(gens, 3, seed=1)[2]
    out = sample_ensemble(gens, 4, seed=5, include=[extra])
    assert out[1] == extra


def test_prior_colors_classes():
    assert prior_colors([0.1, 0.2, 0.1, 0.1 + 1e-15]).tolist() == [0, 1, 0, 0]


def test_generator_set_json(tmp_path, qrm):
    gs = find_automorphism_generators(build_joint_tanner(qrm.hx, qrm.hz))
    path = tmp_path / "g.json"
    gs.save(path)
    back = GeneratorSet.load(path)
    assert back.generators == gs.generators
    assert back.variable_permutations() == gs.variable_permutations()
    assert all(len(v) == 15 for v in back.variable_permutations())


def test_prior_coloring_restricts_group(bb72):
    colors = np.zeros(72, dtype=np.int64)
    colors[0] = 1
    gs = find_automorphism_generators(build_tanner(bb72.hx, colors))
    assert all(p[0] == 0 for p in gs.variable_permutations())
