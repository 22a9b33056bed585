import itertools

import pytest

from exceptions import GraphError
from isometries.graph import (AdmissibilityTable, DirectedGraph, Edge, GeneratorKind, GeneratorSpec,
                              ProjectionToken, Vertex,
                              SignedGen, absorbed_generators, components, conditional_glue,
                              corresponding_graph, disjoint_union, full_subgraph_leq, g_graph,
                              glue, graphs_isomorphic, pi_validate, to_dot)
from tests.conftest import graph_of


def finite(gid, defect, base=None):
    return GeneratorSpec(gid, GeneratorKind.FINITE_SHIFT, defect=defect, base=base)


K = graph_of(["v", "w"], [("e", "w", "v"), ("f", "v", "v")])
DELTA = graph_of(["a", "b", "c"], [("e1", "a", "b"), ("e2", "b", "c")])
UNITARY_SHIFT_PI = AdmissibilityTable.from_mapping(
    {"u": ["s"], "u*": ["s"], "s*": ["u", "u*"]},
    {"u": ["s*"], "s": ["u*"]},
)


# Corresponding graphs

def test_unitary_graph_is_a_loop(unitary):
    g = corresponding_graph(unitary, 3)
    assert len(g.vertices) == 1 and len(g.edges) == 1
    edge = g.edges[0]
    assert edge.source == edge.target
    assert {str(t) for t in g.vertices[0].labels} == {"u*u", "uu*"}


def test_infinite_shift_graph_is_one_edge(shift):
    g = corresponding_graph(shift, 3)
    assert g.vertex_ids == ["s*s", "ss*"]
    assert g.edges[0].source == "s*s" and g.edges[0].target == "ss*"


def test_finite_shift_graph_is_a_truncated_chain():
    g = corresponding_graph(finite("x", 2), 3)
    assert g.vertex_ids == ["x*x", "xx*", "x^2x^2*", "x^3x^3*"]
    assert [e.label for e in g.edges] == ["x^(1)", "x^(2)", "x^(3)"]
    assert g.truncated
    assert g.chain.base == "x" and g.chain.step == 2


def test_depth_must_be_positive(shift):
    with pytest.raises(GraphError):
        corresponding_graph(shift, 0)


# Gluing

def test_glue_counts():
    g1 = graph_of(["a", "b", "c"], [("e1", "a", "b"), ("e2", "b", "c")])
    g2 = graph_of(["a", "b"], [("f", "a", "b")])
    glued = glue(g1, "b", g2, "b")
    assert len(glued.vertices) == len(g1.vertices) + len(g2.vertices) - 1
    assert len(glued.edges) == len(g1.edges) + len(g2.edges)
    assert len(components(glued)) == 1


def test_glue_is_symmetric_up_to_isomorphism():
    g1 = graph_of(["a", "b", "c"], [("e1", "a", "b"), ("e2", "b", "c")])
    g2 = graph_of(["p", "q"], [("f", "p", "q")])
    assert graphs_isomorphic(glue(g1, "b", g2, "q"), glue(g2, "q", g1, "b"))


def test_glue_missing_vertex():
    with pytest.raises(GraphError):
        glue(K, "nope", DELTA, "a")


def test_disjoint_union_primes_clashing_ids():
    union, renamed = disjoint_union(DELTA, DELTA)
    assert len(union.vertices) == 6
    assert renamed["a"] == "a'"
    assert len(components(union)) == 2


# Order and isomorphism

def test_chain_divisibility():
    u4 = corresponding_graph(finite("U4", 4, "U"), 4)
    u2 = corresponding_graph(finite("U2", 2, "U"), 4)
    u3 = corresponding_graph(finite("U3", 3, "U"), 4)
    assert full_subgraph_leq(u4, u2)
    assert not full_subgraph_leq(u2, u4)
    assert not full_subgraph_leq(u3, u2)
    assert not full_subgraph_leq(u2, u3)


def test_full_subgraph_basics(unitary, shift):
    assert full_subgraph_leq(DELTA, DELTA)
    assert not full_subgraph_leq(corresponding_graph(unitary, 1), corresponding_graph(shift, 1))
    edge = graph_of(["a", "b"], [("e1", "a", "b")])
    assert full_subgraph_leq(edge, DELTA)


def assert_partial_order(graphs):
    n = len(graphs)
    leq = {(i, j): full_subgraph_leq(graphs[i], graphs[j])
           for i, j in itertools.product(range(n), repeat=2)}
    for i in range(n):
        assert leq[i, i]
    for i, j in itertools.product(range(n), repeat=2):
        if leq[i, j] and leq[j, i]:
            assert graphs_isomorphic(graphs[i], graphs[j])
    for i, j, k in itertools.product(range(n), repeat=3):
        if leq[i, j] and leq[j, k]:
            assert leq[i, k]


@pytest.mark.parametrize("name", [
    "single_unitary", "infinite_shift", "unitary_shift", "toeplitz_powers", "toeplitz_m2",
    "path_two", "mixed_example", "odd_orbit",
])
def test_full_subgraph_order_on_fixture_graphs(load, name):
    family = load(name)
    assert_partial_order([corresponding_graph(g, 3) for g in family.generators])


def test_full_subgraph_order_on_plain_graphs():
    edge = graph_of(["p", "q"], [("e1", "p", "q")])
    other_edge = graph_of(["p", "q"], [("e2", "p", "q")])
    point = graph_of(["p"], [])
    loop = graph_of(["v"], [("f", "v", "v")])
    graphs = [edge, other_edge, point, loop, DELTA, K]
    assert full_subgraph_leq(other_edge, DELTA)
    assert full_subgraph_leq(point, K)
    assert full_subgraph_leq(loop, K)
    assert not full_subgraph_leq(DELTA, edge)
    assert not full_subgraph_leq(edge, K)
    assert_partial_order(graphs)
    chains = [corresponding_graph(finite(f"U{k}", k, "U"), 3) for k in (1, 2, 3, 4, 6)]
    assert_partial_order(chains)


def test_embedding_respects_edge_multiplicity():
    double = DirectedGraph((Vertex("p"), Vertex("q")),
                           (Edge("e1", "p", "q", "x"), Edge("e2", "p", "q", "x")))
    single = DirectedGraph((Vertex("p"), Vertex("q")), (Edge("e", "p", "q", "x"),))
    assert full_subgraph_leq(single, double)
    assert not full_subgraph_leq(double, single)
    opposite = graph_of(["p", "q"], [("e1", "p", "q"), ("e2", "q", "p")])
    assert not graphs_isomorphic(double, opposite)
    assert graphs_isomorphic(double, graph_of(["a", "b"], [("f1", "b", "a"), ("f2", "b", "a")]))


def test_isomorphism_ignores_labels():
    assert graphs_isomorphic(graph_of(["v"], [("u", "v", "v")]), graph_of(["w"], [("z", "w", "w")]))
    assert not graphs_isomorphic(graph_of(["a", "b"], [("e", "a", "b")]), DELTA)
    reversed_k = graph_of(["v", "w"], [("e", "v", "w"), ("f", "v", "v")])
    assert not graphs_isomorphic(K, reversed_k)


def test_isomorphism_vertex_limit():
    big = graph_of([f"v{i}" for i in range(11)], [])
    with pytest.raises(GraphError):
        graphs_isomorphic(big, big)


# Admissibility

def test_self_pairs_always_admissible():
    pi = AdmissibilityTable()
    x = SignedGen("x")
    assert pi.lookup(x, x.star())
    assert pi.lookup(x.star(), x)
    assert not pi.lookup(x, SignedGen("y"))


def test_lookup_uses_adjoint_entry():
    pi = AdmissibilityTable.from_mapping({"x": ["y"]})
    assert pi.lookup(SignedGen.parse("y*"), SignedGen.parse("x*"))


def test_chain_entries_propagate_to_powers():
    pi = AdmissibilityTable.from_mapping({"x": ["y"], "y*": ["x*"]}, chains=["x"])
    assert pi.lookup(SignedGen("x", 3), SignedGen("y"))
    assert pi.lookup(SignedGen("y", adjoint=True), SignedGen("x", 2, adjoint=True))
    assert not pi.lookup(SignedGen("x", 2, adjoint=True), SignedGen("y"))
    assert not pi.lookup(SignedGen("x"), SignedGen("y", adjoint=True))


def test_projection_tokens():
    init = ProjectionToken("x", 2, "init")
    fin = ProjectionToken("x", 1, "fin")
    assert str(init) == "x^2*x^2"
    assert str(fin) == "xx*"
    assert init.as_left() == SignedGen("x", 2)
    assert fin.as_right() == SignedGen("x")


def test_pi_validate_flags_missing_adjoint():
    family = [GeneratorSpec("x", GeneratorKind.INFINITE_SHIFT), GeneratorSpec("y", GeneratorKind.INFINITE_SHIFT)]
    violations = pi_validate(family, AdmissibilityTable.from_mapping({"x": ["y"]}))
    assert len(violations) == 1
    assert "pi(y*, x*)" in violations[0]


def test_pi_validate_accepts_symmetric_table(unitary, shift):
    assert pi_validate([unitary, shift], UNITARY_SHIFT_PI) == []


def test_pi_validate_catches_contradictions(shift):
    x = finite("x", 1)
    pi = AdmissibilityTable.from_mapping(
        {"x": ["s"], "s*": ["x*"], "q": ["s"]},
        {"x^2": ["s"], "s": ["s*"]},
        chains=["x"],
    )
    violations = pi_validate([x, shift], pi)
    assert any("unknown generator 'q'" in v for v in violations)
    assert any("cannot vanish" in v for v in violations)
    assert any("contradicts the nonzero chain entry" in v for v in violations)


def test_pi_validate_rejects_powers_of_non_finite_shifts(shift):
    pi = AdmissibilityTable.from_mapping({"s^2": ["s"], "s*": ["s^2*"]})
    assert any("not a finite shift" in v for v in pi_validate([shift], pi))


# Conditional gluing

def test_conditional_glue_with_zero_pi_is_disjoint(unitary, shift):
    g_u, g_s = corresponding_graph(unitary, 1), corresponding_graph(shift, 1)
    result = conditional_glue(g_u, g_s, AdmissibilityTable())
    assert len(result.vertices) == 3
    assert len(components(result)) == 2


def test_unitary_meeting_shift_range_gives_k(unitary, shift):
    result = conditional_glue(corresponding_graph(unitary, 1), corresponding_graph(shift, 1),
                              UNITARY_SHIFT_PI)
    assert graphs_isomorphic(result, K)


def test_smaller_defect_chain_absorbs():
    u2, u4 = finite("U2", 2, "U"), finite("U4", 4, "U")
    pi = AdmissibilityTable.from_mapping({}, chains=["U2", "U4"])
    result = conditional_glue(corresponding_graph(u2, 4), corresponding_graph(u4, 4),
                              AdmissibilityTable.from_mapping(
                                  {"U4": ["U2", "U2*"], "U4*": ["U2", "U2*"],
                                   "U2": ["U4", "U4*"], "U2*": ["U4", "U4*"]}))
    assert result == corresponding_graph(u2, 4)
    assert absorbed_generators([u2, u4], pi, 4) == ["U4"]


def test_g_graph_two_related_unitaries_share_a_vertex():
    u1 = GeneratorSpec("u1", GeneratorKind.UNITARY)
    u2 = GeneratorSpec("u2", GeneratorKind.UNITARY)
    pi = AdmissibilityTable.from_mapping({
        "u1": ["u2", "u2*"], "u1*": ["u2", "u2*"],
        "u2": ["u1", "u1*"], "u2*": ["u1", "u1*"],
    })
    result = g_graph([u1, u2], pi, 1)
    assert len(result.vertices) == 1
    assert len(result.edges) == 2


def test_g_graph_unrelated_unitaries_stay_apart():
    u1 = GeneratorSpec("u1", GeneratorKind.UNITARY)
    u2 = GeneratorSpec("u2", GeneratorKind.UNITARY)
    result = g_graph([u1, u2], AdmissibilityTable(), 1)
    assert graphs_isomorphic(result, graph_of(["a", "b"], [("e", "a", "a"), ("f", "b", "b")]))


def test_g_graph_of_related_shifts_is_delta():
    s1 = GeneratorSpec("s1", GeneratorKind.INFINITE_SHIFT)
    s2 = GeneratorSpec("s2", GeneratorKind.INFINITE_SHIFT)
    pi = AdmissibilityTable.from_mapping({"s1": ["s2"], "s2*": ["s1*"]})
    assert graphs_isomorphic(g_graph([s1, s2], pi, 1), DELTA)


def test_g_graph_is_order_independent(load):
    for name in ("unitary_shift", "path_two", "toeplitz_m2", "odd_orbit"):
        family = load(name)
        first = g_graph(family.generators, family.pi, 2)
        for order in itertools.islice(itertools.permutations(family.generators), 6):
            other = g_graph(list(order), family.pi, 2)
            if len(first.vertices) <= 10:
                assert graphs_isomorphic(first, other)
            else:
                assert first.summary() == other.summary()


def test_g_graph_of_toeplitz_next_to_infinite_shift_is_a_comb(load):
    family = load("toeplitz_m2")
    comb = graph_of(
        [f"t{i}" for i in range(5)] + [f"b{i}" for i in range(5)],
        [(f"c{i}", f"t{i - 1}", f"t{i}") for i in range(1, 5)]
        + [("v0", "b0", "t0")]
        + [(f"v{i}", f"t{i}", f"b{i}") for i in range(1, 5)],
    )
    graph = g_graph(family.generators, family.pi, 4)
    assert graph.summary() == {"vertices": 10, "edges": 9, "components": 1}
    assert graphs_isomorphic(graph, comb)


def test_odd_orbit_g_graph_components(load):
    family = load("odd_orbit")
    graph = g_graph(family.generators, family.pi, 2)
    assert len(components(graph)) == 4


# DOT

def test_to_dot(shift):
    dot = to_dot(corresponding_graph(shift, 1))
    assert dot.startswith("digraph")
    assert '"s*s" -> "ss*"' in dot
    assert "dashed" not in dot
    assert "s^-1" in to_dot(corresponding_graph(shift, 1), include_shadow=True)
