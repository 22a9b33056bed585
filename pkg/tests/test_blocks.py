import itertools

import numpy as np
import pytest

from exceptions import GraphError
from isometries.blocks import (block_structure, generate_odd_orbit_family, matricial_representation,
                               minimal_finite_shifts, odd_orbit, pi_components, wold_partition)
from isometries.expr import (ContinuousFunctions, DirectSum, MatrixAlg, Toeplitz, free_product,
                             normalize, structurally_equal, unit_tensor)
from isometries.graph import AdmissibilityTable, GeneratorKind, GeneratorSpec
from isometries.groupoid import ShadowedGraph, Zero, reduce_word
from isometries.index import classify_single
from tests.conftest import graph_of


def finite(gid, defect, base=None):
    return GeneratorSpec(gid, GeneratorKind.FINITE_SHIFT, defect=defect, base=base)


def test_wold_partition(unitary, shift):
    x = finite("x", 2)
    part = wold_partition([x, shift, unitary])
    assert part.unitaries == (unitary,)
    assert part.infinite_shifts == (shift,)
    assert part.finite_shifts == (x,)
    assert wold_partition([]).all() == ()


def test_minimal_finite_shifts():
    pi = AdmissibilityTable()
    u2, u3, u4, u5 = (finite(f"U{k}", k, "U") for k in (2, 3, 4, 5))
    assert minimal_finite_shifts([u2, u4], pi, 4) == [u2]
    assert minimal_finite_shifts([u3, u5], pi, 4) == [u3, u5]
    assert minimal_finite_shifts([u4], pi, 4) == [u4]


def test_pi_components():
    gens = [GeneratorSpec(g, GeneratorKind.INFINITE_SHIFT) for g in ("x", "y", "z")]
    chain = AdmissibilityTable.from_mapping({"x": ["y"], "y*": ["x*"], "y": ["z"], "z*": ["y*"]})
    assert [[g.id for g in cls] for cls in pi_components(gens, chain)] == [["x", "y", "z"]]
    assert len(pi_components(gens, AdmissibilityTable())) == 3


@pytest.mark.parametrize("spec", [
    GeneratorSpec("u", GeneratorKind.UNITARY, spectrum="S"),
    GeneratorSpec("s", GeneratorKind.INFINITE_SHIFT),
    GeneratorSpec("x", GeneratorKind.FINITE_SHIFT, defect=3),
])
def test_singleton_matches_single_classification(spec):
    single = classify_single(spec.index, spec.spectrum, space=spec.id)
    assert structurally_equal(block_structure([spec], AdmissibilityTable(), 3), single)


def test_unitary_and_shift(unitary, shift):
    pi = AdmissibilityTable.from_mapping({"u": ["s"], "s*": ["u*"]})
    expected = unit_tensor("H", free_product(unit_tensor("u", ContinuousFunctions("T")),
                                             unit_tensor("s", MatrixAlg(2))))
    assert structurally_equal(block_structure([unitary, shift], pi, 3), expected)


def test_nested_powers_collapse_to_one_toeplitz(load):
    family = load("toeplitz_powers")
    assert block_structure(family.generators, family.pi, 4) == Toeplitz("U2")


def test_unrelated_finite_shifts_split_into_a_direct_sum():
    x, y = finite("x", 1), finite("y", 2)
    result = block_structure([x, y], AdmissibilityTable(), 3)
    assert structurally_equal(result, DirectSum((Toeplitz("x"), Toeplitz("y"))))


def test_toeplitz_next_to_infinite_shift(load):
    family = load("toeplitz_m2")
    expected = unit_tensor("H", free_product(Toeplitz("Uk"), unit_tensor("V", MatrixAlg(2))))
    assert structurally_equal(block_structure(family.generators, family.pi, 4), expected)


def test_block_structure_ignores_input_order(load):
    for name in ("unitary_shift", "toeplitz_m2", "odd_orbit", "mixed_example"):
        family = load(name)
        first = block_structure(family.generators, family.pi, 3)
        for order in itertools.islice(itertools.permutations(family.generators), 10):
            assert structurally_equal(block_structure(list(order), family.pi, 3), first)


def test_block_structure_is_normalized(load):
    family = load("odd_orbit")
    result = block_structure(family.generators, family.pi, 2)
    assert normalize(result) == result
    assert isinstance(result, DirectSum)
    assert len(result.items) == 4


def test_empty_family_rejected():
    with pytest.raises(GraphError):
        block_structure([], AdmissibilityTable(), 3)


# Matricial representation

def test_one_edge_representation():
    rep = matricial_representation(graph_of(["a", "b"], [("e", "a", "b")]))
    p_a, p_b, e = rep.projections["a"], rep.projections["b"], rep.edges["e"]
    assert np.allclose(p_a, np.diag([1, 0]))
    assert np.allclose(p_b, np.diag([0, 1]))
    assert np.allclose(e, [[0, 1], [0, 0]])
    assert np.linalg.norm(e.conj().T @ e - p_b) <= 1e-12
    assert np.linalg.norm(e @ e.conj().T - p_a) <= 1e-12


def test_vertex_matrices_are_projections():
    rep = matricial_representation(graph_of(["a", "b", "c"], [("e1", "a", "b"), ("e2", "b", "c")]))
    for p in rep.projections.values():
        assert np.linalg.norm(p @ p - p) <= 1e-12
        assert np.linalg.norm(p - p.conj().T) <= 1e-12


def test_two_loops_give_distinct_unitaries():
    rep = matricial_representation(graph_of(["v"], [("e1", "v", "v"), ("e2", "v", "v")]), [0.5, 1.5])
    e1, e2 = rep.edges["e1"], rep.edges["e2"]
    assert not np.allclose(e1, e2)
    for e in (e1, e2):
        assert np.linalg.norm(e.conj().T @ e - rep.projections["v"]) <= 1e-12


def test_parallel_edges_use_roots_of_unity():
    rep = matricial_representation(graph_of(["a", "b"], [("e1", "a", "b"), ("e2", "a", "b")]))
    assert np.isclose(rep.edges["e1"][0, 1], 1.0)
    assert np.isclose(rep.edges["e2"][0, 1], -1.0)


@pytest.mark.parametrize("graph, thetas", [
    (graph_of(["a", "b"], [("e", "a", "b")]), []),
    (graph_of(["v"], [("e1", "v", "v"), ("e2", "v", "v")]), [0.5, 1.5]),
    (graph_of(["v", "w"], [("e", "w", "v"), ("f", "v", "v")]), [2.0]),
])
def test_word_products_vanish_with_the_groupoid_product(graph, thetas):
    rep = matricial_representation(graph, thetas)
    g = ShadowedGraph(graph)
    for length in (1, 2, 3):
        for word in itertools.product(g.letters, repeat=length):
            matrix_zero = np.linalg.norm(rep.word(word)) <= 1e-12
            assert matrix_zero == isinstance(reduce_word(g, word), Zero)


def test_representation_errors():
    with pytest.raises(GraphError):
        matricial_representation(graph_of(["a", "b"], []))
    with pytest.raises(GraphError):
        matricial_representation(graph_of(["v"], [("e1", "v", "v"), ("e2", "v", "v")]), [0.5, 0.5])
    with pytest.raises(GraphError):
        matricial_representation(graph_of(["v"], [("e1", "v", "v")]), [0.0])
    with pytest.raises(GraphError):
        matricial_representation(graph_of(["v"], [("e1", "v", "v")]))


# Odd orbits

def test_orbit_containments():
    orbits = generate_odd_orbit_family(15)
    for small, big in ((7, 3), (3, 1), (1, 0)):
        assert (small, big) in orbits.containments
    assert orbits.orbits[1] == frozenset({1, 3, 7, 15})
    assert odd_orbit(1, 15) == orbits.orbits[1]


def test_maximal_orbits():
    orbits = generate_odd_orbit_family(15)
    assert set(orbits.maximal) == {0, 2, 4, 6, 8, 10, 12, 14}
    brute = {
        n for n, orbit in orbits.orbits.items()
        if not any(orbit < other for m, other in orbits.orbits.items() if m != n)
    }
    assert set(orbits.maximal) == brute


def test_orbit_family_generators_and_pi():
    orbits = generate_odd_orbit_family(15)
    assert [g.id for g in orbits.family] == [f"y{n}" for n in range(8)]
    assert len(pi_components(list(orbits.family), orbits.pi)) == 4
    assert orbits.pi.related("y3", "y1")
    assert not orbits.pi.related("y2", "y1")


def test_orbit_family_needs_positive_bound():
    with pytest.raises(ValueError):
        generate_odd_orbit_family(0)
