"""
Block-structure classification of the C*-algebra generated by a family
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from exceptions import GraphError

from .expr import (AlgebraExpr, Closure, ContinuousFunctions, DirectSum, FreeProduct,
                   MatrixAlg, Toeplitz, normalize, unit_tensor)
from .graph import (AdmissibilityTable, DirectedGraph, GeneratorKind, GeneratorSpec,
                    components, corresponding_graph, full_subgraph_leq, generators_related)
from .groupoid import SignedEdge

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WoldPartition:
    unitaries: Tuple[GeneratorSpec, ...] = ()
    infinite_shifts: Tuple[GeneratorSpec, ...] = ()
    finite_shifts: Tuple[GeneratorSpec, ...] = ()

    def all(self) -> Tuple[GeneratorSpec, ...]:
        return self.unitaries + self.infinite_shifts + self.finite_shifts


def wold_partition(family: Sequence[GeneratorSpec]) -> WoldPartition:
    """Split the family into unitaries, infinite co-rank and finite co-rank shifts"""
    by_kind: Dict[GeneratorKind, List[GeneratorSpec]] = {kind: [] for kind in GeneratorKind}
    for g in family:
        by_kind[g.kind].append(g)
    return WoldPartition(
        tuple(by_kind[GeneratorKind.UNITARY]),
        tuple(by_kind[GeneratorKind.INFINITE_SHIFT]),
        tuple(by_kind[GeneratorKind.FINITE_SHIFT]),
    )


def minimal_finite_shifts(finite_shifts: Sequence[GeneratorSpec], pi: AdmissibilityTable,
                          depth: int) -> List[GeneratorSpec]:
    """
    Finite shifts whose chain is not swallowed by a related chain.

    A chain x sits inside the chain y when full_subgraph_leq(G_x, G_y);
    for powers of one shift that is y's defect dividing x's, so the
    retained generators are those of minimal defect. Equal chains keep
    the smallest id.
    """
    graphs = {g.id: corresponding_graph(g, depth) for g in finite_shifts}
    kept = []
    for g in finite_shifts:
        dominated = False
        for h in finite_shifts:
            if h.id == g.id or not generators_related(g, h, pi):
                continue
            if full_subgraph_leq(graphs[g.id], graphs[h.id]):
                if not full_subgraph_leq(graphs[h.id], graphs[g.id]) or h.id < g.id:
                    dominated = True
                    break
        if not dominated:
            kept.append(g)
    return kept


def pi_components(gens: Sequence[GeneratorSpec], pi: AdmissibilityTable) -> List[List[GeneratorSpec]]:
    """Connected classes of the relation "some pi between the pair is nonzero\""""
    parent = list(range(len(gens)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, g in enumerate(gens):
        for j in range(i + 1, len(gens)):
            if generators_related(g, gens[j], pi):
                parent[find(j)] = find(i)

    classes: Dict[int, List[GeneratorSpec]] = {}
    for i, g in enumerate(gens):
        classes.setdefault(find(i), []).append(g)
    return list(classes.values())


def component_space(ids: Sequence[str]) -> str:
    """Space tag of the scalar unit over one pi-component of a family"""
    return "H{" + ",".join(sorted(ids)) + "}"


def _toeplitz_block(finite: Sequence[GeneratorSpec]) -> AlgebraExpr:
    smallest = min(finite, key=lambda g: (g.defect, g.id))
    return Toeplitz(smallest.id)


def _component_blocks(part: WoldPartition, pi: AdmissibilityTable, depth: int) -> List[AlgebraExpr]:
    blocks: List[AlgebraExpr] = [unit_tensor(u.id, ContinuousFunctions(u.spectrum or "T"))
                                 for u in part.unitaries]
    blocks += [unit_tensor(s.id, MatrixAlg(2)) for s in part.infinite_shifts]
    if part.finite_shifts:
        minimal = minimal_finite_shifts(part.finite_shifts, pi, depth)
        toeplitz = [_toeplitz_block(cls) for cls in pi_components(minimal, pi)]
        blocks.append(DirectSum(tuple(toeplitz)))
    return blocks


def block_structure(family: Sequence[GeneratorSpec], pi: AdmissibilityTable,
                    depth: int) -> AlgebraExpr:
    """
    Classify C*(family) up to *-isomorphism.

    Within one pi-component the algebra is the scalar unit tensored with
    the closed free product of: a C(spectrum) block per unitary, an M2
    block per infinite co-rank shift, and the direct sum of one Toeplitz
    block per pi-class of minimal finite shifts. Separate pi-components
    add up as a direct sum.

    Args:
        family: Wold family, pi already validated
        pi: admissibility table
        depth: truncation depth of finite-shift chains

    Returns:
        Normalized expression
    """
    if not family:
        raise GraphError("cannot classify an empty family")

    groups = pi_components(list(family), pi)
    summands = []
    for group in groups:
        part = wold_partition(group)
        blocks = _component_blocks(part, pi, depth)
        space = "H" if len(groups) == 1 else component_space([g.id for g in group])
        summands.append(unit_tensor(space, FreeProduct(tuple(blocks), Closure.TOPOLOGICAL)))

    result = normalize(DirectSum(tuple(summands)))
    logger.info(f"Block structure of {len(family)} generator(s) over {len(groups)} component(s)")
    return result


@dataclass
class MatricialRepresentation:
    """
    Vertex projections P_j and edge matrices E_e of a finite connected
    graph, in the order of graph.vertices
    """
    vertex_order: List[str]
    projections: Dict[str, np.ndarray] = field(default_factory=dict)
    edges: Dict[str, np.ndarray] = field(default_factory=dict)

    def letter(self, letter: SignedEdge) -> np.ndarray:
        matrix = self.edges[letter.edge_id]
        return matrix.conj().T if letter.inverse else matrix

    def word(self, letters: Sequence[SignedEdge]) -> np.ndarray:
        n = len(self.vertex_order)
        product = np.eye(n, dtype=complex)
        for letter in letters:
            product = product @ self.letter(letter)
        return product


def matricial_representation(graph: DirectedGraph,
                             thetas: Optional[Sequence[float]] = None) -> MatricialRepresentation:
    """
    Concrete matrices for a connected graph.

    A non-loop edge from vertex i to vertex j becomes the matrix whose only
    nonzero entry is omega^m at (i, j), where the k parallel edges i -> j
    take m = 0, ..., k-1 and omega = exp(2 pi i / k). The m-th loop at j
    becomes exp(i theta) at (j, j), consuming thetas in edge order.

    Raises:
        GraphError: disconnected graph, missing thetas, or a zero or
            repeated theta at one vertex
    """
    if not graph.vertices:
        raise GraphError("matricial representation needs at least one vertex")
    if len(components(graph)) != 1:
        raise GraphError("matricial representation needs a connected graph")

    thetas = list(thetas or [])
    order = graph.vertex_ids
    position = {vid: i for i, vid in enumerate(order)}
    n = len(order)

    rep = MatricialRepresentation(order)
    for vid, i in position.items():
        p = np.zeros((n, n), dtype=complex)
        p[i, i] = 1.0
        rep.projections[vid] = p

    parallel: Dict[Tuple[str, str], List[str]] = {}
    for e in graph.edges:
        if e.source != e.target:
            parallel.setdefault((e.source, e.target), []).append(e.id)

    loop_thetas: Dict[str, List[float]] = {}
    loop_index = 0
    for e in graph.edges:
        i, j = position[e.source], position[e.target]
        matrix = np.zeros((n, n), dtype=complex)
        if e.source == e.target:
            if loop_index >= len(thetas):
                raise GraphError(f"no theta left for loop {e.id}")
            theta = float(thetas[loop_index])
            loop_index += 1
            if np.isclose(np.exp(1j * theta), 1.0):
                raise GraphError(f"theta for loop {e.id} must be nonzero mod 2 pi")
            seen = loop_thetas.setdefault(e.source, [])
            if any(np.isclose(np.exp(1j * theta), np.exp(1j * t)) for t in seen):
                raise GraphError(f"repeated theta {theta} at vertex {e.source}")
            seen.append(theta)
            matrix[i, i] = np.exp(1j * theta)
        else:
            group = parallel[(e.source, e.target)]
            omega = np.exp(2j * np.pi / len(group))
            matrix[i, j] = omega ** group.index(e.id)
        rep.edges[e.id] = matrix
    return rep


@dataclass(frozen=True)
class OddOrbitFamily:
    """
    Infinite shifts y_n: K_n -> K_{2n+1} together with the orbits of
    f(m) = 2m + 1 truncated at n_max
    """
    n_max: int
    family: Tuple[GeneratorSpec, ...]
    pi: AdmissibilityTable
    orbits: Dict[int, FrozenSet[int]]
    containments: Tuple[Tuple[int, int], ...]
    maximal: Tuple[int, ...]


def odd_orbit(n: int, n_max: int) -> FrozenSet[int]:
    orbit = []
    while n <= n_max:
        orbit.append(n)
        n = 2 * n + 1
    return frozenset(orbit)


def generate_odd_orbit_family(n_max: int) -> OddOrbitFamily:
    """
    Build the orbit family up to n_max.

    Returns:
        Generators y_n for every n with 2n + 1 <= n_max, the pi table
        pi(y_{2n+1}, y_n) != 0, the orbits X_(n) for n <= n_max, the strict
        containments (m, n) meaning X_(m) is a proper subset of X_(n), and
        the indices of the maximal orbits
    """
    if n_max < 1:
        raise ValueError(f"n_max must be positive, got {n_max}")

    orbits = {n: odd_orbit(n, n_max) for n in range(n_max + 1)}
    containments = tuple(
        (m, n) for m in orbits for n in orbits if m != n and orbits[m] < orbits[n]
    )
    contained = {m for m, _ in containments}
    maximal = tuple(n for n in orbits if n not in contained)

    family = tuple(
        GeneratorSpec(f"y{n}", GeneratorKind.INFINITE_SHIFT)
        for n in range(n_max + 1) if 2 * n + 1 <= n_max
    )
    ids = {g.id for g in family}
    nonzero: Dict[str, List[str]] = {}
    for g in family:
        n = int(g.id[1:])
        child = f"y{2 * n + 1}"
        if child in ids:
            nonzero.setdefault(child, []).append(g.id)
            nonzero.setdefault(f"{g.id}*", []).append(f"{child}*")
    pi = AdmissibilityTable.from_mapping(nonzero)

    logger.debug(f"Odd orbit family up to {n_max}: {len(family)} generators, maximal {maximal}")
    return OddOrbitFamily(n_max, family, pi, orbits, containments, maximal)
