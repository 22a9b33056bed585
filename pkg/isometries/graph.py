"""
Directed graphs of partial isometries: corresponding graphs, gluing,
conditional gluing driven by the admissibility map, and the G-graph
"""

import itertools
import logging
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism
from networkx.utils import UnionFind

from config import settings
from exceptions import GraphError

from .index import INF, ExtNat, StarIndex

logger = logging.getLogger(__name__)


class GeneratorKind(str, Enum):
    UNITARY = "unitary"
    INFINITE_SHIFT = "infinite_shift"
    FINITE_SHIFT = "finite_shift"


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Symbolic description of one Wold piece: a unitary with a spectrum
    tag, a shift of infinite co-rank, or a shift of finite co-rank
    `defect`. Finite shifts sharing a `base` are powers of one shift.
    """
    id: str
    kind: GeneratorKind
    spectrum: Optional[str] = None
    defect: Optional[int] = None
    base: Optional[str] = None
    unitary_dim: ExtNat = INF
    declared_index: Optional[StarIndex] = None

    def __post_init__(self):
        if self.kind == GeneratorKind.FINITE_SHIFT:
            if not isinstance(self.defect, int) or self.defect < 1:
                raise ValueError(f"finite shift {self.id} needs a positive integer defect")
        elif self.defect is not None:
            raise ValueError(f"only finite shifts carry a defect ({self.id})")
        if self.kind == GeneratorKind.UNITARY and not self.unitary_dim:
            raise ValueError(f"unitary {self.id} must act on a nonzero space")
        if self.declared_index is not None:
            self._check_declared(self.declared_index)

    def _check_declared(self, index: StarIndex):
        if self.kind == GeneratorKind.UNITARY:
            ok = not index.eps_minus and bool(index.eps0)
        elif self.kind == GeneratorKind.INFINITE_SHIFT:
            ok = index.eps_minus.is_inf
        else:
            ok = index.eps_minus == ExtNat(self.defect)
        if not ok:
            raise ValueError(f"declared index {index} does not fit a {self.kind.value} ({self.id})")

    @property
    def index(self) -> StarIndex:
        if self.declared_index is not None:
            return self.declared_index
        if self.kind == GeneratorKind.UNITARY:
            return StarIndex.of(self.unitary_dim, 0, 0, 0)
        if self.kind == GeneratorKind.INFINITE_SHIFT:
            return StarIndex.of(0, 0, INF, 0)
        return StarIndex.of(0, 0, self.defect, 0)

    @property
    def chain_base(self) -> str:
        return self.base or self.id


_SIGNED_RE = re.compile(r"^(?P<name>[A-Za-z_][\w.]*)(?:\^(?P<power>\d+))?(?P<star>\*)?$")


@dataclass(frozen=True, order=True)
class SignedGen:
    """A generator x, its adjoint x*, or a power x^n / x^n* of a finite shift"""
    name: str
    power: int = 1
    adjoint: bool = False

    @classmethod
    def parse(cls, text: str) -> "SignedGen":
        match = _SIGNED_RE.match(text.strip())
        if not match or (match.group("power") is not None and int(match.group("power")) < 1):
            raise ValueError(f"not a signed generator: {text!r}")
        return cls(match.group("name"), int(match.group("power") or 1), bool(match.group("star")))

    def star(self) -> "SignedGen":
        return SignedGen(self.name, self.power, not self.adjoint)

    def __str__(self) -> str:
        text = self.name if self.power == 1 else f"{self.name}^{self.power}"
        return text + ("*" if self.adjoint else "")


@dataclass(frozen=True, order=True)
class ProjectionToken:
    """
    Formal projection labelling a vertex: x^n* x^n (side "init")
    or x^n x^n* (side "fin")
    """
    generator: str
    power: int
    side: str

    def as_left(self) -> SignedGen:
        # the a with a*a equal to this projection
        return SignedGen(self.generator, self.power, self.side == "fin")

    def as_right(self) -> SignedGen:
        # the b with bb* equal to this projection
        return SignedGen(self.generator, self.power, self.side == "init")

    def __str__(self) -> str:
        p = self.generator if self.power == 1 else f"{self.generator}^{self.power}"
        return f"{p}*{p}" if self.side == "init" else f"{p}{p}*"


Pair = Tuple[SignedGen, SignedGen]


@dataclass(frozen=True)
class AdmissibilityTable:
    """
    Symbolic admissibility map: `nonzero` holds the pairs (a, b) with
    pi(a, b) = (a*a)(bb*) != 0, `zero` the pairs declared to vanish.
    Undeclared pairs count as zero, except along finite-shift chains
    where a nonzero entry for x propagates to every power of x.
    """
    nonzero: FrozenSet[Pair] = frozenset()
    zero: FrozenSet[Pair] = frozenset()
    chains: FrozenSet[str] = frozenset()

    @classmethod
    def from_mapping(cls, nonzero: Mapping[str, Iterable[str]],
                     zero: Optional[Mapping[str, Iterable[str]]] = None,
                     chains: Iterable[str] = ()) -> "AdmissibilityTable":
        def pairs(mapping):
            return frozenset(
                (SignedGen.parse(left), SignedGen.parse(right))
                for left, rights in (mapping or {}).items()
                for right in rights
            )
        return cls(pairs(nonzero), pairs(zero), frozenset(chains))

    def declared(self, a: SignedGen, b: SignedGen) -> Optional[bool]:
        if (a, b) in self.nonzero:
            return True
        if (a, b) in self.zero:
            return False
        return None

    def _chain_root(self, s: SignedGen) -> SignedGen:
        # x^n follows x and x^n* follows x*
        if s.name in self.chains:
            return SignedGen(s.name, adjoint=s.adjoint)
        return s

    def propagated(self, a: SignedGen, b: SignedGen) -> bool:
        """Nonzero implied by a chain entry x*x >= xx* >= x^2 x^2* >= ..."""
        if a.name not in self.chains and b.name not in self.chains:
            return False
        a0, b0 = self._chain_root(a), self._chain_root(b)
        return (a0, b0) in self.nonzero or (b0.star(), a0.star()) in self.nonzero

    def lookup(self, a: SignedGen, b: SignedGen) -> bool:
        if a.name == b.name and a.power == b.power and a.adjoint != b.adjoint:
            # pi(x, x*) = x*x and pi(x*, x) = xx*
            return True
        for left, right in ((a, b), (b.star(), a.star())):
            value = self.declared(left, right)
            if value is not None:
                return value
        return self.propagated(a, b)

    def admits(self, p: ProjectionToken, q: ProjectionToken) -> bool:
        """Whether the projections p and q have nonzero product"""
        return self.lookup(p.as_left(), q.as_right()) or self.lookup(q.as_left(), p.as_right())

    def related(self, x: str, y: str) -> bool:
        """Some pi between the generators x and y (either order, either sign) is nonzero"""
        signs = (False, True)
        for sx, sy in itertools.product(signs, signs):
            a, b = SignedGen(x, adjoint=sx), SignedGen(y, adjoint=sy)
            if self.lookup(a, b) or self.lookup(b, a):
                return True
        return False

    def to_json(self) -> Dict[str, Dict[str, List[str]]]:
        def grouped(pairs):
            out: Dict[str, List[str]] = {}
            for a, b in sorted(pairs):
                out.setdefault(str(a), []).append(str(b))
            return out
        return {"nonzero": grouped(self.nonzero), "zero": grouped(self.zero)}


def pi_validate(family: Sequence[GeneratorSpec], pi: AdmissibilityTable) -> List[str]:
    """
    Check the table for adjoint symmetry pi(x, y) != 0 <=> pi(y*, x*) != 0,
    for contradictions, and for zero entries that contradict the
    propagation along a finite-shift chain.

    Returns:
        Human-readable violations; empty when the table is consistent
    """
    violations: List[str] = []
    kinds = {g.id: g.kind for g in family}

    for a, b in sorted(pi.nonzero | pi.zero):
        for s in (a, b):
            if s.name not in kinds:
                violations.append(f"pi({a}, {b}) names unknown generator '{s.name}'")
            elif s.power > 1 and kinds[s.name] != GeneratorKind.FINITE_SHIFT:
                violations.append(f"pi({a}, {b}) takes a power of '{s.name}', which is not a finite shift")

    for a, b in sorted(pi.nonzero & pi.zero):
        violations.append(f"pi({a}, {b}) is declared both nonzero and zero")

    for a, b in sorted(pi.nonzero):
        if (b.star(), a.star()) not in pi.nonzero:
            violations.append(f"pi({a}, {b}) != 0 but pi({b.star()}, {a.star()}) is not declared nonzero")

    for a, b in sorted(pi.zero):
        if a.name == b.name and a.power == b.power and a.adjoint != b.adjoint:
            violations.append(f"pi({a}, {b}) is a range projection of '{a.name}' and cannot vanish")
        elif pi.propagated(a, b):
            violations.append(f"pi({a}, {b}) = 0 contradicts the nonzero chain entry for "
                              f"'{a.name if a.name in pi.chains else b.name}'")

    if violations:
        logger.warning(f"pi table has {len(violations)} violation(s)")
    return violations


@dataclass(frozen=True)
class Vertex:
    id: str
    labels: FrozenSet[ProjectionToken] = frozenset()

    @property
    def label_text(self) -> str:
        return " = ".join(sorted(str(label) for label in self.labels)) or self.id


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    label: str


@dataclass(frozen=True)
class ChainInfo:
    """Marks the corresponding graph of base^step (a finite-shift chain)"""
    base: str
    step: int


class DirectedGraph:
    """
    Directed multigraph held in a networkx MultiDiGraph. Nodes carry
    their projection labels; edges are keyed by edge id and carry a
    label. Vertices and edges keep insertion order.
    """

    def __init__(self, vertices: Iterable[Vertex] = (), edges: Iterable[Edge] = (),
                 chain: Optional[ChainInfo] = None, truncated: bool = False):
        self.chain = chain
        self.truncated = truncated
        self.nx = nx.MultiDiGraph()
        for v in vertices:
            if v.id in self.nx:
                raise GraphError("duplicate vertex ids")
            self.nx.add_node(v.id, labels=v.labels)
        self._ends: Dict[str, Tuple[str, str]] = {}
        for e in edges:
            if e.id in self._ends:
                raise GraphError("duplicate edge ids")
            if e.source not in self.nx or e.target not in self.nx:
                raise GraphError(f"edge {e.id} has an undeclared endpoint")
            self.nx.add_edge(e.source, e.target, key=e.id, label=e.label)
            self._ends[e.id] = (e.source, e.target)

    @cached_property
    def vertices(self) -> Tuple[Vertex, ...]:
        return tuple(Vertex(vid, data["labels"]) for vid, data in self.nx.nodes(data=True))

    @cached_property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(self.edge(eid) for eid in self._ends)

    @property
    def vertex_ids(self) -> List[str]:
        return list(self.nx.nodes)

    def vertex(self, vertex_id: str) -> Vertex:
        if vertex_id not in self.nx:
            raise GraphError(f"no vertex '{vertex_id}' in graph")
        return Vertex(vertex_id, self.nx.nodes[vertex_id]["labels"])

    def edge(self, edge_id: str) -> Edge:
        try:
            s, t = self._ends[edge_id]
        except KeyError:
            raise GraphError(f"no edge '{edge_id}' in graph") from None
        return Edge(edge_id, s, t, self.nx.edges[s, t, edge_id]["label"])

    def has_vertex(self, vertex_id: str) -> bool:
        return vertex_id in self.nx

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._ends

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (self.vertices == other.vertices and self.edges == other.edges
                and self.chain == other.chain and self.truncated == other.truncated)

    def __repr__(self) -> str:
        return f"DirectedGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def summary(self) -> Dict[str, int]:
        return {
            "vertices": len(self.vertices),
            "edges": len(self.edges),
            "components": len(components(self)),
        }


def corresponding_graph(g: GeneratorSpec, depth: int) -> DirectedGraph:
    """
    Graph of one Wold piece.

    A unitary gives one vertex u*u = uu* with a loop, an infinite shift
    the edge s*s -> ss*, and a finite shift the chain
    x*x -> xx* -> x^2x^2* -> ... truncated after `depth` edges.
    """
    if depth < 1:
        raise GraphError(f"depth must be at least 1, got {depth}")

    init = ProjectionToken(g.id, 1, "init")
    fin = ProjectionToken(g.id, 1, "fin")

    if g.kind == GeneratorKind.UNITARY:
        v = Vertex(str(init), frozenset({init, fin}))
        return DirectedGraph((v,), (Edge(g.id, v.id, v.id, g.id),))

    if g.kind == GeneratorKind.INFINITE_SHIFT:
        return DirectedGraph(
            (Vertex(str(init), frozenset({init})), Vertex(str(fin), frozenset({fin}))),
            (Edge(g.id, str(init), str(fin), g.id),),
        )

    vertices = [Vertex(str(init), frozenset({init}))]
    edges = []
    for n in range(1, depth + 1):
        token = ProjectionToken(g.id, n, "fin")
        vertices.append(Vertex(str(token), frozenset({token})))
        label = f"{g.id}^({n})"
        edges.append(Edge(label, vertices[-2].id, vertices[-1].id, label))
    return DirectedGraph(tuple(vertices), tuple(edges),
                         chain=ChainInfo(g.chain_base, g.defect), truncated=True)


def _fresh(name: str, taken: set) -> str:
    candidate = name
    while candidate in taken:
        candidate += "'"
    return candidate


def disjoint_union(g1: DirectedGraph, g2: DirectedGraph) -> Tuple[DirectedGraph, Dict[str, str]]:
    """
    Union of two graphs; vertex and edge ids of g2 that clash with g1
    are primed.

    Returns:
        The union and the renaming applied to g2's vertex ids
    """
    vertex_taken = set(g1.vertex_ids)
    renamed: Dict[str, str] = {}
    vertices = list(g1.vertices)
    for v in g2.vertices:
        new_id = _fresh(v.id, vertex_taken)
        vertex_taken.add(new_id)
        renamed[v.id] = new_id
        vertices.append(Vertex(new_id, v.labels))

    edge_taken = {e.id for e in g1.edges}
    edges = list(g1.edges)
    for e in g2.edges:
        new_id = _fresh(e.id, edge_taken)
        edge_taken.add(new_id)
        edges.append(Edge(new_id, renamed[e.source], renamed[e.target], e.label))

    union = DirectedGraph(tuple(vertices), tuple(edges),
                          truncated=g1.truncated or g2.truncated)
    return union, renamed


def identify(graph: DirectedGraph, pairs: Iterable[Tuple[str, str]]) -> DirectedGraph:
    """
    Quotient of `graph` identifying each pair of vertices. A merged
    vertex is a fresh token carrying every projection label it absorbed.
    """
    merged = UnionFind(graph.vertex_ids)
    for a, b in pairs:
        graph.vertex(a)
        graph.vertex(b)
        merged.union(a, b)

    classes: Dict[str, List[Vertex]] = {}
    for v in graph.vertices:
        classes.setdefault(merged[v.id], []).append(v)

    new_id: Dict[str, str] = {}
    vertices = []
    for members in classes.values():
        merged_id = "#".join(m.id for m in members)
        labels = frozenset().union(*(m.labels for m in members))
        for m in members:
            new_id[m.id] = merged_id
        vertices.append(Vertex(merged_id, labels))

    edges = tuple(Edge(e.id, new_id[e.source], new_id[e.target], e.label) for e in graph.edges)
    return DirectedGraph(tuple(vertices), edges, truncated=graph.truncated)


def glue(g1: DirectedGraph, v1: str, g2: DirectedGraph, v2: str) -> DirectedGraph:
    """Glued graph of g1 and g2 identifying v1 in g1 with v2 in g2"""
    g1.vertex(v1)
    g2.vertex(v2)
    union, renamed = disjoint_union(g1, g2)
    return identify(union, [(v1, renamed[v2])])


def components(graph: DirectedGraph) -> List[FrozenSet[str]]:
    """Weakly connected components as vertex-id sets"""
    return [frozenset(c) for c in nx.weakly_connected_components(graph.nx)]


def _labels_fit(host: Dict, guest: Dict) -> bool:
    # host and guest map edge keys to attributes for one vertex pair
    have = Counter(data["label"] for data in host.values())
    need = Counter(data["label"] for data in guest.values())
    return all(have[label] >= n for label, n in need.items())


def _embeds(g1: DirectedGraph, g2: DirectedGraph) -> bool:
    # Injective, label-preserving map of g1 into g2 (not necessarily induced)
    if len(g1.vertices) > len(g2.vertices) or len(g1.edges) > len(g2.edges):
        return False
    matcher = isomorphism.MultiDiGraphMatcher(
        g2.nx, g1.nx,
        node_match=lambda host, guest: guest["labels"] <= host["labels"],
        edge_match=_labels_fit,
    )
    return matcher.subgraph_is_monomorphic()


def full_subgraph_leq(g1: DirectedGraph, g2: DirectedGraph) -> bool:
    """
    Whether g1 is a full subgraph of g2. Two finite-shift chains over the
    same base compare by divisibility of their co-ranks: the chain of
    U^a sits inside the chain of U^b exactly when b divides a.
    """
    if g1.chain is not None and g2.chain is not None:
        return g1.chain.base == g2.chain.base and g1.chain.step % g2.chain.step == 0
    return _embeds(g1, g2)


def graphs_isomorphic(g1: DirectedGraph, g2: DirectedGraph,
                      limit: Optional[int] = None) -> bool:
    """Directed multigraph isomorphism, labels ignored"""
    limit = settings.ISOMORPHISM_VERTEX_LIMIT if limit is None else limit
    if max(len(g1.vertices), len(g2.vertices)) > limit:
        raise GraphError(f"isomorphism test is limited to {limit} vertices")
    return nx.is_isomorphic(g1.nx, g2.nx)


def admissible_pairs(g1: DirectedGraph, g2: DirectedGraph,
                     pi: AdmissibilityTable) -> List[Tuple[str, str]]:
    return [
        (p.id, q.id)
        for p in g1.vertices
        for q in g2.vertices
        if any(pi.admits(tp, tq) for tp in p.labels for tq in q.labels)
    ]


def _replicate(host: DirectedGraph, guest: DirectedGraph,
               pairs: List[Tuple[str, str]]) -> DirectedGraph:
    # A fresh copy of `guest` is glued at every host vertex of `pairs`
    result = host
    current = {vid: vid for vid in host.vertex_ids}
    for host_vertex, guest_vertex in pairs:
        union, renamed = disjoint_union(result, guest)
        merged = identify(union, [(current[host_vertex], renamed[guest_vertex])])
        current[host_vertex] = f"{current[host_vertex]}#{renamed[guest_vertex]}"
        result = merged
    return result


def conditional_glue(g1: DirectedGraph, g2: DirectedGraph,
                     pi: AdmissibilityTable) -> DirectedGraph:
    """
    Conditional glued graph of g1 and g2.

    With no admissible vertex pair the result is the disjoint union.
    Otherwise, when one graph is a full subgraph of the other, the larger
    one absorbs it. Otherwise every admissible pair is glued: when one
    vertex meets several vertices of the other graph, a fresh copy of its
    graph is glued at each of them; one-to-one and many-to-many pairings
    identify the vertices directly.
    """
    pairs = admissible_pairs(g1, g2, pi)
    if not pairs:
        return disjoint_union(g1, g2)[0]
    if full_subgraph_leq(g1, g2):
        return g2
    if full_subgraph_leq(g2, g1):
        return g1

    left_degree = Counter(p for p, _ in pairs)
    right_degree = Counter(q for _, q in pairs)
    if max(right_degree.values()) > 1 and max(left_degree.values()) == 1:
        return _replicate(g1, g2, pairs)
    if max(left_degree.values()) > 1 and max(right_degree.values()) == 1:
        return _replicate(g2, g1, [(q, p) for p, q in pairs])

    union, renamed = disjoint_union(g1, g2)
    return identify(union, [(p, renamed[q]) for p, q in pairs])


def generators_related(g: GeneratorSpec, h: GeneratorSpec, pi: AdmissibilityTable) -> bool:
    """
    Some pi between g and h is nonzero. Powers of one finite shift
    always are, since their initial projections coincide.
    """
    if (g.kind == h.kind == GeneratorKind.FINITE_SHIFT
            and g.chain_base == h.chain_base):
        return True
    return pi.related(g.id, h.id)


def absorbed_generators(family: Sequence[GeneratorSpec], pi: AdmissibilityTable,
                        depth: int) -> List[str]:
    """
    Generators whose corresponding graph is a full subgraph of another,
    pi-related generator's graph. Among equal graphs the later id is absorbed.
    """
    graphs = {g.id: corresponding_graph(g, depth) for g in family}
    absorbed = []
    for g in family:
        for h in family:
            if g.id == h.id or not generators_related(g, h, pi):
                continue
            if full_subgraph_leq(graphs[g.id], graphs[h.id]):
                tie = full_subgraph_leq(graphs[h.id], graphs[g.id])
                if not tie or h.id < g.id:
                    absorbed.append(g.id)
                    break
    return absorbed


def g_graph(family: Sequence[GeneratorSpec], pi: AdmissibilityTable,
            depth: int) -> DirectedGraph:
    """
    The G-graph: conditional glued graph of all corresponding graphs,
    folded in input order after absorbed generators are removed.
    """
    absorbed = set(absorbed_generators(family, pi, depth))
    graphs = [corresponding_graph(g, depth) for g in family if g.id not in absorbed]
    if not graphs:
        return DirectedGraph()
    result = graphs[0]
    for graph in graphs[1:]:
        result = conditional_glue(result, graph, pi)
    logger.info(f"G-graph at depth {depth}: {len(result.vertices)} vertices, "
                f"{len(result.edges)} edges")
    return result


def to_dot(graph: DirectedGraph, include_shadow: bool = False, name: str = "G") -> str:
    """DOT source: circles labelled by projection tokens, edges by generator"""
    export = nx.MultiDiGraph(name=name)
    for v in graph.vertices:
        export.add_node(v.id, shape="circle", label=v.label_text)
    for e in graph.edges:
        export.add_edge(e.source, e.target, key=e.id, label=e.label)
        if include_shadow:
            export.add_edge(e.target, e.source, key=f"{e.id}^-1",
                            label=f"{e.label}^-1", style="dashed")
    return nx.nx_pydot.to_pydot(export).to_string()
