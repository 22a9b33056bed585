"""
Graph groupoid: reduced words over the shadowed graph
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from config import settings
from exceptions import GroupoidError

from .graph import DirectedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class SignedEdge:
    """An edge e of the graph or its shadow e^-1"""
    edge_id: str
    inverse: bool = False

    def flip(self) -> "SignedEdge":
        return SignedEdge(self.edge_id, not self.inverse)

    def __str__(self) -> str:
        return f"{self.edge_id}^-1" if self.inverse else self.edge_id


@dataclass(frozen=True)
class Zero:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class VertexElement:
    vertex_id: str

    def __str__(self) -> str:
        return f"[{self.vertex_id}]"


@dataclass(frozen=True)
class Path:
    """A nonempty reduced admissible word of signed edges"""
    letters: Tuple[SignedEdge, ...]

    def __post_init__(self):
        if not self.letters:
            raise GroupoidError("a path needs at least one edge")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(str(letter) for letter in self.letters)


GroupoidElement = Union[Zero, VertexElement, Path]
ZERO = Zero()


def element_length(a: GroupoidElement) -> int:
    return len(a) if isinstance(a, Path) else 0


def element_to_json(a: GroupoidElement) -> Dict:
    if isinstance(a, Zero):
        return {"type": "Zero"}
    if isinstance(a, VertexElement):
        return {"type": "Vertex", "vertex": a.vertex_id}
    return {"type": "Path", "letters": [str(letter) for letter in a.letters]}


class ShadowedGraph:
    """
    A directed graph together with the shadow edge e^-1 of every edge e,
    running from the target of e back to its source.
    """

    def __init__(self, graph: DirectedGraph):
        self.graph = graph
        self.letters: List[SignedEdge] = [
            SignedEdge(e.id, inverse) for e in graph.edges for inverse in (False, True)
        ]

    def letter_source(self, letter: SignedEdge) -> str:
        if not self.graph.has_edge(letter.edge_id):
            raise GroupoidError(f"unknown edge '{letter.edge_id}'")
        edge = self.graph.edge(letter.edge_id)
        return edge.target if letter.inverse else edge.source

    def letter_target(self, letter: SignedEdge) -> str:
        return self.letter_source(letter.flip())

    def letters_from(self, vertex_id: str) -> List[SignedEdge]:
        return [letter for letter in self.letters if self.letter_source(letter) == vertex_id]

    def check(self, a: GroupoidElement) -> None:
        """Raise GroupoidError unless `a` is a valid reduced element over this graph"""
        if isinstance(a, Zero):
            return
        if isinstance(a, VertexElement):
            if not self.graph.has_vertex(a.vertex_id):
                raise GroupoidError(f"unknown vertex '{a.vertex_id}'")
            return
        for left, right in zip(a.letters, a.letters[1:]):
            if self.letter_target(left) != self.letter_source(right):
                raise GroupoidError(f"{left} and {right} are not admissible")
            if left == right.flip():
                raise GroupoidError(f"word {a} is not reduced")
        self.letter_source(a.letters[-1])


def source(g: ShadowedGraph, a: GroupoidElement) -> Optional[str]:
    """Initial vertex of `a`, None for Zero"""
    if isinstance(a, Zero):
        return None
    if isinstance(a, VertexElement):
        return a.vertex_id
    return g.letter_source(a.letters[0])


def target(g: ShadowedGraph, a: GroupoidElement) -> Optional[str]:
    if isinstance(a, Zero):
        return None
    if isinstance(a, VertexElement):
        return a.vertex_id
    return g.letter_target(a.letters[-1])


def _from_reduced(letters: Sequence[SignedEdge], anchor: str) -> GroupoidElement:
    return Path(tuple(letters)) if letters else VertexElement(anchor)


def multiply(g: ShadowedGraph, a: GroupoidElement, b: GroupoidElement) -> GroupoidElement:
    """
    Admissible concatenation a.b followed by cancellation of every
    adjacent ee^-1 or e^-1e; Zero when target(a) != source(b)
    """
    g.check(a)
    g.check(b)
    if isinstance(a, Zero) or isinstance(b, Zero):
        return ZERO
    if target(g, a) != source(g, b):
        return ZERO

    anchor = source(g, a)
    stack = list(a.letters) if isinstance(a, Path) else []
    for letter in (b.letters if isinstance(b, Path) else ()):
        if stack and stack[-1] == letter.flip():
            stack.pop()
        else:
            stack.append(letter)
    return _from_reduced(stack, anchor)


def inverse(a: GroupoidElement) -> GroupoidElement:
    if isinstance(a, Zero):
        raise GroupoidError("zero has no groupoid inverse")
    if isinstance(a, VertexElement):
        return a
    return Path(tuple(letter.flip() for letter in reversed(a.letters)))


def reduce_word(g: ShadowedGraph, letters: Sequence[SignedEdge],
                rng: Optional[random.Random] = None) -> GroupoidElement:
    """
    Normal form of a raw word, cancelling one eligible adjacent inverse
    pair at a time. With `rng` the pair is picked at random, which
    exercises confluence; without it the leftmost pair goes first.

    Returns:
        Zero when the raw word is not admissible, otherwise the reduced element
    """
    if not letters:
        raise GroupoidError("empty word has no normal form")
    word = list(letters)
    for left, right in zip(word, word[1:]):
        if g.letter_target(left) != g.letter_source(right):
            return ZERO
    g.letter_source(word[-1])
    anchor = g.letter_source(word[0])

    while True:
        eligible = [i for i in range(len(word) - 1) if word[i] == word[i + 1].flip()]
        if not eligible:
            break
        i = rng.choice(eligible) if rng is not None else eligible[0]
        del word[i:i + 2]
    return _from_reduced(word, anchor)


def enumerate_elements(g: ShadowedGraph, max_len: int,
                       cap: Optional[int] = None) -> Set[GroupoidElement]:
    """
    Zero, every vertex and every reduced path of length <= max_len,
    built breadth-first by length.

    Args:
        g: shadowed graph
        max_len: bound on the reduced path length
        cap: element limit, settings.MAX_GROUPOID_ELEMENTS by default

    Returns:
        The set of enumerated elements
    """
    if max_len < 1:
        raise GroupoidError(f"max_len must be positive, got {max_len}")
    cap = settings.MAX_GROUPOID_ELEMENTS if cap is None else cap

    elements: Set[GroupoidElement] = {ZERO}
    elements.update(VertexElement(vid) for vid in g.graph.vertex_ids)

    layer: List[Tuple[SignedEdge, ...]] = [(letter,) for letter in g.letters]
    for length in range(1, max_len + 1):
        elements.update(Path(word) for word in layer)
        if len(elements) > cap:
            raise GroupoidError(f"groupoid enumeration exceeds {cap} elements at length {length}")
        if length == max_len:
            break
        layer = [
            word + (letter,)
            for word in layer
            for letter in g.letters_from(g.letter_target(word[-1]))
            if letter != word[-1].flip()
        ]
        if not layer:
            break

    logger.info(f"Enumerated {len(elements)} groupoid elements up to length {max_len}")
    return elements


def counts_by_length(elements: Iterable[GroupoidElement]) -> Dict[int, int]:
    """Number of elements per reduced length; Zero and vertices count at 0"""
    counts = Counter(element_length(a) for a in elements)
    return dict(sorted(counts.items()))


def sort_key(a: GroupoidElement) -> Tuple[int, int, Tuple]:
    if isinstance(a, Zero):
        return (0, 0, ())
    if isinstance(a, VertexElement):
        return (1, 0, (a.vertex_id,))
    return (2, len(a), tuple((letter.edge_id, letter.inverse) for letter in a.letters))
