from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from isometries.family import load_family
from isometries.graph import DirectedGraph, Edge, GeneratorKind, GeneratorSpec, Vertex
from isometries.groupoid import ShadowedGraph
from main import app

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def graph_of(vertices, edges) -> DirectedGraph:
    """Plain graph from vertex ids and (id, source, target) triples"""
    return DirectedGraph(
        tuple(Vertex(v) for v in vertices),
        tuple(Edge(e, s, t, e) for e, s, t in edges),
    )


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def load():
    def _load(name: str):
        return load_family(FIXTURES / f"{name}.toml")
    return _load


@pytest.fixture
def client():
    return TestClient(app)


@pytest.fixture
def one_edge() -> ShadowedGraph:
    return ShadowedGraph(graph_of(["a", "b"], [("s", "a", "b")]))


@pytest.fixture
def path_two() -> ShadowedGraph:
    return ShadowedGraph(graph_of(["a", "b", "c"], [("s1", "a", "b"), ("s2", "b", "c")]))


@pytest.fixture
def loop() -> ShadowedGraph:
    return ShadowedGraph(graph_of(["v"], [("u", "v", "v")]))


@pytest.fixture
def unitary():
    return GeneratorSpec("u", GeneratorKind.UNITARY, spectrum="T")


@pytest.fixture
def shift():
    return GeneratorSpec("s", GeneratorKind.INFINITE_SHIFT)
