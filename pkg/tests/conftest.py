import pytest
from hypothesis import settings

from app.utils.graph import Graph

# SNF transforms and the sympy oracles vary widely in run time
settings.register_profile("marked-graphs", deadline=None, max_examples=50)
settings.load_profile("marked-graphs")


@pytest.fixture
def bubble() -> Graph:
    """Two vertices joined by two parallel edges, one leg each (the only graph of Gra(2,1))"""
    return Graph(n_vertices=2, edges=((0, 1), (0, 1)), legs=(0, 1))


@pytest.fixture
def dumbbell() -> Graph:
    """Two 2-cycles joined by a bridge; edges e0..e4 with e2 the bridge"""
    return Graph(n_vertices=4, edges=((0, 1), (0, 1), (1, 2), (2, 3), (2, 3)), legs=(0, 3))


@pytest.fixture
def theta() -> Graph:
    """Three parallel edges between two vertices, no legs"""
    return Graph(n_vertices=2, edges=((0, 1), (0, 1), (0, 1)))


@pytest.fixture
def tree() -> Graph:
    """One internal edge, two legs at each end (r=4, l=0)"""
    return Graph(n_vertices=2, edges=((0, 1),), legs=(0, 0, 1, 1))


@pytest.fixture
def triangle() -> Graph:
    """Triangle with one leg per vertex (r=3, l=1)"""
    return Graph(n_vertices=3, edges=((0, 1), (1, 2), (0, 2)), legs=(0, 1, 2))


@pytest.fixture
def vertex_example() -> Graph:
    """A triangle 0-1-2 with two pendant vertices 3 and 4 hanging off vertex 2"""
    return Graph(n_vertices=5, edges=((0, 1), (0, 2), (1, 2), (2, 3), (2, 4)))
