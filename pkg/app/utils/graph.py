"""
Multigraphs with legs, their classification and their cycles
"""
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.errors import GraphValidationError


def default_leg_labels(r: int) -> Tuple[str, ...]:
    """Labels of r legs without explicit labels: their positions as strings"""
    return tuple(str(index) for index in range(r))


class Graph(BaseModel):
    """
    Connected multigraph on internal vertices 0..n-1.

    Edges are an ordered multiset of vertex pairs (parallel edges allowed,
    self-loops rejected); the edge order is the element order of the
    edge-marking complex. Legs are external half-edges attached to internal
    vertices and do not count for connectivity.
    """
    model_config = ConfigDict(frozen=True)

    n_vertices: int = Field(ge=1, description="Number of internal vertices")
    edges: Tuple[Tuple[int, int], ...] = Field(default=(), description="Ordered internal edges")
    legs: Tuple[int, ...] = Field(default=(), description="Vertex carrying each leg")
    leg_labels: Optional[Tuple[str, ...]] = Field(default=None, description="Distinct label per leg")

    @model_validator(mode="after")
    def _validate_structure(self) -> "Graph":
        n = self.n_vertices
        for index, (u, v) in enumerate(self.edges):
            if not (0 <= u < n and 0 <= v < n):
                raise GraphValidationError(
                    f"Edge {index} ({u}, {v}) has an endpoint outside 0..{n - 1}", index
                )
            if u == v:
                raise GraphValidationError(f"Edge {index} ({u}, {v}) is a self-loop", index)
        for index, v in enumerate(self.legs):
            if not 0 <= v < n:
                raise GraphValidationError(f"Leg {index} is attached to unknown vertex {v}")
        if self.leg_labels is not None:
            if len(self.leg_labels) != len(self.legs):
                raise GraphValidationError(
                    f"Expected {len(self.legs)} leg labels, got {len(self.leg_labels)}"
                )
            if len(set(self.leg_labels)) != len(self.leg_labels):
                raise GraphValidationError("Leg labels must be distinct")
        if n > 1 and not nx.is_connected(self.to_networkx()):
            raise GraphValidationError(f"Graph on {n} vertices is not connected")
        return self

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    def labels(self) -> Tuple[str, ...]:
        """Leg labels, defaulting to the leg positions"""
        if self.leg_labels is not None:
            return self.leg_labels
        return default_leg_labels(len(self.legs))

    def incidence(self) -> List[List[Tuple[int, int]]]:
        """Per vertex, the (edge index, other endpoint) pairs in edge order"""
        incident: List[List[Tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for index, (u, v) in enumerate(self.edges):
            incident[u].append((index, v))
            incident[v].append((index, u))
        return incident

    def multiplicities(self) -> Dict[Tuple[int, int], int]:
        """Edge multiplicity per unordered vertex pair (u < v)"""
        counts: Dict[Tuple[int, int], int] = {}
        for u, v in self.edges:
            pair = (min(u, v), max(u, v))
            counts[pair] = counts.get(pair, 0) + 1
        return counts

    def valence(self, v: int) -> int:
        """Internal edge ends plus legs at v"""
        return sum(1 for a, b in self.edges for w in (a, b) if w == v) + self.legs.count(v)

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.n_vertices))
        for index, (u, v) in enumerate(self.edges):
            graph.add_edge(u, v, key=index)
        for v in range(self.n_vertices):
            graph.nodes[v]["legs"] = self.legs.count(v)
        return graph

    def relabeled(self, permutation: Sequence[int]) -> "Graph":
        """Graph with vertex v renamed to permutation[v]; edge and leg order kept"""
        return Graph(
            n_vertices=self.n_vertices,
            edges=tuple((permutation[u], permutation[v]) for u, v in self.edges),
            legs=tuple(permutation[v] for v in self.legs),
            leg_labels=self.leg_labels,
        )

    def __str__(self) -> str:
        return f"Graph(n={self.n_vertices}, edges={list(self.edges)}, legs={list(self.legs)})"


class GraphClass(BaseModel):
    """Leg count, first Betti number and 3-regularity of a graph"""
    model_config = ConfigDict(frozen=True)

    r: int
    l: int
    regular3: bool


class Cycle(BaseModel):
    """A cycle given by its edge indices and the vertices it visits"""
    model_config = ConfigDict(frozen=True)

    edge_ids: Tuple[int, ...]
    vertex_ids: Tuple[int, ...]


def classify(g: Graph) -> GraphClass:
    """Classify g; never fails on non-3-regular input"""
    regular3 = all(g.valence(v) == 3 for v in range(g.n_vertices))
    return GraphClass(r=g.n_legs, l=g.n_edges - g.n_vertices + 1, regular3=regular3)


def is_cycle(g: Graph, edge_ids: Sequence[int]) -> bool:
    """Every vertex meets 0 or 2 of the edges and the edges form a connected subgraph"""
    if len(edge_ids) < 2 or len(set(edge_ids)) != len(edge_ids):
        return False
    touched: Dict[int, int] = {}
    sub = nx.MultiGraph()
    for index in edge_ids:
        u, v = g.edges[index]
        touched[u] = touched.get(u, 0) + 1
        touched[v] = touched.get(v, 0) + 1
        sub.add_edge(u, v)
    return all(count == 2 for count in touched.values()) and nx.is_connected(sub)


def enumerate_cycles(g: Graph) -> List[Cycle]:
    """
    All cycles of g, each exactly once, ordered lexicographically by their
    sorted edge-id tuples.

    A cycle is found from its smallest vertex by a path search through larger
    vertices; both traversal directions collapse onto the same edge set.
    """
    incident = g.incidence()
    found: set = set()

    def extend(start: int, v: int, path_edges: List[int], visited: set) -> None:
        for edge_id, w in incident[v]:
            if edge_id in path_edges:
                continue
            if w == start:
                found.add(tuple(sorted(path_edges + [edge_id])))
            elif w > start and w not in visited:
                visited.add(w)
                path_edges.append(edge_id)
                extend(start, w, path_edges, visited)
                path_edges.pop()
                visited.discard(w)

    for start in range(g.n_vertices):
        extend(start, start, [], {start})

    cycles = []
    for edge_ids in sorted(found):
        vertices = sorted({w for index in edge_ids for w in g.edges[index]})
        cycles.append(Cycle(edge_ids=edge_ids, vertex_ids=tuple(vertices)))
    return cycles
