"""
Generation of Gra_{r,l}: connected multigraphs with r legs, first Betti
number l, all internal vertices trivalent and no self-loops.
"""
import itertools
import logging
from collections import Counter
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, TypeVar

import networkx as nx
from networkx.algorithms import isomorphism
from pydantic import BaseModel, ConfigDict, Field

from app.config import settings
from app.errors import ResourceLimitError
from app.schemas.graphs import CensusRow
from app.utils.canonical import canonical_form
from app.utils.conflict import (
    cycle_conflict_system,
    edge_conflict_system,
    marking_count,
    mixed_conflict_system,
    vertex_conflict_system,
)
from app.utils.graph import Graph, default_leg_labels

logger = logging.getLogger(__name__)


class FamilySpec(BaseModel):
    """Leg count, loop order and leg labeling mode of a graph family"""
    model_config = ConfigDict(frozen=True)

    r: int = Field(ge=0, description="Number of legs")
    l: int = Field(ge=0, description="Loop order (first Betti number)")
    legs_labeled: bool = Field(default=True, description="Isomorphisms must preserve leg labels")

    @property
    def n_vertices(self) -> int:
        """Forced internal vertex count r + 2(l-1)"""
        return self.r + 2 * (self.l - 1)

    @property
    def n_edges(self) -> int:
        """Forced internal edge count r + 3(l-1)"""
        return self.r + 3 * (self.l - 1)

    @property
    def label(self) -> str:
        mode = "labeled" if self.legs_labeled else "unlabeled"
        return f"Gra({self.r},{self.l},{mode})"


def _fresh_blocks(total: int, slots: int) -> Iterator[Tuple[int, ...]]:
    """Non-increasing multiplicities in 1..3 summing to total, at most `slots` parts"""
    def extend(left: int, cap: int, parts: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        if left == 0:
            yield parts
            return
        if len(parts) == slots:
            return
        for value in range(min(cap, left), 0, -1):
            yield from extend(left - value, value, parts + (value,))

    yield from extend(total, 3, ())


def _grow(n: int, r: int) -> Iterator[Tuple[Dict[Tuple[int, int], int], List[int]]]:
    """
    Vertex-growth generation in breadth-first labeling: row i fixes the legs of
    vertex i and its edges to later vertices. Vertices first reached from row i
    take the next fresh labels, with non-increasing multiplicities, so every
    connected graph appears under at least one of its breadth-first labelings.
    """
    capacity = [3] * n
    legs = [0] * n
    multiplicity: Dict[Tuple[int, int], int] = {}

    def row(i: int, fresh: int, legs_left: int) -> Iterator[Tuple[Dict[Tuple[int, int], int], List[int]]]:
        if i == n:
            if legs_left == 0:
                yield dict(multiplicity), list(legs)
            return
        if i >= fresh:
            return
        for c in range(min(capacity[i], legs_left), -1, -1):
            left = capacity[i] - c
            old = [j for j in range(i + 1, fresh) if capacity[j] > 0]
            for old_mults in itertools.product(*(range(min(capacity[j], left) + 1) for j in old)):
                used = sum(old_mults)
                if used > left:
                    continue
                for block in _fresh_blocks(left - used, n - fresh):
                    targets = [(j, m) for j, m in zip(old, old_mults) if m] + [
                        (fresh + offset, m) for offset, m in enumerate(block)
                    ]
                    saved = capacity[i]
                    legs[i] = c
                    capacity[i] = 0
                    for j, m in targets:
                        capacity[j] -= m
                        multiplicity[(i, j)] = m
                    yield from row(i + 1, fresh + len(block), legs_left - c)
                    for j, m in targets:
                        capacity[j] += m
                        del multiplicity[(i, j)]
                    capacity[i] = saved
                    legs[i] = 0

    yield from row(0, 1, r)


def _as_graph(n: int, multiplicity: Dict[Tuple[int, int], int], legs: List[int]) -> Graph:
    edges = tuple(pair for pair in sorted(multiplicity) for _ in range(multiplicity[pair]))
    leg_vertices = tuple(v for v in range(n) for _ in range(legs[v]))
    return Graph(n_vertices=n, edges=edges, legs=leg_vertices)


def _label_assignments(g: Graph, labels: Tuple[str, ...]) -> Iterator[Graph]:
    """Every distribution of the labels over the legs, legs at one vertex unordered"""
    groups = [(v, g.legs.count(v)) for v in sorted(set(g.legs))]

    def assign(position: int, remaining: Tuple[str, ...], legs: Tuple[int, ...], chosen: Tuple[str, ...]) -> Iterator[Graph]:
        if position == len(groups):
            yield Graph(n_vertices=g.n_vertices, edges=g.edges, legs=legs, leg_labels=chosen)
            return
        v, size = groups[position]
        for subset in itertools.combinations(remaining, size):
            rest = tuple(label for label in remaining if label not in subset)
            yield from assign(position + 1, rest, legs + (v,) * size, chosen + subset)

    yield from assign(0, labels, (), ())


def _check_bound(spec: FamilySpec, max_vertices: Optional[int]) -> None:
    bound = max_vertices if max_vertices is not None else settings.max_vertices
    if spec.n_vertices > bound:
        raise ResourceLimitError(
            f"{spec.label} forces {spec.n_vertices} internal vertices, above the configured bound of {bound}"
        )


class GraphEnumerator:
    """Generates and caches canonical representatives of graph families"""

    def __init__(self):
        self._cache: Dict[FamilySpec, Dict[str, Graph]] = {}

    def enumerate_keyed(self, spec: FamilySpec, max_vertices: Optional[int] = None) -> Dict[str, Graph]:
        """Canonical key -> representative, sorted by key"""
        _check_bound(spec, max_vertices)
        if spec in self._cache:
            return self._cache[spec]

        n = spec.n_vertices
        unlabeled: Dict[str, Graph] = {}
        if n >= 1 and spec.n_edges >= 0:
            for multiplicity, legs in _grow(n, spec.r):
                graph = _as_graph(n, multiplicity, legs)
                representative, key = canonical_form(graph, legs_labeled=False)
                unlabeled.setdefault(key, representative)

        if spec.legs_labeled:
            found: Dict[str, Graph] = {}
            for graph in unlabeled.values():
                for labeled in _label_assignments(graph, default_leg_labels(spec.r)):
                    representative, key = canonical_form(labeled, legs_labeled=True)
                    found.setdefault(key, representative)
        else:
            found = unlabeled

        result = {key: found[key] for key in sorted(found)}
        self._cache[spec] = result
        logger.info(f"📋 Enumerated {len(result)} graph(s) in {spec.label}")
        return result

    def enumerate_graphs(self, spec: FamilySpec, max_vertices: Optional[int] = None) -> List[Graph]:
        """Complete, duplicate-free canonical representatives ordered by canonical key"""
        return list(self.enumerate_keyed(spec, max_vertices).values())

    def clear(self) -> None:
        self._cache.clear()


Edges = Tuple[Tuple[int, int], ...]
Payload = TypeVar("Payload")


def _naive_multigraphs(n: int, n_edges: int, r: int) -> Iterator[Edges]:
    """
    Edge multisets in vertex-pair order with every degree at most 3 and r
    leg slots left over, restricted to breadth-first vertex orders: once the
    pairs (a, *) are decided the reached vertices are exactly 0..m with m > a,
    vertices first reached from a come in non-increasing multiplicity, and
    vertex 0 carries the most legs.
    """
    degree = [0] * n
    chosen: List[Tuple[int, int]] = []

    def attach(a: int, b: int, m: int) -> None:
        degree[a] += m
        degree[b] += m
        chosen.extend([(a, b)] * m)

    def detach(a: int, b: int, m: int) -> None:
        degree[a] -= m
        degree[b] -= m
        del chosen[len(chosen) - m:]

    def close_row(a: int, reached: int, legs_used: int) -> Iterator[Edges]:
        legs_a = 3 - degree[a]
        legs_used += legs_a
        if legs_used > r or legs_a > 3 - degree[0]:
            return
        if a + 1 == n:
            if len(chosen) == n_edges and legs_used == r:
                yield tuple(chosen)
            return
        if reached <= a + 1:
            return
        yield from extend(a + 1, a + 2, reached, 3, legs_used)

    def extend(a: int, b: int, reached: int, fresh_cap: int, legs_used: int) -> Iterator[Edges]:
        if len(chosen) > n_edges:
            return
        if b == n:
            yield from close_row(a, reached, legs_used)
            return
        room = 3 - degree[a]
        if b < reached:
            for m in range(min(room, 3 - degree[b]), -1, -1):
                attach(a, b, m)
                yield from extend(a, b + 1, reached, fresh_cap, legs_used)
                detach(a, b, m)
            return
        # b is the next unreached vertex
        for m in range(min(room, fresh_cap), 0, -1):
            attach(a, b, m)
            yield from extend(a, b + 1, reached + 1, m, legs_used)
            detach(a, b, m)
        yield from close_row(a, reached, legs_used)

    yield from extend(0, 1, 1, 3, 0)


def _view(n: int, edges: Sequence[Tuple[int, int]], legs: Sequence[int], labels: Optional[Sequence[str]]) -> nx.Graph:
    """Simple graph with edge multiplicities and attached legs as attributes"""
    view = nx.Graph()
    for v in range(n):
        if labels is None:
            attached = str(sum(1 for w in legs if w == v))
        else:
            attached = repr(sorted(labels[index] for index, w in enumerate(legs) if w == v))
        view.add_node(v, legs=attached)
    for (u, v), mult in Counter((min(u, v), max(u, v)) for u, v in edges).items():
        view.add_edge(u, v, mult=mult)
    return view


def _dedupe_by_isomorphism(candidates: Iterable[Tuple[nx.Graph, Payload]]) -> List[Payload]:
    """First payload of every isomorphism class; Weisfeiler-Lehman hashes bucket the views"""
    node_match = isomorphism.categorical_node_match("legs", None)
    edge_match = isomorphism.categorical_edge_match("mult", 1)
    buckets: Dict[str, List[nx.Graph]] = {}
    kept: List[Payload] = []
    for view, payload in candidates:
        invariant = nx.weisfeiler_lehman_graph_hash(view, node_attr="legs", edge_attr="mult")
        bucket = buckets.setdefault(invariant, [])
        if any(nx.is_isomorphic(view, other, node_match=node_match, edge_match=edge_match) for other in bucket):
            continue
        bucket.append(view)
        kept.append(payload)
    return kept


def enumerate_graphs_naive(spec: FamilySpec) -> List[Graph]:
    """
    Independent generator: degree-bounded edge multisets in breadth-first
    vertex order, legs forced by the remaining valence, and isomorphism
    rejection with networkx instead of canonical keys.
    """
    n = spec.n_vertices
    if n < 1 or spec.n_edges < 0:
        return []

    def unlabeled_candidates() -> Iterator[Tuple[nx.Graph, Tuple[Edges, Tuple[int, ...]]]]:
        for edges in _naive_multigraphs(n, spec.n_edges, spec.r):
            ends = Counter(v for edge in edges for v in edge)
            legs = tuple(v for v in range(n) for _ in range(3 - ends[v]))
            yield _view(n, edges, legs, None), (edges, legs)

    unlabeled = [
        Graph(n_vertices=n, edges=edges, legs=legs)
        for edges, legs in _dedupe_by_isomorphism(unlabeled_candidates())
    ]
    if not spec.legs_labeled:
        return unlabeled
    labeled = (
        (_view(n, assignment.edges, assignment.legs, assignment.labels()), assignment)
        for graph in unlabeled
        for assignment in _label_assignments(graph, default_leg_labels(spec.r))
    )
    return _dedupe_by_isomorphism(labeled)


def family_census(spec: FamilySpec, max_vertices: Optional[int] = None) -> List[CensusRow]:
    """One row per graph: key, |E|, |C| and admissible-marking counts per sector"""
    rows = []
    for key, graph in graph_enumerator.enumerate_keyed(spec, max_vertices).items():
        cycles = cycle_conflict_system(graph)
        rows.append(CensusRow(
            key=key,
            n_edges=graph.n_edges,
            n_cycles=len(cycles),
            edge_markings=marking_count(edge_conflict_system(graph)),
            cycle_markings=marking_count(cycles),
            vertex_markings=marking_count(vertex_conflict_system(graph)),
            mixed_markings=marking_count(mixed_conflict_system(graph)),
        ))
    return rows


# Global enumerator instance
graph_enumerator = GraphEnumerator()
