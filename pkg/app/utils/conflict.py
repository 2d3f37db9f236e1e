"""
Conflict systems: ordered markable elements with a symmetric conflict relation
"""
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict

from app.checks import CYCLE, EDGE, MIXED, VERTEX
from app.errors import SystemMismatchError
from app.utils.graph import Graph, enumerate_cycles


class Element(BaseModel):
    """A markable object: its label, sector, payload (edge ids / vertex id) and vertex support"""
    model_config = ConfigDict(frozen=True)

    label: str
    sector: str
    payload: Tuple[int, ...] = ()
    support: Tuple[int, ...] = ()


class ConflictSystem:
    """
    Totally ordered elements (by position) with a symmetric, irreflexive
    conflict relation. Element ids are positions 0..k-1.
    """

    def __init__(self, elements: Sequence[Element], conflicts: Iterable[Tuple[int, int]], name: str = ""):
        self.elements: Tuple[Element, ...] = tuple(elements)
        self.name = name
        neighbours: List[set] = [set() for _ in self.elements]
        for a, b in conflicts:
            if a == b:
                raise ValueError(f"Element {a} cannot conflict with itself")
            if not (0 <= a < len(self.elements) and 0 <= b < len(self.elements)):
                raise ValueError(f"Conflict ({a}, {b}) refers to an unknown element")
            neighbours[a].add(b)
            neighbours[b].add(a)
        self.neighbours: Tuple[FrozenSet[int], ...] = tuple(frozenset(s) for s in neighbours)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"ConflictSystem(name='{self.name}', elements={len(self)}, conflicts={len(self.conflict_pairs)})"

    def conflicts(self, a: int, b: int) -> bool:
        return b in self.neighbours[a]

    @cached_property
    def conflict_pairs(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(sorted((a, b) for a in range(len(self)) for b in self.neighbours[a] if a < b))

    @cached_property
    def sectors(self) -> Tuple[str, ...]:
        return tuple(element.sector for element in self.elements)

    def members(self, sector: Optional[str] = None) -> Tuple[int, ...]:
        """Positions of the elements of a sector (all elements when sector is None)"""
        if sector is None:
            return tuple(range(len(self)))
        return tuple(index for index, s in enumerate(self.sectors) if s == sector)

    @property
    def key(self) -> str:
        """Identity string used when serialising chains"""
        if self.name:
            return self.name
        labels = ",".join(element.label for element in self.elements)
        pairs = ",".join(f"{a}-{b}" for a, b in self.conflict_pairs)
        return f"[{labels}]|{pairs}"

    def is_independent(self, subset: Iterable[int]) -> bool:
        chosen = list(subset)
        return all(not (self.neighbours[a] & set(chosen)) for a in chosen)

    def reordered(self, permutation: Sequence[int]) -> "ConflictSystem":
        """
        System whose position k holds the element previously at permutation[k];
        conflicts follow their elements.
        """
        if sorted(permutation) != list(range(len(self))):
            raise ValueError("Reordering must be a permutation of the element positions")
        new_position = {old: new for new, old in enumerate(permutation)}
        elements = [self.elements[old] for old in permutation]
        pairs = [(new_position[a], new_position[b]) for a, b in self.conflict_pairs]
        return ConflictSystem(elements, pairs, name=f"{self.name}~{','.join(map(str, permutation))}" if self.name else "")

    def to_networkx(self) -> nx.Graph:
        """The conflict graph: one node per element, one edge per conflict"""
        graph = nx.Graph()
        for index, element in enumerate(self.elements):
            graph.add_node(index, label=element.label, sector=element.sector)
        graph.add_edges_from(self.conflict_pairs)
        return graph

    @cached_property
    def all_independent_sets(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(independent_sets(self))


def _shared_vertex_system(elements: List[Element], name: str) -> ConflictSystem:
    pairs = [
        (a, b)
        for a in range(len(elements))
        for b in range(a + 1, len(elements))
        if set(elements[a].support) & set(elements[b].support)
    ]
    return ConflictSystem(elements, pairs, name=name)


def _edge_elements(g: Graph) -> List[Element]:
    return [
        Element(label=f"e{index}", sector=EDGE, payload=(index,), support=(u, v))
        for index, (u, v) in enumerate(g.edges)
    ]


def _cycle_elements(g: Graph) -> List[Element]:
    return [
        Element(label=f"c{index}", sector=CYCLE, payload=cycle.edge_ids, support=cycle.vertex_ids)
        for index, cycle in enumerate(enumerate_cycles(g))
    ]


def edge_conflict_system(g: Graph, name: str = "") -> ConflictSystem:
    """One element per internal edge in edge order; edges sharing a vertex conflict"""
    return _shared_vertex_system(_edge_elements(g), name)


def cycle_conflict_system(g: Graph, name: str = "") -> ConflictSystem:
    """One element per cycle in enumeration order; cycles sharing a vertex conflict"""
    return _shared_vertex_system(_cycle_elements(g), name)


def mixed_conflict_system(g: Graph, name: str = "") -> ConflictSystem:
    """All edges followed by all cycles; any two objects sharing a vertex conflict"""
    return _shared_vertex_system(_edge_elements(g) + _cycle_elements(g), name)


def vertex_conflict_system(g: Graph, name: str = "") -> ConflictSystem:
    """One element per internal vertex; adjacent vertices conflict"""
    elements = [
        Element(label=f"v{v}", sector=VERTEX, payload=(v,), support=(v,))
        for v in range(g.n_vertices)
    ]
    pairs = sorted(g.multiplicities())
    return ConflictSystem(elements, pairs, name=name)


def sector_system(g: Graph, sector: str, name: str = "") -> ConflictSystem:
    """Conflict system of g for one of the sectors edge, cycle, vertex, mixed"""
    builders = {
        EDGE: edge_conflict_system,
        CYCLE: cycle_conflict_system,
        VERTEX: vertex_conflict_system,
        MIXED: mixed_conflict_system,
    }
    if sector not in builders:
        raise ValueError(f"Unknown sector '{sector}'")
    return builders[sector](g, name=name)


def vertex_system_of(cs: ConflictSystem, name: str = "") -> ConflictSystem:
    """
    Vertex-marking system of the conflict graph of cs: one vertex per element,
    order induced from cs, adjacency = conflict.
    """
    elements = [
        Element(label=f"v{index}", sector=VERTEX, payload=(index,), support=(index,))
        for index in range(len(cs))
    ]
    return ConflictSystem(elements, cs.conflict_pairs, name=name)


def system_from_pairs(size: int, pairs: Iterable[Tuple[int, int]], sector: str = VERTEX, name: str = "") -> ConflictSystem:
    """Abstract system on `size` elements of one sector with the given conflicts"""
    prefix = sector[0]
    elements = [
        Element(label=f"{prefix}{index}", sector=sector, payload=(index,), support=(index,))
        for index in range(size)
    ]
    return ConflictSystem(elements, pairs, name=name)


def check_same_shape(first: ConflictSystem, second: ConflictSystem) -> None:
    """Raise unless both systems have equal size and identical conflicts position by position"""
    if len(first) != len(second):
        raise SystemMismatchError(f"Systems have {len(first)} and {len(second)} elements")
    if first.conflict_pairs != second.conflict_pairs:
        raise SystemMismatchError("Conflict relations differ under the order-preserving correspondence")


def independent_sets(cs: ConflictSystem, max_size: Optional[int] = None) -> List[Tuple[int, ...]]:
    """
    All conflict-free subsets of at most max_size elements (unbounded when
    None), the empty set included, ordered by size then lexicographically.
    """
    found: List[Tuple[int, ...]] = []
    limit = len(cs) if max_size is None else max_size

    def extend(start: int, chosen: List[int], blocked: FrozenSet[int]) -> None:
        found.append(tuple(chosen))
        if len(chosen) >= limit:
            return
        for index in range(start, len(cs)):
            if index in blocked:
                continue
            chosen.append(index)
            extend(index + 1, chosen, blocked | cs.neighbours[index])
            chosen.pop()

    extend(0, [], frozenset())
    found.sort(key=lambda subset: (len(subset), subset))
    return found


def independence_polynomial(cs: ConflictSystem) -> Dict[int, int]:
    """Number of independent sets per size"""
    counts: Dict[int, int] = {}
    for subset in cs.all_independent_sets:
        counts[len(subset)] = counts.get(len(subset), 0) + 1
    return counts


def marking_count(cs: ConflictSystem) -> int:
    """Admissible {0,1,2}-markings: sum over independent sets I of 2^|I|"""
    return sum(2 ** len(subset) for subset in cs.all_independent_sets)


def conflict_graph(cs: ConflictSystem) -> nx.Graph:
    """Gamma' of the system: elements as vertices, conflicts as edges"""
    return cs.to_networkx()
