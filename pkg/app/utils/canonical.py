"""
Canonical labeling of multigraphs with (optionally labeled) legs.

Colour refinement over vertex invariants (leg count, leg labels, multiplicity
weighted neighbour colours) followed by individualisation of the first
non-singleton cell; every discrete leaf yields a relabeled certificate and the
smallest certificate wins.
"""
from typing import Dict, Iterator, List, Tuple

from app.utils.graph import Graph

Certificate = Tuple[Tuple[Tuple[int, int], ...], Tuple[Tuple[int, str], ...]]


def _refine(colors: List[int], neighbours: List[List[Tuple[int, int]]]) -> List[int]:
    """Refine until the number of colour classes stops growing"""
    n_classes = len(set(colors))
    while True:
        signatures = [
            (colors[v], tuple(sorted((colors[u], mult) for u, mult in neighbours[v])))
            for v in range(len(colors))
        ]
        ranking = {signature: rank for rank, signature in enumerate(sorted(set(signatures)))}
        colors = [ranking[signature] for signature in signatures]
        if len(ranking) == n_classes:
            return colors
        n_classes = len(ranking)


def _individualize(colors: List[int], v: int) -> List[int]:
    return [2 * c if u == v else 2 * c + 1 for u, c in enumerate(colors)]


def _leaves(colors: List[int], neighbours: List[List[Tuple[int, int]]]) -> Iterator[List[int]]:
    colors = _refine(colors, neighbours)
    if len(set(colors)) == len(colors):
        yield colors
        return
    sizes: Dict[int, int] = {}
    for c in colors:
        sizes[c] = sizes.get(c, 0) + 1
    target = min(c for c, size in sizes.items() if size > 1)
    for v, c in enumerate(colors):
        if c == target:
            yield from _leaves(_individualize(colors, v), neighbours)


def _certificate(g: Graph, labels: Tuple[str, ...], order: List[int], legs_labeled: bool) -> Certificate:
    edges = tuple(sorted((min(order[u], order[v]), max(order[u], order[v])) for u, v in g.edges))
    if legs_labeled:
        legs = tuple(sorted((order[v], labels[index]) for index, v in enumerate(g.legs)))
    else:
        legs = tuple(sorted((order[v], "") for v in g.legs))
    return edges, legs


def canonical_key(n_vertices: int, certificate: Certificate, legs_labeled: bool) -> str:
    """Printable key: mode, vertex count, sorted edge multiset, leg multiset"""
    edges, legs = certificate
    edge_part = ",".join(f"{u}-{v}" for u, v in edges)
    if legs_labeled:
        leg_part = ",".join(f"{v}:{label}" for v, label in legs)
    else:
        leg_part = ",".join(str(v) for v, _ in legs)
    mode = "L" if legs_labeled else "U"
    return f"{mode}|n={n_vertices}|e={edge_part}|legs={leg_part}"


def canonical_form(g: Graph, legs_labeled: bool = True) -> Tuple[Graph, str]:
    """
    Canonical representative and key of g.

    Isomorphic graphs (preserving leg labels when legs_labeled) get the same
    key; the representative lists its edges in sorted order. In unlabeled mode
    the representative carries no leg labels.
    """
    labels = g.labels()
    legs_at: List[List[str]] = [[] for _ in range(g.n_vertices)]
    for index, v in enumerate(g.legs):
        legs_at[v].append(labels[index])

    invariants = [
        (len(legs_at[v]), tuple(sorted(legs_at[v])) if legs_labeled else ())
        for v in range(g.n_vertices)
    ]
    ranking = {inv: rank for rank, inv in enumerate(sorted(set(invariants)))}
    colors = [ranking[inv] for inv in invariants]

    neighbours: List[List[Tuple[int, int]]] = [[] for _ in range(g.n_vertices)]
    for (u, v), mult in g.multiplicities().items():
        neighbours[u].append((v, mult))
        neighbours[v].append((u, mult))

    best = None
    for order in _leaves(colors, neighbours):
        certificate = _certificate(g, labels, order, legs_labeled)
        if best is None or certificate < best:
            best = certificate

    edges, legs = best
    representative = Graph(
        n_vertices=g.n_vertices,
        edges=edges,
        legs=tuple(v for v, _ in legs),
        leg_labels=tuple(label for _, label in legs) if legs_labeled else None,
    )
    return representative, canonical_key(g.n_vertices, best, legs_labeled)
