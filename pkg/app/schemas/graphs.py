"""
Graph file records and census rows
"""
from typing import List, Optional

from pydantic import BaseModel, Field

from app.errors import GraphValidationError
from app.utils.graph import Graph


class GraphRecord(BaseModel):
    """Graph file format: {"n", "edges", "legs", "leg_labels"} plus an optional canonical key"""
    model_config = {"str_strip_whitespace": True}

    n: int = Field(ge=1, description="Number of internal vertices")
    edges: List[List[int]] = Field(default_factory=list, description="Internal edges as vertex pairs")
    legs: List[int] = Field(default_factory=list, description="Vertex carrying each leg")
    leg_labels: Optional[List[str]] = Field(default=None, description="Distinct label per leg")
    key: Optional[str] = Field(default=None, description="Canonical key")

    def to_graph(self) -> Graph:
        """Build the domain graph; raises a validation error naming the offending edge"""
        for index, pair in enumerate(self.edges):
            if len(pair) != 2:
                raise GraphValidationError(f"Edge {index} must have exactly two endpoints, got {pair}", index)
        return Graph(
            n_vertices=self.n,
            edges=tuple((u, v) for u, v in self.edges),
            legs=tuple(self.legs),
            leg_labels=tuple(self.leg_labels) if self.leg_labels is not None else None,
        )

    @classmethod
    def from_graph(cls, graph: Graph, key: Optional[str] = None) -> "GraphRecord":
        return cls(
            n=graph.n_vertices,
            edges=[list(edge) for edge in graph.edges],
            legs=list(graph.legs),
            leg_labels=list(graph.leg_labels) if graph.leg_labels is not None else None,
            key=key,
        )


class CensusRow(BaseModel):
    """Per-graph sizes and admissible-marking counts"""
    key: str
    n_edges: int
    n_cycles: int
    edge_markings: int
    cycle_markings: int
    vertex_markings: int
    mixed_markings: int
