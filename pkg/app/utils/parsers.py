"""
Graph file parsing: a single graph record or a list of records
"""
import json
from pathlib import Path
from typing import List, Union

from pydantic import TypeAdapter, ValidationError

from app.errors import GraphValidationError
from app.schemas.graphs import GraphRecord
from app.utils.graph import Graph

__all__ = ["GraphFileError", "parse_graph_records", "parse_graphs", "read_graph_file"]

_records = TypeAdapter(Union[List[GraphRecord], GraphRecord])


class GraphFileError(ValueError):
    """Graph file cannot be decoded; the message lists every diagnostic"""


def parse_graph_records(text: str) -> List[GraphRecord]:
    """Decode {"n", "edges", "legs", "leg_labels"} or a JSON list of such objects"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFileError(f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        parsed = _records.validate_python(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or 'record'}: {error['msg']}" for error in e.errors()
        )
        raise GraphFileError(f"Invalid graph record: {problems}") from e
    return parsed if isinstance(parsed, list) else [parsed]


def parse_graphs(text: str) -> List[Graph]:
    """Decoded and structurally validated graphs, in file order"""
    graphs = []
    for position, record in enumerate(parse_graph_records(text)):
        try:
            graphs.append(record.to_graph())
        except (GraphValidationError, ValidationError) as e:
            raise GraphFileError(f"Graph {position}: {e}") from e
    return graphs


def read_graph_file(path: Union[str, Path]) -> List[Graph]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_graphs(f.read())
