"""
Report store utility for JSON and CSV file operations
"""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel

from app.config import settings

logger = logging.getLogger(__name__)

Payload = Union[BaseModel, Sequence[BaseModel], Dict[str, Any], List[Any]]


def _plain(payload: Payload) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    if isinstance(payload, (list, tuple)):
        return [_plain(item) for item in payload]
    return payload


def dumps(payload: Payload) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline"""
    return json.dumps(_plain(payload), indent=2, ensure_ascii=False, sort_keys=True) + "\n"


class ReportStore:
    """Writes and reads the JSON reports, chains and graph files of a run"""

    def __init__(self, base_path: Optional[Union[str, Path]] = None):
        """Initialize the store; base_path holds the default output files"""
        self.base_path = Path(base_path) if base_path is not None else settings.output_dir

    def default_path(self, name: str) -> Path:
        return self.base_path / name

    def resolve(self, path: Optional[Union[str, Path]], default_name: str = "report.json") -> Path:
        """Explicit paths are used as given; None falls back to base_path/default_name"""
        return Path(path) if path is not None else self.default_path(default_name)

    def _prepare(self, path: Union[str, Path]) -> Path:
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def save_json(self, path: Union[str, Path], payload: Payload) -> Path:
        """Save a model, a list of models or plain data as JSON"""
        target = self._prepare(path)
        try:
            with open(target, "w", encoding="utf-8") as f:
                f.write(dumps(payload))
        except IOError as e:
            logger.error(f"❌ Error saving {target}: {e}")
            raise
        logger.info(f"📤 Wrote {target}")
        return target

    def load_json(self, path: Union[str, Path]) -> Any:
        """Load JSON data; decoding errors propagate to the caller"""
        target = self.resolve(path)
        with open(target, "r", encoding="utf-8") as f:
            return json.load(f)

    def save_census_csv(self, path: Union[str, Path], rows: Sequence[BaseModel]) -> Path:
        """Census table as CSV, columns in model field order"""
        target = self._prepare(path)
        fields = list(type(rows[0]).model_fields) if rows else []
        with open(target, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            if fields:
                writer.writerow(fields)
            for row in rows:
                writer.writerow([getattr(row, name) for name in fields])
        logger.info(f"📤 Wrote {len(rows)} census row(s) to {target}")
        return target

    def save_text(self, path: Union[str, Path], text: str) -> Path:
        """Save plain text such as a COO matrix dump"""
        target = self._prepare(path)
        try:
            with open(target, "w", encoding="utf-8") as f:
                f.write(text)
        except IOError as e:
            logger.error(f"❌ Error saving {target}: {e}")
            raise
        logger.debug(f"📤 Wrote {target}")
        return target


# Global store instance
report_store = ReportStore()
