"""
Chain serialization records
"""
from typing import List, Optional

from pydantic import BaseModel, Field


class ChainTerm(BaseModel):
    """One marking (value string in element order) and its coefficient"""
    marking: str = Field(pattern=r"^[012]*$")
    coeff: int


class ChainRecord(BaseModel):
    """{"system": key, "terms": [{"marking", "coeff"}]}"""
    system: str
    terms: List[ChainTerm] = Field(default_factory=list)


class GeneratorRecord(BaseModel):
    """Per-graph generator chains plus the family sum"""
    r: Optional[int] = Field(default=None, description="Leg count, absent for graph files")
    l: Optional[int] = None
    legs_labeled: bool
    graphs: List[str] = Field(default_factory=list, description="Canonical keys in emission order")
    chains: List[ChainRecord] = Field(default_factory=list)
    total_terms: int = 0
