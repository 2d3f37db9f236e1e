"""
Pydantic schemas for graph files, chains and reports
"""

# Import commonly used schemas for easier access
from .chains import ChainRecord, ChainTerm, GeneratorRecord
from .graphs import CensusRow, GraphRecord
from .reports import (
    CohomologyReport,
    CohomologyRun,
    DegreeReport,
    GraphCohomology,
    SuiteReport,
    VerificationResult,
)

__all__ = [
    # Graph schemas
    'GraphRecord',
    'CensusRow',

    # Chain schemas
    'ChainTerm',
    'ChainRecord',
    'GeneratorRecord',

    # Report schemas
    'DegreeReport',
    'CohomologyReport',
    'GraphCohomology',
    'CohomologyRun',
    'VerificationResult',
    'SuiteReport',
]
