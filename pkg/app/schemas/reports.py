"""
Cohomology and verification report schemas
"""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


class DegreeReport(BaseModel):
    """One degree of a (co)homology report"""
    n: int = Field(ge=0, description="Degree: 2-mark count, or 1-mark count for mu homology")
    dim: int = Field(ge=0, description="Basis size")
    free_rank: int = Field(ge=0)
    torsion: List[int] = Field(default_factory=list, description="Invariant factors above 1")


class RankMismatch(BaseModel):
    """A map whose rank mod p disagrees with its Smith normal form"""
    degree: int = Field(ge=0, description="Source degree of the map")
    rank: int = Field(ge=0, description="Invariant factors not divisible by p")
    rank_mod_p: int = Field(ge=0)
    p: int


class CohomologyReport(BaseModel):
    """{"degrees": [...], "euler": int, "rank_mismatches": [...]}"""
    degrees: List[DegreeReport] = Field(default_factory=list)
    euler: int = 0
    rank_mismatches: List[RankMismatch] = Field(default_factory=list, description="Failed modular rank cross-checks")

    def free_ranks(self) -> List[int]:
        return [degree.free_rank for degree in self.degrees]

    def has_torsion(self) -> bool:
        return any(degree.torsion for degree in self.degrees)

    def is_integers_in_degree_zero(self) -> bool:
        """Z in degree 0, nothing above, no torsion"""
        return (
            bool(self.degrees)
            and self.degrees[0].free_rank == 1
            and all(degree.free_rank == 0 for degree in self.degrees[1:])
            and not self.has_torsion()
        )

    def euler_matches(self) -> bool:
        return self.euler == sum((-1) ** degree.n * degree.free_rank for degree in self.degrees)

    @classmethod
    def direct_sum(cls, reports: List["CohomologyReport"]) -> "CohomologyReport":
        """Degree-wise sum of several reports"""
        top = max((len(report.degrees) for report in reports), default=0)
        degrees = []
        for n in range(top):
            parts = [report.degrees[n] for report in reports if n < len(report.degrees)]
            degrees.append(DegreeReport(
                n=n,
                dim=sum(part.dim for part in parts),
                free_rank=sum(part.free_rank for part in parts),
                torsion=sorted(factor for part in parts for factor in part.torsion),
            ))
        return cls(
            degrees=degrees,
            euler=sum(report.euler for report in reports),
            rank_mismatches=[mismatch for report in reports for mismatch in report.rank_mismatches],
        )


class GraphCohomology(BaseModel):
    """Cohomology of one sector complex of one graph"""
    key: str
    sector: str
    report: CohomologyReport


class CohomologyRun(BaseModel):
    """Output of the cohomology command"""
    scope: str
    sectors: List[str]
    graphs: List[GraphCohomology] = Field(default_factory=list)
    aggregate: Dict[str, CohomologyReport] = Field(default_factory=dict, description="Direct sum over graphs per sector")


class VerificationResult(BaseModel):
    """Outcome of one check on one scope (graph/sector key or family label)"""
    check: str
    scope: str
    status: Literal["pass", "fail"]
    witness: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = Field(default_factory=dict)
    elapsed_ms: Optional[float] = Field(default=None, description="Only recorded when timing is requested")

    @model_validator(mode="after")
    def _failure_has_witness(self) -> "VerificationResult":
        if self.status == "fail" and not self.witness:
            raise ValueError(f"Failed check '{self.check}' on '{self.scope}' carries no witness")
        return self

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class SuiteReport(BaseModel):
    """Every verification result of one run, sorted by (check, scope)"""
    scope: str
    checks: List[str]
    seed: int
    trials: int
    fault: Optional[str] = None
    graphs: int = 0
    passed: int = 0
    failed: int = 0
    results: List[VerificationResult] = Field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return self.failed == 0
