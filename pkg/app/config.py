"""
Runtime configuration read from the environment (after load_dotenv) and
validated run configuration for the CLI commands
"""
import os
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from app.checks import ALL_CHECKS, FAULTS, SECTORS


class Settings(BaseModel):
    """Environment-driven defaults"""
    max_vertices: int = Field(default=12, ge=1, description="Largest forced internal vertex count accepted")
    max_basis: int = Field(default=200_000, ge=1, description="Largest basis size per grade")
    workers: int = Field(default=1, ge=1, description="Worker processes for family runs")
    seed: int = Field(default=20240101, description="Default seed for order trials")
    order_trials: int = Field(default=20, ge=1, description="Random reorderings per order check")
    log_level: str = Field(default="INFO")
    output_dir: Path = Field(default=Path("data"))

    @classmethod
    def from_env(cls) -> "Settings":
        """Build settings from MARKED_GRAPHS_* variables, falling back to defaults"""
        values = {
            "max_vertices": os.getenv("MARKED_GRAPHS_MAX_VERTICES"),
            "max_basis": os.getenv("MARKED_GRAPHS_MAX_BASIS"),
            "workers": os.getenv("MARKED_GRAPHS_WORKERS"),
            "seed": os.getenv("MARKED_GRAPHS_SEED"),
            "order_trials": os.getenv("MARKED_GRAPHS_ORDER_TRIALS"),
            "log_level": os.getenv("MARKED_GRAPHS_LOG_LEVEL"),
            "output_dir": os.getenv("MARKED_GRAPHS_OUTPUT_DIR"),
        }
        return cls(**{key: value for key, value in values.items() if value not in (None, "")})


class RunConfig(BaseModel):
    """Validated configuration of a single CLI invocation"""
    model_config = {"str_strip_whitespace": True}

    command: Literal["enumerate", "census", "cohomology", "verify", "generator"]
    r: Optional[int] = Field(default=None, ge=0, description="Leg count of the family")
    l: Optional[int] = Field(default=None, ge=0, description="Loop order of the family")
    graph_path: Optional[Path] = Field(default=None, description="Input graph file instead of a family")
    legs_labeled: bool = True
    checks: List[str] = Field(default_factory=lambda: list(ALL_CHECKS))
    seed: int = Field(default_factory=lambda: settings.seed)
    trials: int = Field(default_factory=lambda: settings.order_trials, ge=1)
    output: Optional[Path] = Field(default=None, description="Output file; defaults under the output directory")
    export_dir: Optional[Path] = Field(default=None, description="Directory for COO exports of the differentials")
    sectors: List[str] = Field(default_factory=lambda: list(SECTORS))
    timing: bool = False
    max_vertices: int = Field(default_factory=lambda: settings.max_vertices, ge=1)
    max_basis: int = Field(default_factory=lambda: settings.max_basis, ge=1)
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)
    fault: Optional[str] = None
    verbose: bool = False

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        has_family = self.r is not None and self.l is not None
        if has_family == (self.graph_path is not None):
            raise ValueError("Provide either --r and --l or --graph, not both")
        if self.command in ("enumerate", "census") and self.graph_path is not None:
            raise ValueError(f"{self.command} works on a family: pass --r and --l")
        unknown = [name for name in self.checks if name not in ALL_CHECKS]
        if unknown:
            raise ValueError(f"Unknown checks: {', '.join(unknown)}")
        bad_sectors = [name for name in self.sectors if name not in SECTORS]
        if bad_sectors:
            raise ValueError(f"Unknown sectors: {', '.join(bad_sectors)} (expected {', '.join(SECTORS)})")
        if self.fault is not None and self.fault not in FAULTS:
            raise ValueError(f"Unknown fault '{self.fault}' (expected one of {', '.join(FAULTS)})")
        return self


settings = Settings.from_env()
