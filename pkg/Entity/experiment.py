from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing import Any, Dict, List, Literal, Optional

EXPERIMENTS = ("transform", "kernel", "lebesgue-scan", "lemma1", "divergence", "gat", "equiv-check")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: str
    radix: str = "2^10"
    depth: Optional[int] = None
    threads: int = Field(default=1, ge=1)
    seed: int = 0
    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    tolerance: float = Field(default=1e-9, gt=0)
    oracle_tolerance: float = Field(default=1e-10, gt=0)
    verify: bool = False
    # transform / kernel
    input: Optional[str] = None
    inverse: bool = False
    n: Optional[int] = None
    fejer: bool = False
    # lebesgue-scan
    n_start: int = 1
    n_stop: Optional[int] = None
    # lemma1
    levels: Optional[int] = None
    # divergence
    alphas: Optional[str] = None
    alpha_rule: str = "k4"
    terms: Optional[int] = None
    # gat / equiv-check corpora
    corpus: int = Field(default=50, ge=1)
    rank: Optional[int] = None

    @field_validator("experiment")
    @classmethod
    def known_experiment(cls, value: str) -> str:
        if value not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {value!r}; expected one of {', '.join(EXPERIMENTS)}")
        return value


class ExperimentReport(BaseModel):
    experiment: str
    columns: List[str] = []
    rows: List[List[Any]] = []
    summary: Dict[str, Any] = {}
    tables: Dict[str, Dict[str, Any]] = {}
    violations: int = 0
    document: Optional[Dict[str, Any]] = None  # JSON payload for transform/kernel
