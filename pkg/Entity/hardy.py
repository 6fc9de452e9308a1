from pydantic import BaseModel, ConfigDict, model_validator
from typing import List, Optional, Tuple

from Entity.function import StepFunction
from Entity.radix import RadixSystem


class CounterexampleSpec(BaseModel):
    """Block indices alpha_1 < ... < alpha_K of the truncated counterexample"""

    model_config = ConfigDict(frozen=True)

    alphas: Tuple[int, ...]
    sys: RadixSystem

    @model_validator(mode="after")
    def check_alphas(self):
        if not self.alphas:
            raise ValueError("at least one alpha is required")
        if self.alphas[0] < 1 or any(a >= b for a, b in zip(self.alphas, self.alphas[1:])):
            raise ValueError("alphas must be strictly increasing positive integers")
        return self

    @property
    def terms(self) -> int:
        return len(self.alphas)

    @property
    def tail_sum(self) -> float:
        """sum of alpha_k^(-1/2) over the retained terms"""
        return float(sum(a ** -0.5 for a in self.alphas))

    def block_of(self, j: int) -> Optional[int]:
        """0-based k with M_{alpha_k} <= j < M_{alpha_k + 1}, or None"""
        M = self.sys.products
        for k, a in enumerate(self.alphas):
            if M[a] <= j < M[a + 1]:
                return k
        return None


class HardyProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    f: StepFunction
    maximal: StepFunction
    h1_norm: float
    dyadic_partial_sums: List[StepFunction]


class NormEquivalenceReport(BaseModel):
    h1_norm: float
    sup_partial_norm: float
    max_deviation: float
    ok: bool


class FejerReport(BaseModel):
    n_max: int
    sup_norm: float
    argmax_n: int
    h1_norm: float
    ratio: float
