from pydantic import BaseModel, ConfigDict
from typing import List, Optional, Tuple

from Entity.radix import VilenkinIndex


class VariationProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: VilenkinIndex
    delta: Tuple[int, ...]
    delta_star: Tuple[int, ...]
    v: int
    v_star: int


class LemmaRow(BaseModel):
    """One n of the two-sided Lebesgue constant bound"""

    model_config = ConfigDict(frozen=True)

    n: int
    v: int
    v_star: int
    L_n: float
    lower_bound: float
    upper_bound: float
    lower_slack: float
    upper_slack: float
    violation: bool


class LemmaReport(BaseModel):
    n_start: int
    n_stop: int
    rows: List[LemmaRow] = []
    violations: List[int] = []
    min_lower_slack: Optional[float] = None
    min_upper_slack: Optional[float] = None
    c_estimate: Optional[float] = None
