from pydantic import BaseModel, ConfigDict, model_validator
from typing import Tuple

# M_N must stay a signed 64-bit integer
MAX_PRODUCT = 2 ** 63 - 1


class RadixSystem(BaseModel):
    """Truncated generating sequence m_0..m_{N-1} with products M_0..M_N"""

    model_config = ConfigDict(frozen=True)

    radices: Tuple[int, ...]
    depth: int
    products: Tuple[int, ...]
    lam: int

    @model_validator(mode="after")
    def check_products(self):
        if self.depth < 1 or len(self.radices) != self.depth:
            raise ValueError("depth must be >= 1 and match the number of radices")
        if any(m < 2 for m in self.radices):
            raise ValueError("every radix must be >= 2")
        if len(self.products) != self.depth + 1 or self.products[0] != 1:
            raise ValueError("products must be M_0..M_N with M_0 = 1")
        for k, m in enumerate(self.radices):
            if self.products[k + 1] != m * self.products[k]:
                raise ValueError(f"M_{k + 1} != m_{k} * M_{k}")
        if self.products[-1] > MAX_PRODUCT:
            raise ValueError("M_N does not fit in 64 bits")
        if self.lam != max(self.radices):
            raise ValueError("lam must be the largest radix")
        return self

    @property
    def size(self) -> int:
        """M_N, the number of rank-N cells"""
        return self.products[-1]

    @property
    def is_dyadic(self) -> bool:
        return all(m == 2 for m in self.radices)

    def label(self) -> str:
        if len(set(self.radices)) == 1:
            return f"{self.radices[0]}^{self.depth}"
        return ",".join(str(m) for m in self.radices)


class VilenkinIndex(BaseModel):
    model_config = ConfigDict(frozen=True)

    sys: RadixSystem
    value: int
    digits: Tuple[int, ...]
    order: int  # -1 for n = 0

    @model_validator(mode="after")
    def check_digits(self):
        if len(self.digits) != self.sys.depth:
            raise ValueError("one digit per level is required")
        if any(not 0 <= d < m for d, m in zip(self.digits, self.sys.radices)):
            raise ValueError("digit out of range for its radix")
        if sum(d * M for d, M in zip(self.digits, self.sys.products)) != self.value:
            raise ValueError("digits do not reconstruct value")
        nonzero = [j for j, d in enumerate(self.digits) if d]
        if self.order != (max(nonzero) if nonzero else -1):
            raise ValueError("order must be the highest nonzero digit position")
        return self


class CellIndex(BaseModel):
    """Rank-N cell (group point) indexed least-significant coordinate first"""

    model_config = ConfigDict(frozen=True)

    sys: RadixSystem
    t: int
    coords: Tuple[int, ...]

    @model_validator(mode="after")
    def check_coords(self):
        if len(self.coords) != self.sys.depth:
            raise ValueError("one coordinate per level is required")
        if any(not 0 <= x < m for x, m in zip(self.coords, self.sys.radices)):
            raise ValueError("coordinate out of range for its radix")
        if sum(x * M for x, M in zip(self.coords, self.sys.products)) != self.t:
            raise ValueError("coordinates do not reconstruct t")
        return self
