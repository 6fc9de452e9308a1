import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from Entity.radix import RadixSystem


def _frozen_complex(value) -> np.ndarray:
    arr = np.array(value, dtype=complex).reshape(-1)
    arr.setflags(write=False)
    return arr


class StepFunction(BaseModel):
    """Function on G_m constant on rank-N cylinders, one value per cell"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sys: RadixSystem
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def coerce_values(cls, v):
        return _frozen_complex(v)

    @model_validator(mode="after")
    def check_length(self):
        if self.values.shape[0] != self.sys.size:
            raise ValueError(f"expected {self.sys.size} cell values, got {self.values.shape[0]}")
        return self

    def integral(self) -> complex:
        return complex(self.values.sum() / self.sys.size)


class SpectralVector(BaseModel):
    """Fourier coefficients f^(k), k < M_N, with respect to the Vilenkin system"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sys: RadixSystem
    coeffs: np.ndarray

    @field_validator("coeffs", mode="before")
    @classmethod
    def coerce_coeffs(cls, v):
        return _frozen_complex(v)

    @model_validator(mode="after")
    def check_length(self):
        if self.coeffs.shape[0] != self.sys.size:
            raise ValueError(f"expected {self.sys.size} coefficients, got {self.coeffs.shape[0]}")
        return self
