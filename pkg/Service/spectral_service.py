from functools import lru_cache
from typing import Any, Dict, Iterator, Tuple, Union
import logging

import numpy as np
from pydantic import ValidationError

from Entity.function import SpectralVector, StepFunction
from Entity.radix import CellIndex, RadixSystem, VilenkinIndex
from Service.base_service import VilenkinError, deserialize_complex, require, serialize_complex
from Service.group_service import GroupService

logger = logging.getLogger(__name__)

IndexLike = Union[int, VilenkinIndex]


class SpectralService:
    # ========== CHARACTERS ==========
    @staticmethod
    def root_table(m: int) -> np.ndarray:
        """exp(2 pi i r / m) for r < m, with quarter turns stored exactly"""
        return _root_table(m)

    @staticmethod
    def rademacher(k: int, x: CellIndex, sys: RadixSystem) -> complex:
        require(0 <= k < sys.depth, "out-of-range", f"level {k} outside [0, {sys.depth})")
        GroupService._check_system(sys, x)
        return complex(_root_table(sys.radices[k])[x.coords[k]])

    @staticmethod
    def vilenkin_char(n: IndexLike, x: CellIndex, sys: RadixSystem) -> complex:
        """psi_n(x) = prod_k r_k(x)^{n_k}"""
        n = SpectralService._index(n, sys)
        GroupService._check_system(sys, x)
        value = complex(1.0)
        for d, xk, m in zip(n.digits, x.coords, sys.radices):
            if d:
                value *= _root_table(m)[(d * xk) % m]
        return value

    @staticmethod
    def character_vector(n: IndexLike, sys: RadixSystem, conjugate: bool = False) -> np.ndarray:
        """psi_n evaluated on every rank-N cell"""
        n = SpectralService._index(n, sys)
        out = np.ones(sys.size, dtype=complex)
        for level, (d, m) in enumerate(zip(n.digits, sys.radices)):
            if d:
                roots = _root_table(m)
                if conjugate:
                    roots = roots.conj()
                out *= roots[(d * GroupService.cell_coordinates(sys, level)) % m]
        return out

    @staticmethod
    def character(n: IndexLike, sys: RadixSystem) -> StepFunction:
        return StepFunction(sys=sys, values=SpectralService.character_vector(n, sys))

    # ========== TRANSFORMS ==========
    @staticmethod
    def forward_naive(f: StepFunction) -> SpectralVector:
        """Reference O(M_N^2) transform: f^(k) = (1/M_N) sum_t f(x_t) conj(psi_k(x_t))"""
        sys = f.sys
        coeffs = np.empty(sys.size, dtype=complex)
        for k in range(sys.size):
            coeffs[k] = np.vdot(SpectralService.character_vector(k, sys), f.values) / sys.size
        return SpectralVector(sys=sys, coeffs=coeffs)

    @staticmethod
    def forward_fast(f: StepFunction) -> SpectralVector:
        """Level-by-level mixed-radix transform, O(M_N * sum m_k)"""
        coeffs = _mixed_radix_pass(f.values, f.sys, conjugate=True) / f.sys.size
        return SpectralVector(sys=f.sys, coeffs=coeffs)

    @staticmethod
    def inverse(c: SpectralVector) -> StepFunction:
        return StepFunction(sys=c.sys, values=_mixed_radix_pass(c.coeffs, c.sys, conjugate=False))

    # ========== PARTIAL SUMS ==========
    @staticmethod
    def partial_sum(c: SpectralVector, n: int) -> StepFunction:
        """S_n f = sum_{k<n} f^(k) psi_k, with S_0 f = 0"""
        SpectralService._check_count(n, c.sys)
        return StepFunction(sys=c.sys, values=SpectralService._partial_values(c, n))

    @staticmethod
    def iter_partial_sums(c: SpectralVector, start: int, stop: int) -> Iterator[Tuple[int, np.ndarray]]:
        """Yield (n, S_n f) for start <= n <= stop using S_{n+1} = S_n + f^(n) psi_n.

        The yielded array is a shared buffer updated in place; copy it to keep it.
        """
        SpectralService._check_count(start, c.sys)
        SpectralService._check_count(stop, c.sys)
        current = SpectralService._partial_values(c, start)
        for n in range(start, stop + 1):
            yield n, current
            if n < stop and c.coeffs[n] != 0:
                current += c.coeffs[n] * SpectralService.character_vector(n, c.sys)

    @staticmethod
    def fejer_mean(c: SpectralVector, n: int, method: str = "weighted") -> StepFunction:
        """sigma_n f = (1/n) sum_{k=0}^{n-1} S_k f"""
        require(n >= 1, "invalid-argument", "Fejer means are defined for n >= 1")
        SpectralService._check_count(n, c.sys)
        if method == "weighted":
            weights = np.zeros(c.sys.size)
            weights[:n] = (n - 1 - np.arange(n)) / n
            values = _mixed_radix_pass(c.coeffs * weights, c.sys, conjugate=False)
        elif method == "direct":
            total = np.zeros(c.sys.size, dtype=complex)
            for _, partial in SpectralService.iter_partial_sums(c, 0, n - 1):
                total += partial
            values = total / n
        else:
            raise VilenkinError("invalid-argument", f"unknown Fejer method {method!r}")
        return StepFunction(sys=c.sys, values=values)

    # ========== KERNELS ==========
    @staticmethod
    def dirichlet_kernel(n: int, sys: RadixSystem) -> StepFunction:
        """D_n from the digits of n via D_{s M_j} = D_{M_j} sum_{k<s} r_j^k and the shift identity"""
        SpectralService._check_count(n, sys)
        if n == sys.size:
            return StepFunction(sys=sys, values=SpectralService._dirichlet_power(sys.depth, sys))
        digits = SpectralService._index(n, sys).digits
        total = np.zeros(sys.size, dtype=complex)
        prefix = np.ones(sys.size, dtype=complex)  # prod_{i>j} r_i^{n_i}
        for level in reversed(range(sys.depth)):
            d = digits[level]
            if not d:
                continue
            m = sys.radices[level]
            x = GroupService.cell_coordinates(sys, level)
            block = SpectralService._dirichlet_power(level, sys) * _geometric_table(m)[d][x]
            total += prefix * block
            prefix = prefix * _root_table(m)[(d * x) % m]
        return StepFunction(sys=sys, values=total)

    @staticmethod
    def dirichlet_kernel_naive(n: int, sys: RadixSystem) -> StepFunction:
        """D_n = sum_{k<n} psi_k by direct summation"""
        SpectralService._check_count(n, sys)
        total = np.zeros(sys.size, dtype=complex)
        for k in range(n):
            total += SpectralService.character_vector(k, sys)
        return StepFunction(sys=sys, values=total)

    @staticmethod
    def fejer_kernel(n: int, sys: RadixSystem) -> StepFunction:
        """K_n = (1/n) sum_{k<n} D_k"""
        ones = SpectralVector(sys=sys, coeffs=np.ones(sys.size))
        return SpectralService.fejer_mean(ones, n)

    # ========== CORPORA AND JSON ==========
    @staticmethod
    def random_step_function(sys: RadixSystem, rank: int, rng: np.random.Generator) -> StepFunction:
        """Standard complex normal values on the M_rank cylinders of rank `rank`"""
        require(0 <= rank <= sys.depth, "out-of-range", f"rank {rank} outside [0, {sys.depth}]")
        cells = sys.products[rank]
        base = rng.standard_normal(cells) + 1j * rng.standard_normal(cells)
        return StepFunction(sys=sys, values=base[np.arange(sys.size) % cells])

    @staticmethod
    def to_json(obj: Union[StepFunction, SpectralVector]) -> Dict[str, Any]:
        if isinstance(obj, SpectralVector):
            kind, values = "spectral", obj.coeffs
        else:
            kind, values = "step", obj.values
        return {
            "kind": kind,
            "radices": list(obj.sys.radices),
            "depth": obj.sys.depth,
            "values": serialize_complex(values),
        }

    @staticmethod
    def from_json(data: Dict[str, Any], expect: str = "step") -> Union[StepFunction, SpectralVector]:
        try:
            radices = data["radices"]
            depth = int(data["depth"])
            raw = data["values"]
        except (KeyError, TypeError, ValueError) as e:
            raise VilenkinError("parse-error", f"missing or invalid field: {e}")
        require(isinstance(radices, (list, tuple)) and len(radices) <= depth, "parse-error",
                f"expected at most depth={depth} radices, got {radices!r}")
        kind = data.get("kind", expect)
        require(kind in ("step", "spectral"), "parse-error", f"unknown kind {kind!r}")
        sys = GroupService.build_radix_system(radices, depth)
        try:
            values = deserialize_complex(raw)
            if kind == "spectral":
                return SpectralVector(sys=sys, coeffs=values)
            return StepFunction(sys=sys, values=values)
        except (ValidationError, TypeError, ValueError) as e:
            raise VilenkinError("parse-error", f"invalid values: {e}")

    # ========== HELPERS ==========
    @staticmethod
    def _index(n: IndexLike, sys: RadixSystem) -> VilenkinIndex:
        if isinstance(n, VilenkinIndex):
            if n.sys != sys:
                raise VilenkinError("system-mismatch", "index built for a different system")
            return n
        return GroupService.decompose(int(n), sys)

    @staticmethod
    def _check_count(n: int, sys: RadixSystem):
        require(0 <= n <= sys.size, "out-of-range", f"n={n} outside [0, {sys.size}]")

    @staticmethod
    def _partial_values(c: SpectralVector, n: int) -> np.ndarray:
        if n == 0:
            return np.zeros(c.sys.size, dtype=complex)
        truncated = np.zeros(c.sys.size, dtype=complex)
        truncated[:n] = c.coeffs[:n]
        return _mixed_radix_pass(truncated, c.sys, conjugate=False)

    @staticmethod
    def _dirichlet_power(level: int, sys: RadixSystem) -> np.ndarray:
        """D_{M_level}: M_level on I_level, 0 elsewhere"""
        return np.where(GroupService.cylinder_mask(level, sys), float(sys.products[level]), 0.0).astype(complex)


def _mixed_radix_pass(values: np.ndarray, sys: RadixSystem, conjugate: bool) -> np.ndarray:
    """Apply the m_j-point character matrix along every digit axis.

    Cell t = high * M_{j+1} + x_j * M_j + low, so a C-order reshape to
    (M_N / M_{j+1}, m_j, M_j) exposes level j as the middle axis.
    """
    arr = np.array(values, dtype=complex)
    for level, m in enumerate(sys.radices):
        low = sys.products[level]
        matrix = _character_matrix(m, conjugate)
        arr = (matrix @ arr.reshape(sys.size // (low * m), m, low)).reshape(-1)
    return arr


@lru_cache(maxsize=None)
def _root_table(m: int) -> np.ndarray:
    r = np.arange(m)
    roots = np.exp(2j * np.pi * r / m)
    exact = (1.0, 1j, -1.0, -1j)
    for i in range(m):
        if (4 * i) % m == 0:
            roots[i] = exact[(4 * i) // m]
    roots.setflags(write=False)
    return roots


@lru_cache(maxsize=None)
def _character_matrix(m: int, conjugate: bool) -> np.ndarray:
    roots = _root_table(m)
    k = np.arange(m)
    matrix = roots[np.outer(k, k) % m]
    if conjugate:
        matrix = matrix.conj()
    matrix.setflags(write=False)
    return matrix


@lru_cache(maxsize=None)
def _geometric_table(m: int) -> np.ndarray:
    """table[s][x] = sum_{k<s} exp(2 pi i k x / m) for 0 <= s <= m"""
    roots = _root_table(m)
    k = np.arange(m)
    powers = roots[np.outer(k, k) % m]
    table = np.vstack([np.zeros((1, m), dtype=complex), np.cumsum(powers, axis=0)])
    table.setflags(write=False)
    return table
