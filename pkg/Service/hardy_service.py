from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Sequence, Tuple, Union
import logging
import math

import numpy as np
from pydantic import ValidationError

from Entity.function import SpectralVector, StepFunction
from Entity.hardy import CounterexampleSpec, FejerReport, HardyProfile, NormEquivalenceReport
from Entity.radix import RadixSystem
from Service.base_service import VilenkinError, require
from Service.norm_service import l1_norm
from Service.spectral_service import SpectralService

logger = logging.getLogger(__name__)

# Partial-sum scans restart from an exact checkpoint every WINDOW indices
WINDOW = 256

FunctionLike = Union[StepFunction, SpectralVector]


class HardyService:
    # ========== MAXIMAL FUNCTION ==========
    @staticmethod
    def maximal_function(f: StepFunction) -> StepFunction:
        """f*(x) = max over ranks n <= N of |mean of f over I_n(x)|"""
        return StepFunction(sys=f.sys, values=np.max(HardyService._cylinder_averages(f), axis=0))

    @staticmethod
    def h1_norm(f: StepFunction) -> float:
        return l1_norm(HardyService.maximal_function(f).values)

    @staticmethod
    def dyadic_partial_sums(f: StepFunction) -> List[StepFunction]:
        """S_{M_n} f for n = 0..N, through the spectral path"""
        c = SpectralService.forward_fast(f)
        return [SpectralService.partial_sum(c, M) for M in f.sys.products]

    @staticmethod
    def hardy_profile(f: StepFunction) -> HardyProfile:
        maximal = HardyService.maximal_function(f)
        return HardyProfile(
            f=f, maximal=maximal, h1_norm=l1_norm(maximal.values),
            dyadic_partial_sums=HardyService.dyadic_partial_sums(f),
        )

    @staticmethod
    def check_norm_equivalence(f: StepFunction, tolerance: float = 1e-9) -> NormEquivalenceReport:
        """Compare f* with sup_n |S_{M_n} f| pointwise"""
        maximal = HardyService.maximal_function(f).values.real
        sup_partial = np.max(np.abs([s.values for s in HardyService.dyadic_partial_sums(f)]), axis=0)
        deviation = float(np.max(np.abs(maximal - sup_partial)))
        return NormEquivalenceReport(
            h1_norm=l1_norm(maximal), sup_partial_norm=l1_norm(sup_partial),
            max_deviation=deviation, ok=deviation <= tolerance,
        )

    @staticmethod
    def subsequence_bound(f: StepFunction) -> float:
        """max_n ||S_{M_n} f||_1 / ||f||_{H_1}"""
        h1 = HardyService.h1_norm(f)
        if h1 == 0:
            return 0.0
        return max(l1_norm(s.values) for s in HardyService.dyadic_partial_sums(f)) / h1

    # ========== COUNTEREXAMPLE ==========
    @staticmethod
    def alpha_rule(rule: str, terms: int) -> Tuple[int, ...]:
        """Named block sequences: k4 (summable alpha^-1/2) and k2 (the non-summable control)"""
        require(terms >= 1, "invalid-argument", f"terms must be >= 1, got {terms}")
        powers = {"k4": 4, "k2": 2}
        require(rule in powers, "invalid-argument", f"unknown alpha rule {rule!r}; expected k4 or k2")
        return tuple(k ** powers[rule] for k in range(1, terms + 1))

    @staticmethod
    def counterexample_spec(alphas: Sequence[int], sys: RadixSystem) -> CounterexampleSpec:
        try:
            spec = CounterexampleSpec(alphas=tuple(int(a) for a in alphas), sys=sys)
        except ValidationError as e:
            raise VilenkinError("invalid-argument", f"bad alpha sequence: {e.errors()[0]['msg']}")
        if spec.alphas[-1] + 1 > sys.depth:
            raise VilenkinError(
                "depth-insufficient", f"alpha_K + 1 = {spec.alphas[-1] + 1} exceeds depth {sys.depth}"
            )
        return spec

    @staticmethod
    def build_counterexample(spec: CounterexampleSpec) -> StepFunction:
        """f_K = sum_k (D_{M_{alpha_k + 1}} - D_{M_{alpha_k}}) / alpha_k^{1/2}"""
        sys = spec.sys
        require(spec.alphas[-1] + 1 <= sys.depth, "depth-insufficient",
                f"alpha_K + 1 = {spec.alphas[-1] + 1} exceeds depth {sys.depth}")
        total = np.zeros(sys.size, dtype=complex)
        for a in spec.alphas:
            block = SpectralService._dirichlet_power(a + 1, sys) - SpectralService._dirichlet_power(a, sys)
            total += block / math.sqrt(a)
        return StepFunction(sys=sys, values=total)

    @staticmethod
    def expected_coefficients(spec: CounterexampleSpec) -> np.ndarray:
        """alpha_k^{-1/2} on [M_{alpha_k}, M_{alpha_k + 1}), zero elsewhere"""
        coeffs = np.zeros(spec.sys.size)
        M = spec.sys.products
        for a in spec.alphas:
            coeffs[M[a]:M[a + 1]] = a ** -0.5
        return coeffs

    @staticmethod
    def partial_sum_decomposition(spec: CounterexampleSpec, j: int) -> Tuple[StepFunction, StepFunction]:
        """S_j f = S_{M_alpha} f + alpha^{-1/2} psi_{M_alpha} D_{j - M_alpha} for j in block alpha"""
        k = spec.block_of(j)
        if k is None:
            raise VilenkinError("invalid-argument", f"j={j} lies outside every coefficient block")
        sys = spec.sys
        a = spec.alphas[k]
        M_a = sys.products[a]
        c = SpectralService.forward_fast(HardyService.build_counterexample(spec))
        first = SpectralService.partial_sum(c, M_a)
        second = (
            SpectralService.character_vector(M_a, sys)
            * SpectralService.dirichlet_kernel(j - M_a, sys).values
            / math.sqrt(a)
        )
        return first, StepFunction(sys=sys, values=second)

    # ========== STRONG SUMMABILITY ==========
    @staticmethod
    def partial_norms(f: FunctionLike, start: int, stop: int, threads: int = 1,
                      against: StepFunction = None) -> np.ndarray:
        """||S_m f||_1 (or ||S_m f - against||_1) for start <= m <= stop"""
        targets = [None if against is None else against.values]
        return HardyService._scan_norms(f, start, stop, threads, targets)[0]

    @staticmethod
    def _scan_norms(f: FunctionLike, start: int, stop: int, threads: int,
                    targets: Sequence[np.ndarray]) -> List[np.ndarray]:
        """One partial-sum scan; entry i holds ||S_m f - targets[i]||_1 (None subtracts nothing).

        Windows of fixed length restart from exact checkpoints so the values do
        not depend on the thread count.
        """
        c = HardyService._spectral(f)
        SpectralService._check_count(start, c.sys)
        SpectralService._check_count(stop, c.sys)
        windows = [(a, min(a + WINDOW - 1, stop)) for a in range(start, stop + 1, WINDOW)]

        def run(bounds):
            a, b = bounds
            out = np.empty((len(targets), b - a + 1))
            for m, partial in SpectralService.iter_partial_sums(c, a, b):
                for i, target in enumerate(targets):
                    out[i, m - a] = l1_norm(partial if target is None else partial - target)
            return out

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, windows))
        if not parts:
            return [np.empty(0) for _ in targets]
        return list(np.concatenate(parts, axis=1))

    @staticmethod
    def strong_sum_average(f: FunctionLike, n: int, threads: int = 1) -> float:
        """(1/n) sum_{m=1}^{n} ||S_m f||_1"""
        c = HardyService._spectral(f)
        require(1 <= n <= c.sys.size, "out-of-range", f"n={n} outside [1, {c.sys.size}]")
        return math.fsum(HardyService.partial_norms(c, 1, n, threads)) / n

    @staticmethod
    def window_average(f: FunctionLike, alpha: int, threads: int = 1) -> float:
        """B = (1/M_{alpha+1}) sum_{l = M_alpha}^{2 M_alpha} ||S_l f||_1"""
        c = HardyService._spectral(f)
        M = c.sys.products
        require(1 <= alpha < c.sys.depth, "out-of-range", f"alpha={alpha} needs depth > alpha")
        norms = HardyService.partial_norms(c, M[alpha], 2 * M[alpha], threads)
        return math.fsum(norms) / M[alpha + 1]

    @staticmethod
    def cesaro_curve(norms: np.ndarray, points: Sequence[int]) -> List[Tuple[int, float]]:
        """(1/n) sum_{m=1}^{n} ||S_m f||_1 at the given n, from norms[m] = ||S_m f||_1"""
        running = np.cumsum(norms[1:])
        return [(n, float(running[n - 1] / n)) for n in points]

    @staticmethod
    def cesaro_sup(f: FunctionLike, n_max: int, threads: int = 1) -> Tuple[int, float]:
        """(argmax, max) over n <= n_max of (1/n) sum_{m=1}^{n} ||S_m f||_1"""
        c = HardyService._spectral(f)
        require(1 <= n_max <= c.sys.size, "out-of-range", f"n_max={n_max} outside [1, {c.sys.size}]")
        running = np.cumsum(HardyService.partial_norms(c, 1, n_max, threads)) / np.arange(1, n_max + 1)
        best = int(np.argmax(running))
        return best + 1, float(running[best])

    @staticmethod
    def gat_log_average(f: StepFunction, n: int) -> Tuple[float, float]:
        """(convergence form, bounded form) of the logarithmic means at n"""
        require(n >= 2, "invalid-argument", f"the logarithmic mean needs n >= 2, got {n}")
        require(n <= f.sys.size, "out-of-range", f"n={n} exceeds {f.sys.size}")
        curve = HardyService.gat_curve(f, [n])
        return curve[0]["convergence"], curve[0]["bounded"]

    @staticmethod
    def gat_curve(f: StepFunction, checkpoints: Sequence[int], threads: int = 1) -> List[Dict[str, float]]:
        """Both logarithmic means at every checkpoint from a single scan"""
        require(all(2 <= n <= f.sys.size for n in checkpoints), "out-of-range",
                f"checkpoints must lie in [2, {f.sys.size}]")
        top = max(checkpoints)
        c = SpectralService.forward_fast(f)
        k = np.arange(1, top + 1)
        norms, deviations = HardyService._scan_norms(c, 1, top, threads, [None, f.values])
        bounded = np.cumsum(norms / k)
        converging = np.cumsum(deviations / k)
        h1 = HardyService.h1_norm(f)
        curve = []
        for n in checkpoints:
            log_n = math.log(n)
            row = {"n": n, "convergence": float(converging[n - 1] / log_n), "bounded": float(bounded[n - 1] / log_n)}
            row["ratio"] = row["bounded"] / h1 if h1 else 0.0
            curve.append(row)
        return curve

    @staticmethod
    def fejer_maximal_check(f: StepFunction, n_max: int) -> FejerReport:
        """max over 1 <= n <= n_max of ||sigma_n f||_1 and its ratio to ||f||_{H_1}"""
        require(1 <= n_max <= f.sys.size, "out-of-range", f"n_max={n_max} outside [1, {f.sys.size}]")
        c = SpectralService.forward_fast(f)
        running = np.zeros(f.sys.size, dtype=complex)
        best, best_n = -1.0, 1
        for k, partial in SpectralService.iter_partial_sums(c, 0, n_max - 1):
            running += partial
            norm = l1_norm(running) / (k + 1)  # sigma_{k+1} f
            if norm > best:
                best, best_n = norm, k + 1
        h1 = HardyService.h1_norm(f)
        return FejerReport(n_max=n_max, sup_norm=best, argmax_n=best_n, h1_norm=h1,
                           ratio=best / h1 if h1 else 0.0)

    # ========== HELPERS ==========
    @staticmethod
    def _cylinder_averages(f: StepFunction) -> np.ndarray:
        """Row n holds |mean of f over I_n(x_t)| for every cell t"""
        sys = f.sys
        rows = np.empty((sys.depth + 1, sys.size))
        for rank, M in enumerate(sys.products):
            means = f.values.reshape(sys.size // M, M).mean(axis=0)
            rows[rank] = np.abs(np.tile(means, sys.size // M))
        return rows

    @staticmethod
    def _spectral(f: FunctionLike) -> SpectralVector:
        return f if isinstance(f, SpectralVector) else SpectralService.forward_fast(f)
