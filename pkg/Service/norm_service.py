from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import List, Tuple
import logging
import math

import numpy as np

from Entity.function import StepFunction
from Entity.radix import RadixSystem
from Entity.variation import LemmaReport, LemmaRow, VariationProfile
from Service.base_service import VilenkinError, require
from Service.group_service import GroupService
from Service.spectral_service import SpectralService

logger = logging.getLogger(__name__)

# Above this many cells L_p sums switch to compensated summation
COMPENSATED_THRESHOLD = 2 ** 16
SCAN_CHUNK = 512


def mean_power(values: np.ndarray, p: float = 1.0) -> float:
    """(1/M) sum |values|^p with a fixed reduction order"""
    w = np.abs(values)
    if p != 1.0:
        w = w ** p
    total = math.fsum(w) if w.size > COMPENSATED_THRESHOLD else float(np.sum(w))
    return total / w.size


def l1_norm(values: np.ndarray) -> float:
    return mean_power(values, 1.0)


class NormService:
    @staticmethod
    def lp_norm(f: StepFunction, p: float) -> float:
        """((1/M_N) sum_t |f_t|^p)^{1/p}; a quasi-norm for 0 < p < 1"""
        require(p > 0, "invalid-argument", f"p must be > 0, got {p}")
        return mean_power(f.values, p) ** (1.0 / p)

    @staticmethod
    def lebesgue_constant(n: int, sys: RadixSystem, depth: int = None) -> float:
        """L_n = ||D_n||_1, realized at depth |n|+1 unless a depth is given"""
        require(1 <= n <= sys.size, "out-of-range", f"Lebesgue constants need 1 <= n <= {sys.size}, got {n}")
        if depth is None:
            depth = sys.depth if n == sys.size else GroupService.order(n, sys) + 1
        require(depth <= sys.depth, "out-of-range", f"depth {depth} exceeds {sys.depth}")
        sub = GroupService.truncate(sys, depth)
        require(n <= sub.size, "out-of-range", f"D_{n} is not measurable at depth {depth}")
        return l1_norm(SpectralService.dirichlet_kernel(n, sub).values)

    @staticmethod
    def variation_profile(n: int, sys: RadixSystem) -> VariationProfile:
        index = GroupService.decompose(n, sys)
        delta = tuple(1 if d else 0 for d in index.digits)
        delta_star = tuple(
            abs((m - d) % m - 1) * dj for d, m, dj in zip(index.digits, sys.radices, delta)
        )
        padded = delta + (0,)
        v = sum(abs(padded[j + 1] - padded[j]) for j in range(sys.depth)) + delta[0]
        return VariationProfile(n=index, delta=delta, delta_star=delta_star, v=v, v_star=sum(delta_star))

    @staticmethod
    def variation_table(sys: RadixSystem) -> Tuple[np.ndarray, np.ndarray]:
        """v(n) and v*(n) for every n < M_N"""
        return _variation_table(sys)

    @staticmethod
    def lemma2_bounds(v: int, v_star: int, lam: int) -> Tuple[float, float]:
        lower = v / (4 * lam) + v_star / lam + 1 / (2 * lam)
        upper = 1.5 * v + 4 * v_star - 1
        return lower, upper

    @staticmethod
    def check_lemma2(n: int, sys: RadixSystem, tolerance: float = 1e-9) -> LemmaRow:
        require(1 <= n < sys.size, "out-of-range", f"n={n} outside [1, {sys.size})")
        profile = NormService.variation_profile(n, sys)
        L = NormService.lebesgue_constant(n, sys)
        return NormService._lemma_row(n, profile.v, profile.v_star, L, sys.lam, tolerance)

    @staticmethod
    def scan_lemma2(
        sys: RadixSystem, n_start: int = 1, n_stop: int = None, threads: int = 1, tolerance: float = 1e-9
    ) -> LemmaReport:
        """Check the two-sided bound for every n in [n_start, n_stop)"""
        n_stop = sys.size if n_stop is None else n_stop
        require(1 <= n_start <= n_stop <= sys.size, "out-of-range",
                f"scan range [{n_start}, {n_stop}) must lie in [1, {sys.size}]")
        v_table, v_star_table = _variation_table(sys)
        chunks = [(a, min(a + SCAN_CHUNK, n_stop)) for a in range(n_start, n_stop, SCAN_CHUNK)]

        def run(bounds):
            a, b = bounds
            return [
                NormService._lemma_row(
                    n, int(v_table[n]), int(v_star_table[n]), NormService.lebesgue_constant(n, sys), sys.lam, tolerance
                )
                for n in range(a, b)
            ]

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, chunks))
        rows: List[LemmaRow] = [row for part in parts for row in part]
        report = LemmaReport(n_start=n_start, n_stop=n_stop, rows=rows, violations=[r.n for r in rows if r.violation])
        if rows:
            report.min_lower_slack = min(r.lower_slack for r in rows)
            report.min_upper_slack = min(r.upper_slack for r in rows)
        if report.violations:
            logger.warning("%d two-sided bound violations on %s", len(report.violations), sys.label())
        return report

    @staticmethod
    def lemma1_average(n: int, sys: RadixSystem, normalizer: str = "n_M") -> float:
        """(1/(n M_n)) sum_{k=1}^{M_n - 1} v(k); normalizer "M" drops the n factor"""
        require(1 <= n <= sys.depth, "out-of-range", f"level {n} outside [1, {sys.depth}]")
        v_table, _ = _variation_table(GroupService.truncate(sys, n))
        total = int(v_table.sum())  # v(0) = 0
        M = sys.products[n]
        if normalizer == "n_M":
            return total / (n * M)
        if normalizer == "M":
            return total / M
        raise VilenkinError("invalid-argument", f"unknown normalizer {normalizer!r}")

    @staticmethod
    def lemma1_report(sys: RadixSystem, levels: int = None) -> LemmaReport:
        levels = sys.depth if levels is None else levels
        require(1 <= levels <= sys.depth, "out-of-range", f"levels {levels} outside [1, {sys.depth}]")
        averages = [NormService.lemma1_average(n, sys) for n in range(1, levels + 1)]
        return LemmaReport(n_start=1, n_stop=levels + 1, c_estimate=min(averages))

    @staticmethod
    def _lemma_row(n: int, v: int, v_star: int, L: float, lam: int, tolerance: float) -> LemmaRow:
        lower, upper = NormService.lemma2_bounds(v, v_star, lam)
        lower_slack, upper_slack = L - lower, upper - L
        return LemmaRow(
            n=n, v=v, v_star=v_star, L_n=L, lower_bound=lower, upper_bound=upper,
            lower_slack=lower_slack, upper_slack=upper_slack,
            violation=lower_slack < -tolerance or upper_slack < -tolerance,
        )


@lru_cache(maxsize=16)
def _variation_table(sys: RadixSystem) -> Tuple[np.ndarray, np.ndarray]:
    digits = np.stack([GroupService.cell_coordinates(sys, j) for j in range(sys.depth)], axis=1)
    radices = np.asarray(sys.radices)
    delta = (digits != 0).astype(np.int64)
    delta_star = np.abs((radices - digits) % radices - 1) * delta
    padded = np.hstack([delta, np.zeros((delta.shape[0], 1), dtype=np.int64)])
    v = np.abs(np.diff(padded, axis=1)).sum(axis=1) + delta[:, 0]
    v_star = delta_star.sum(axis=1)
    v.setflags(write=False)
    v_star.setflags(write=False)
    return v, v_star
