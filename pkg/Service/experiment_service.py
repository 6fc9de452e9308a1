from pathlib import Path
from typing import Callable, Dict, List, Tuple
import logging
import math
import time

import numpy as np

from Entity.experiment import ExperimentConfig, ExperimentReport
from Entity.function import SpectralVector, StepFunction
from Entity.radix import RadixSystem
from Service.base_service import VilenkinError, load_json_text, require
from Service.group_service import GroupService
from Service.hardy_service import HardyService
from Service.norm_service import NormService, l1_norm
from Service.spectral_service import SpectralService

logger = logging.getLogger(__name__)

LEMMA2_COLUMNS = ["n", "v", "v_star", "L_n", "lower_bound", "upper_bound", "lower_slack", "upper_slack"]
DIVERGENCE_COLUMNS = ["k", "alpha_k", "M_alpha_k", "B_k", "alpha_k_sqrt", "ratio", "h1_norm"]


class ExperimentService:
    @staticmethod
    def run(config: ExperimentConfig) -> ExperimentReport:
        """Dispatch one experiment; unexpected failures surface as VilenkinError"""
        handlers: Dict[str, Callable[[ExperimentConfig], ExperimentReport]] = {
            "transform": ExperimentService.cmd_transform,
            "kernel": ExperimentService.cmd_kernel,
            "lebesgue-scan": ExperimentService.cmd_lebesgue_scan,
            "lemma1": ExperimentService.cmd_lemma1,
            "divergence": ExperimentService.cmd_divergence,
            "gat": ExperimentService.cmd_gat,
            "equiv-check": ExperimentService.cmd_equiv_check,
        }
        handler = handlers.get(config.experiment)
        if handler is None:
            raise VilenkinError("unknown-experiment", f"unknown experiment {config.experiment!r}")
        started = time.perf_counter()
        try:
            report = handler(config)
        except VilenkinError:
            raise
        except Exception as e:
            raise VilenkinError("invalid-argument", f"Failed to run {config.experiment}: {str(e)}")
        logger.info("%s finished in %.2fs with %d violations",
                    config.experiment, time.perf_counter() - started, report.violations)
        return report

    @staticmethod
    def system_for(config: ExperimentConfig) -> RadixSystem:
        return GroupService.parse_radix_spec(config.radix, config.depth)

    # ========== TRANSFORM ==========
    @staticmethod
    def cmd_transform(config: ExperimentConfig) -> ExperimentReport:
        """StepFunction JSON -> SpectralVector JSON (or back with inverse)"""
        require(config.input is not None, "invalid-argument", "transform needs --input")
        path = Path(config.input)
        require(path.is_file(), "invalid-argument", f"input file not found: {path}")
        data = load_json_text(path.read_text(encoding="utf-8"), str(path))
        expect = "spectral" if config.inverse else "step"
        obj = SpectralService.from_json(data, expect=expect)
        if config.inverse:
            require(isinstance(obj, SpectralVector), "parse-error", "inverse expects a spectral input")
            result = SpectralService.inverse(obj)
        else:
            require(isinstance(obj, StepFunction), "parse-error", "forward transform expects a step input")
            result = SpectralService.forward_fast(obj)

        document = SpectralService.to_json(result)
        violations = 0
        if config.verify:
            if config.inverse:
                deviation = float(np.max(np.abs(SpectralService.forward_naive(result).coeffs - obj.coeffs)))
            else:
                deviation = float(np.max(np.abs(SpectralService.forward_naive(obj).coeffs - result.coeffs)))
            violations = int(deviation > config.oracle_tolerance)
            document["verification"] = {"oracle": "forward_naive", "max_deviation": deviation,
                                        "tolerance": config.oracle_tolerance, "ok": violations == 0}
        return ExperimentReport(experiment=config.experiment, document=document, violations=violations,
                                summary={"cells": obj.sys.size})

    @staticmethod
    def cmd_kernel(config: ExperimentConfig) -> ExperimentReport:
        """D_n (or the Fejer kernel K_n) as StepFunction JSON with its L_1 norm"""
        sys = ExperimentService.system_for(config)
        require(config.n is not None, "invalid-argument", "kernel needs --n")
        n = config.n
        if config.fejer:
            kernel = SpectralService.fejer_kernel(n, sys)
        else:
            kernel = SpectralService.dirichlet_kernel(n, sys)
        document = SpectralService.to_json(kernel)
        document["l1_norm"] = l1_norm(kernel.values)
        violations = 0
        if config.verify:
            if config.fejer:
                ones = SpectralVector(sys=sys, coeffs=np.ones(sys.size))
                oracle = SpectralService.fejer_mean(ones, n, method="direct")
            else:
                oracle = SpectralService.dirichlet_kernel_naive(n, sys)
            deviation = float(np.max(np.abs(oracle.values - kernel.values)))
            violations = int(deviation > config.tolerance)
            document["verification"] = {"max_deviation": deviation, "tolerance": config.tolerance,
                                        "ok": violations == 0}
        return ExperimentReport(experiment=config.experiment, document=document, violations=violations)

    # ========== LEBESGUE CONSTANTS ==========
    @staticmethod
    def cmd_lebesgue_scan(config: ExperimentConfig) -> ExperimentReport:
        sys = ExperimentService.system_for(config)
        n_stop = sys.size if config.n_stop is None else config.n_stop
        report = NormService.scan_lemma2(sys, config.n_start, n_stop, config.threads, config.tolerance)
        rows = [[r.n, r.v, r.v_star, r.L_n, r.lower_bound, r.upper_bound, r.lower_slack, r.upper_slack]
                for r in report.rows]
        summary = {
            "rows": len(rows),
            "violations": len(report.violations),
            "lambda": sys.lam,
            "min_lower_slack": report.min_lower_slack,
            "min_upper_slack": report.min_upper_slack,
        }
        growth = [(r.L_n / math.log(r.n), r.n) for r in report.rows if r.n >= 2]
        if growth:
            value, index = max(growth)
            summary["max_L_over_log_n"] = value
            summary["max_L_over_log_n_index"] = index
        if report.violations:
            summary["violating_n"] = report.violations[:20]
        return ExperimentReport(experiment=config.experiment, columns=LEMMA2_COLUMNS, rows=rows,
                                summary=summary, violations=len(report.violations))

    @staticmethod
    def cmd_lemma1(config: ExperimentConfig) -> ExperimentReport:
        sys = ExperimentService.system_for(config)
        levels = sys.depth if config.levels is None else config.levels
        require(1 <= levels <= sys.depth, "out-of-range", f"levels {levels} outside [1, {sys.depth}]")
        rows, running = [], math.inf
        for n in range(1, levels + 1):
            average = NormService.lemma1_average(n, sys, "n_M")
            running = min(running, average)
            rows.append([n, sys.products[n], average, NormService.lemma1_average(n, sys, "M"), running])
        summary = {"c_estimate": running, "levels": levels}
        return ExperimentReport(
            experiment=config.experiment,
            columns=["n", "M_n", "average_nM", "average_M", "running_min"],
            rows=rows, summary=summary, violations=int(not running > 0),
        )

    # ========== DIVERGENCE ==========
    @staticmethod
    def alphas_for(config: ExperimentConfig, sys: RadixSystem) -> Tuple[int, ...]:
        if config.alphas:
            try:
                return tuple(int(a) for a in config.alphas.split(",") if a.strip())
            except ValueError:
                raise VilenkinError("parse-error", f"cannot parse --alphas {config.alphas!r}")
        terms = config.terms
        if terms is None:
            # largest K whose last block still fits at this depth
            terms = 1
            while HardyService.alpha_rule(config.alpha_rule, terms + 1)[-1] + 1 <= sys.depth:
                terms += 1
        return HardyService.alpha_rule(config.alpha_rule, terms)

    @staticmethod
    def cmd_divergence(config: ExperimentConfig) -> ExperimentReport:
        sys = ExperimentService.system_for(config)
        spec = HardyService.counterexample_spec(ExperimentService.alphas_for(config, sys), sys)
        f = HardyService.build_counterexample(spec)
        c = SpectralService.forward_fast(f)
        coefficient_deviation = float(np.max(np.abs(c.coeffs - HardyService.expected_coefficients(spec))))
        norms = HardyService.partial_norms(c, 0, sys.size, config.threads)
        M = sys.products

        rows, ratios = [], []
        for k, a in enumerate(spec.alphas, start=1):
            window = math.fsum(norms[M[a]:2 * M[a] + 1]) / M[a + 1]
            truncation = HardyService.build_counterexample(
                HardyService.counterexample_spec(spec.alphas[:k], sys))
            ratio = window / math.sqrt(a)
            ratios.append(ratio)
            rows.append([k, a, M[a], window, math.sqrt(a), ratio, HardyService.h1_norm(truncation)])

        windows = [row[3] for row in rows]
        h1_values = [row[6] for row in rows]
        cesaro_points = sorted({p for j in range(1, sys.depth + 1) for p in (M[j], M[j] + M[j] // 2)
                                if p <= sys.size})
        curve = HardyService.cesaro_curve(norms, cesaro_points)
        sup_n, sup_value = max(curve, key=lambda item: item[1])
        fejer = HardyService.fejer_maximal_check(f, sys.size)

        summary = {
            "terms": spec.terms,
            "tail_sum": spec.tail_sum,
            "coefficient_max_deviation": coefficient_deviation,
            "windows_increasing": all(a < b for a, b in zip(windows, windows[1:])),
            "fitted_c": min(ratios),
            "h1_min": min(h1_values),
            "h1_max": max(h1_values),
            "cesaro_sup": sup_value,
            "cesaro_sup_n": sup_n,
            "fejer_sup_ratio": fejer.ratio,
        }
        if len(windows) >= 2:
            slope, intercept = np.polyfit([math.sqrt(a) for a in spec.alphas], windows, 1)
            summary["fit_slope"] = float(slope)
            summary["fit_intercept"] = float(intercept)
        violations = int(coefficient_deviation > config.oracle_tolerance)
        return ExperimentReport(
            experiment=config.experiment, columns=DIVERGENCE_COLUMNS, rows=rows, summary=summary,
            tables={"cesaro": {"columns": ["n", "cesaro_average"], "rows": [[n, v] for n, v in curve]}},
            violations=violations,
        )

    # ========== CORPORA ==========
    @staticmethod
    def corpus(config: ExperimentConfig, sys: RadixSystem, max_rank: int) -> List[Tuple[int, StepFunction]]:
        """Seeded corpus: numpy PCG64 via default_rng(seed), ranks cycling 1..max_rank"""
        rng = np.random.default_rng(config.seed)
        members = []
        for i in range(config.corpus):
            rank = config.rank if config.rank is not None else 1 + i % max_rank
            members.append((rank, SpectralService.random_step_function(sys, rank, rng)))
        return members

    @staticmethod
    def cmd_gat(config: ExperimentConfig) -> ExperimentReport:
        sys = ExperimentService.system_for(config)
        require(sys.depth >= 2, "invalid-argument", "gat needs depth >= 2")
        checkpoints = list(sys.products[2:])
        rows, fejer_rows = [], []
        max_ratio, max_fejer, max_subsequence, decreasing = 0.0, 0.0, 0.0, 0
        for index, (rank, f) in enumerate(ExperimentService.corpus(config, sys, min(4, sys.depth))):
            curve = HardyService.gat_curve(f, checkpoints, config.threads)
            h1 = HardyService.h1_norm(f)
            for point in curve:
                rows.append([index, rank, point["n"], point["convergence"], point["bounded"], h1, point["ratio"]])
                max_ratio = max(max_ratio, point["ratio"])
            if curve[-1]["convergence"] < curve[0]["convergence"]:
                decreasing += 1
            fejer = HardyService.fejer_maximal_check(f, sys.size)
            subsequence = HardyService.subsequence_bound(f)
            max_fejer = max(max_fejer, fejer.ratio)
            max_subsequence = max(max_subsequence, subsequence)
            fejer_rows.append([index, rank, h1, fejer.sup_norm, fejer.argmax_n, fejer.ratio, subsequence])
        summary = {
            "corpus": config.corpus,
            "max_ratio": max_ratio,
            "max_fejer_ratio": max_fejer,
            "max_subsequence_ratio": max_subsequence,
            "convergence_decreasing": decreasing,
        }
        return ExperimentReport(
            experiment=config.experiment,
            columns=["function", "rank", "n", "convergence", "bounded", "h1_norm", "ratio"],
            rows=rows, summary=summary,
            tables={"fejer": {"columns": ["function", "rank", "h1_norm", "fejer_sup", "fejer_argmax_n",
                                          "fejer_ratio", "subsequence_ratio"], "rows": fejer_rows}},
        )

    @staticmethod
    def cmd_equiv_check(config: ExperimentConfig) -> ExperimentReport:
        sys = ExperimentService.system_for(config)
        rows, violations = [], 0
        for index, (rank, f) in enumerate(ExperimentService.corpus(config, sys, sys.depth)):
            check = HardyService.check_norm_equivalence(f, config.tolerance)
            violations += int(not check.ok)
            rows.append([index, rank, check.h1_norm, check.sup_partial_norm, check.max_deviation, check.ok])
        summary = {"corpus": config.corpus, "violations": violations,
                   "max_deviation": max(row[4] for row in rows)}
        return ExperimentReport(
            experiment=config.experiment,
            columns=["function", "rank", "h1_norm", "sup_partial_norm", "max_deviation", "ok"],
            rows=rows, summary=summary, violations=violations,
        )
