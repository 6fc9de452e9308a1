import argparse
import logging
import sys
from typing import List, Optional

from Config import LOG_LEVEL, TOOL_NAME, VERSION, build_config
from Service.base_service import VilenkinError
from Service.experiment_service import ExperimentService
from Service.output_service import write_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2

logger = logging.getLogger(TOOL_NAME)


class UsageParser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with EXIT_USAGE"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("global options")
    group.add_argument("--config", help="key=value config file (CLI flags take precedence)")
    group.add_argument("--radix", help="radix spec, e.g. '2,3,4' or '2^10'")
    group.add_argument("--depth", type=int, help="truncation depth N")
    group.add_argument("--threads", type=int, help="worker threads")
    group.add_argument("--seed", type=int, help="seed for randomized corpora")
    group.add_argument("--out", help="output path (stdout when omitted)")
    group.add_argument("--format", choices=["csv", "json"], help="report format")
    group.add_argument("--tolerance", type=float, help="equality tolerance (default 1e-9)")
    group.add_argument("--oracle-tolerance", type=float, help="oracle tolerance (default 1e-10)")
    group.add_argument("--verify", action="store_true", default=None, help="cross-check against the naive oracle")
    group.add_argument("--log-level", default=LOG_LEVEL, help="logging level (default from VILENKIN_LOG_LEVEL)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = global_flags()
    parser = UsageParser(prog=TOOL_NAME, description="Exact harmonic analysis on bounded Vilenkin groups")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {VERSION}")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=UsageParser)

    # ========== TRANSFORM ==========
    p = sub.add_parser("transform", parents=[parent], help="Vilenkin-Fourier transform of a JSON step function")
    p.add_argument("--input", required=True, help="StepFunction (or SpectralVector with --inverse) JSON file")
    p.add_argument("--inverse", action="store_true", default=None, help="reconstruct from coefficients")

    # ========== KERNEL ==========
    p = sub.add_parser("kernel", parents=[parent], help="Dirichlet or Fejer kernel as JSON")
    p.add_argument("--n", type=int, required=True, help="kernel index")
    p.add_argument("--fejer", action="store_true", default=None, help="Fejer kernel instead of Dirichlet")

    # ========== LEBESGUE SCAN ==========
    p = sub.add_parser("lebesgue-scan", parents=[parent], help="two-sided Lebesgue constant bound scan")
    p.add_argument("--n-start", type=int, help="first n (default 1)")
    p.add_argument("--n-stop", type=int, help="stop before this n (default M_N)")

    # ========== AVERAGE VARIATION ==========
    p = sub.add_parser("lemma1", parents=[parent], help="averages of v over [1, M_n)")
    p.add_argument("--levels", type=int, help="largest level n (default N)")

    # ========== DIVERGENCE ==========
    p = sub.add_parser("divergence", parents=[parent], help="counterexample window averages")
    p.add_argument("--alphas", help="explicit block list, e.g. 1,4,9")
    p.add_argument("--alpha-rule", choices=["k4", "k2"], help="named block rule (default k4)")
    p.add_argument("--terms", type=int, help="number of blocks K for --alpha-rule")

    # ========== GAT / EQUIVALENCE ==========
    p = sub.add_parser("gat", parents=[parent], help="logarithmic means and Fejer check on a random corpus")
    p.add_argument("--corpus", type=int, help="corpus size (default 50)")
    p.add_argument("--rank", type=int, help="fixed rank (default cycles 1..min(4, N))")

    p = sub.add_parser("equiv-check", parents=[parent], help="f* against sup_n |S_{M_n} f| on a random corpus")
    p.add_argument("--corpus", type=int, help="corpus size (default 50)")
    p.add_argument("--rank", type=int, help="fixed rank (default cycles 1..N)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    overrides = {k: v for k, v in vars(args).items() if k not in ("experiment", "config", "log_level")}
    try:
        config = build_config(args.experiment, overrides, args.config)
        report = ExperimentService.run(config)
        system = ExperimentService.system_for(config)
        for path in write_report(report, config, system.label(), system.depth):
            logger.info("wrote %s", path)
    except VilenkinError as e:
        print(f"{TOOL_NAME}: error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"{TOOL_NAME}: error: cannot write output: {e}", file=sys.stderr)
        return EXIT_USAGE

    if report.violations:
        print(f"{TOOL_NAME}: {report.violations} verification violation(s)", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
