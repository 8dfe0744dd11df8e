"""Command-line front end: construct, verify, paper-example, dims, foursquare."""
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional
import argparse
import json
import logging
import sys

from scrollsmith.src.certificates import (
    ConstructionCertificate,
    SweepCertificate,
    Verdict,
)
from scrollsmith.src.config import RunConfig, load_config
from scrollsmith.src.dim_tools import formula_table, stratum_table
from scrollsmith.src.errors import (
    PlanInfeasibleError,
    ScrollsmithError,
    SearchFailedError,
    UnsupportedCharacteristicError,
    UsageError,
)
from scrollsmith.src.scroll_gen import construct_scroll, four_square_plans, sweep_seeds
from scrollsmith.src.utils import FileUtils
from scrollsmith.src.verification import (
    PAPER_EXPECTATIONS,
    ScrollVerifier,
    load_paper_lambda,
    load_projection,
    matrix_checksum,
    projection_asset,
)

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INFEASIBLE = 2
EXIT_SEARCH_FAILED = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--primes", default=None, help="comma separated, e.g. 31,101")
    common.add_argument("--format", dest="output_format", choices=["json", "text"], default=None)
    common.add_argument("--config", type=Path, default=None, help="YAML configuration file")
    common.add_argument("--log-level", dest="log_level", default=None)
    common.add_argument("--progress", action="store_true", default=None)
    common.add_argument("--out", type=Path, default=None)
    return common


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = _Parser(prog="scrollsmith", description="Singular rational scrolls in cubic fourfolds")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = _common_options()

    construct = sub.add_parser("construct", parents=[common], help="build Λ with r double points")
    construct.add_argument("--r", type=int, required=True)
    construct.add_argument("--v", type=int, required=True)
    construct.add_argument("--sweep", type=int, default=None, help="run seeds seed..seed+K-1")
    construct.add_argument("--exact-clearance", dest="exact_clearance", action="store_true", default=None)
    construct.set_defaults(handler=cmd_construct, out=Path("."))

    verify = sub.add_parser("verify", parents=[common], help="verify a stored Λ")
    verify.add_argument("--lambda", dest="lambda_path", type=Path, required=True)
    verify.set_defaults(handler=cmd_verify)

    paper = sub.add_parser("paper-example", parents=[common], help="verify the shipped Λ of S_{1,8}")
    paper.set_defaults(handler=cmd_paper_example)

    dims = sub.add_parser("dims", parents=[common], help="dimension and codimension formulas")
    dims.add_argument("--D", dest="D", type=int, required=True)
    dims.add_argument("--N", dest="N", type=int, required=True)
    dims.add_argument("--r", type=int, default=0)
    dims.set_defaults(handler=cmd_dims)

    foursquare = sub.add_parser("foursquare", parents=[common], help="list chain plans for (r, v)")
    foursquare.add_argument("--r", type=int, required=True)
    foursquare.add_argument("--v", type=int, required=True)
    foursquare.set_defaults(handler=cmd_foursquare)

    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("scrollsmith: a subcommand is required")
    if args.command == "construct" and args.sweep is not None and args.sweep <= 0:
        raise UsageError("scrollsmith construct: --sweep must be positive")
    return args


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    return load_config(
        args.config,
        primes=args.primes,
        seed=args.seed,
        output_format=args.output_format,
        log_level=args.log_level,
        progress=args.progress,
        exact_clearance=getattr(args, "exact_clearance", None),
    )


def _emit(payload: Dict[str, Any], text: List[str], config: RunConfig, out: Optional[Path]) -> None:
    if out is not None:
        FileUtils.write_json_atomic(out, payload)
    if config.output_format == "text":
        print("\n".join(text))
    elif out is None:
        print(json.dumps(payload, indent=2))


def cmd_construct(args: argparse.Namespace, config: RunConfig, command: List[str]) -> int:
    if args.sweep is not None:
        seeds = range(config.seed, config.seed + args.sweep)
        sweep = sweep_seeds(args.r, args.v, seeds, config.primes, config.threads,
                            config.retry_budget, config.progress)
        certificate = SweepCertificate(
            command=command,
            config=config.to_dict(),
            outcomes=[{"seed": o.seed, "status": o.status,
                       "pair_counts": {str(p): n for p, n in o.pair_counts.items()},
                       "message": o.message} for o in sweep.outcomes],
            success_rate=sweep.success_rate,
        )
        out = args.out / "sweep.json" if args.out is not None else None
        text = [f"seed {o.seed}: {o.status}" for o in sweep.outcomes]
        text.append(f"success rate {sweep.success_rate:.2f}")
        _emit(certificate.model_dump(mode="json"), text, config, out)
        return EXIT_PASS if sweep.success_rate == 1.0 else EXIT_SEARCH_FAILED

    result = construct_scroll(
        args.r,
        args.v,
        seed=config.seed,
        primes=config.primes,
        retry_budget=config.retry_budget,
        exact_clearance=config.exact_clearance,
        progress=config.progress,
    )
    certificate = ConstructionCertificate(
        command=command,
        config=config.to_dict(),
        spec=result.spec.to_dict(),
        plan=result.plan.to_dict(),
        lambda_checksum=matrix_checksum(result.projection.matrix),
        reports={str(p): report.to_dict() for p, report in result.reports.items()},
        verdict=Verdict.PASS,
    )
    if args.out is not None:
        FileUtils.write_json_atomic(args.out / "lambda.json", projection_asset(result.projection))
    out = args.out / "report.json" if args.out is not None else None
    text = [f"plan {list(result.plan.sizes)}"]
    text += [f"GF({p}): {rep.pair_count} pairs, tangent clearance {rep.tangent_clearance}"
             for p, rep in result.reports.items()]
    _emit(certificate.model_dump(mode="json"), text, config, out)
    return EXIT_PASS


def _run_verifier(verifier: ScrollVerifier, projection, config: RunConfig, out: Optional[Path]) -> int:
    certificate = verifier.verify(projection)
    text = []
    for prime, section in certificate.primes.items():
        for stage in section.stages:
            mark = "ok  " if stage.passed else "FAIL"
            text.append(f"[{mark}] GF({prime}) {stage.stage}: {stage.observed}")
    for stage in certificate.stages:
        mark = "ok  " if stage.passed else "FAIL"
        text.append(f"[{mark}] {stage.stage}: {stage.observed}")
    text.append(f"verdict {certificate.verdict.value}")
    _emit(certificate.model_dump(mode="json"), text, config, out)
    return EXIT_PASS if certificate.verdict == Verdict.PASS else EXIT_FAIL


def cmd_verify(args: argparse.Namespace, config: RunConfig, command: List[str]) -> int:
    projection = load_projection(args.lambda_path)
    return _run_verifier(ScrollVerifier(config, command=command), projection, config, args.out)


def cmd_paper_example(args: argparse.Namespace, config: RunConfig, command: List[str]) -> int:
    bad = [p for p in config.primes if p in (2, 3)]
    if bad:
        raise UsageError(f"primes {bad} divide 6; the example needs polarization")
    verifier = ScrollVerifier(config, expected=PAPER_EXPECTATIONS, command=command)
    return _run_verifier(verifier, load_paper_lambda(), config, args.out)


def cmd_dims(args: argparse.Namespace, config: RunConfig, command: List[str]) -> int:
    formulas = formula_table(args.D, args.N, args.r)
    strata = stratum_table(args.D, args.N)
    payload = {
        "command": command,
        "D": args.D,
        "N": args.N,
        "r": args.r,
        "formulas": {row.quantity: _plain(row.value) for row in formulas.itertuples()},
        "strata": json.loads(strata.to_json(orient="records")),
    }
    text = [formulas.to_string(index=False), "", strata.to_string(index=False)]
    _emit(payload, text, config, args.out)
    return EXIT_PASS


def cmd_foursquare(args: argparse.Namespace, config: RunConfig, command: List[str]) -> int:
    plans = four_square_plans(args.r, args.v)
    payload = {"command": command, "r": args.r, "v": args.v, "plans": [list(plan) for plan in plans]}
    text = [" ".join(str(k) for k in plan) for plan in plans] or ["no plan"]
    _emit(payload, text, config, args.out)
    return EXIT_PASS if plans else EXIT_INFEASIBLE


def _plain(value: Any) -> Any:
    """numpy scalars from pandas rows as plain Python values."""
    return value.item() if hasattr(value, "item") else value


_EXIT_CODES: Dict[type, int] = {
    UsageError: EXIT_USAGE,
    UnsupportedCharacteristicError: EXIT_USAGE,
    PlanInfeasibleError: EXIT_INFEASIBLE,
    SearchFailedError: EXIT_SEARCH_FAILED,
}


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    command = ["scrollsmith"] + argv
    try:
        args = _parse_args(argv)
        config = _resolve_config(args)
    except (UsageError, ValueError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    handler: Callable[..., int] = args.handler
    try:
        return handler(args, config, command)
    except ScrollsmithError as e:
        code = next((c for kind, c in _EXIT_CODES.items() if isinstance(e, kind)), EXIT_FAIL)
        logger.error(f"{args.command} failed ({type(e).__name__}): {e}")
        print(str(e), file=sys.stderr)
        return code
    except ValueError as e:
        logger.error(f"{args.command} rejected its arguments: {e}")
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"{args.command} could not access a file: {e}")
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
