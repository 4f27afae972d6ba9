"""Command-line entry point: ``esbound <command> [options]``.

Every command writes line-delimited JSON records to stdout (``--table`` for a
human-readable rendering) and finishes with a manifest record carrying the
parameters, precision, wall clock and a digest of the payload lines.

Exit codes: 0 success, 1 verified-false / counterexample, 2 usage error,
3 budget exhausted, 4 indeterminate at maximum precision.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from typing import Callable, Iterator

from . import __version__, config
from .bound import (
    PipelineConfig,
    Strategy,
    Verdict,
    exponent_bound,
    small_k_status,
    verify_theorem_range,
)
from .certified import theta_table
from .errors import (
    BudgetExceeded,
    FactorizationError,
    PrecisionExhausted,
    PreconditionError,
    VerificationFailed,
)
from .frey import analyze, level_bound
from .progression import (
    CurveInstance,
    attribute_family,
    search_integer_solutions,
    search_rational_points,
)
from .reduction import (
    TernaryTriple,
    decompose_progression,
    normalize_triple,
    reduce_at_p,
    verify_conditions,
)
from .serialize import digest, dumps, to_jsonable

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_BUDGET, EXIT_INDETERMINATE = 0, 1, 2, 3, 4

SCHOENFELD = Fraction(1000081, 1000000)


class _Failed(Exception):
    """Raised by a command after emitting its records when the verdict is negative."""

    def __init__(self, code: int):
        self.code = code


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# commands: each yields payload records ------------------------------------------


def cmd_search(args) -> Iterator[dict]:
    curve = CurveInstance(args.k, args.ell)
    points = search_rational_points(curve, args.height, threads=args.threads)
    counts = {"trivial": 0, "attributed": 0, "unattributed": 0}
    for pt in points:
        family = attribute_family(pt, curve)
        if pt.trivial:
            counts["trivial"] += 1
        elif family:
            counts["attributed"] += 1
        else:
            counts["unattributed"] += 1
        yield {"record": "point", "x": pt.x, "y": pt.y, "trivial": pt.trivial, "family": family}
    yield {"record": "summary", "k": args.k, "ell": args.ell, "height": args.height, "points": len(points), **counts}


def cmd_reduce(args) -> Iterator[dict]:
    dec = decompose_progression(args.n, args.d, args.k, args.ell)
    for i, (value, (a_i, z_i)) in enumerate(zip(dec.values(), dec.terms)):
        yield {"record": "term", "i": i, "value": value, "a": a_i, "z": z_i}
    triple, case = reduce_at_p(args.n, args.d, args.k, args.ell, args.p)
    yield {"record": "reduction", "case": str(case), "triple": triple.as_tuple(), "ell": triple.ell, "terms": triple.terms}
    normal = normalize_triple(triple)
    yield {"record": "normalized", "triple": normal.as_tuple(), "terms": normal.terms}
    report = verify_conditions(triple, args.k, args.p)
    yield {
        "record": "conditions",
        **{name: {"holds": c.holds, "witness": c.witness} for name, c in report.items()},
    }


def _parse_triple(args) -> TernaryTriple:
    values = args.triple
    if len(values) != 6:
        raise PreconditionError(f"--triple needs six integers a,b,c,u,v,w; got {len(values)}")
    return TernaryTriple(*values, ell=args.ell)


def cmd_frey(args) -> Iterator[dict]:
    t = _parse_triple(args)
    result = analyze(t, args.q or [])
    E = result["curve"]
    yield {"record": "curve", "A": E.A, "B": E.B, "discriminant": result["discriminant"]}
    for q, rt, trace in result["local"]:
        rec = {"record": "local", "q": q, "reduction": rt}
        if trace is not None:
            rec.update(a_q=trace.a_q, point_count=trace.point_count)
        yield rec
    if args.k is not None and args.p is not None:
        yield {"record": "level", **to_jsonable(level_bound(t, args.k, args.p))}


def _pipeline_config(args, k_min: int, k_max: int) -> PipelineConfig:
    return PipelineConfig(
        k_min=k_min,
        k_max=k_max,
        p_strategy=Strategy(args.strategy),
        precision=args.precision,
        coefficient_primes=tuple(getattr(args, "coeff_primes", None) or ()),
        allow_small_k=getattr(args, "allow_small_k", False),
    )


def cmd_bound(args) -> Iterator[dict]:
    cfg = _pipeline_config(args, args.k, args.k)
    report = exponent_bound(args.k, cfg)
    yield {"record": "bound", **to_jsonable(report)}
    if report.verdict is Verdict.FAILED:
        raise _Failed(EXIT_FALSE)
    if report.verdict is Verdict.INDETERMINATE:
        raise _Failed(EXIT_INDETERMINATE)


def cmd_verify(args) -> Iterator[dict]:
    cfg = _pipeline_config(args, args.kmin, args.kmax)
    try:
        summary = verify_theorem_range(cfg, threads=args.threads)
    except VerificationFailed as exc:
        yield {"record": "bound", **to_jsonable(exc.report)}
        raise _Failed(EXIT_FALSE) from None
    for r in summary.reports:
        if args.full:
            yield {"record": "bound", **to_jsonable(r)}
        else:
            yield {
                "record": "k",
                "k": r.k,
                "p": r.p_chosen,
                "verdict": r.verdict,
                "log_log_ell_bound": r.log_log_ell_bound,
                "threshold_log": r.threshold_log,
            }
    yield {
        "record": "summary",
        "kmin": args.kmin,
        "kmax": args.kmax,
        "count": len(summary.reports),
        "all_certified": summary.all_certified,
        "max_ratio": f"{10 ** summary.max_log10_ratio:.6e}" if summary.max_log10_ratio > -300 else "0",
        "max_log10_ratio": f"{summary.max_log10_ratio:.6f}",
        "argmax_k": summary.argmax_k,
    }


def cmd_theta(args) -> Iterator[dict]:
    if args.limit < 2:
        raise PreconditionError("--limit must be >= 2")
    budget = config.sieve_limit()
    if args.limit > budget:
        raise BudgetExceeded(f"limit {args.limit} exceeds sieve budget {budget}")
    table = theta_table(args.limit, args.precision)
    ok, argmax, ratio = table.max_ratio(SCHOENFELD)
    yield {
        "record": "theta",
        "limit": args.limit,
        "theta": table.theta(args.limit),
        "prime_count": len(table.primes),
        "schoenfeld_constant": SCHOENFELD,
        "schoenfeld_holds": ok,
        "max_ratio_upper": ratio,
        "max_ratio_approx": f"{float(ratio):.12f}",
        "argmax_prime": argmax,
    }
    if not ok:
        raise _Failed(EXIT_FALSE)


def cmd_es_check(args) -> Iterator[dict]:
    found = search_integer_solutions(args.kmax, args.xmax, args.ellmax, negative=args.negative, threads=args.threads)
    nontrivial = 0
    for s in found:
        nontrivial += not s.trivial
        yield {"record": "solution", "x": s.x, "k": s.k, "ell": s.ell, "y": s.y, "trivial": s.trivial}
    yield {
        "record": "summary",
        "kmax": args.kmax,
        "xmax": args.xmax,
        "ellmax": args.ellmax,
        "negative": args.negative,
        "solutions": len(found),
        "nontrivial": nontrivial,
    }
    if nontrivial:
        raise _Failed(EXIT_FALSE)


def cmd_small_k(args) -> Iterator[dict]:
    yield {"record": "citation", **to_jsonable(small_k_status(args.k))}


# parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="table", action="store_false", help="JSON lines output (default)")
    fmt.add_argument("--table", dest="table", action="store_true", help="human-readable output")
    common.add_argument("--threads", type=int, default=1, help="worker processes for independent work items")
    common.set_defaults(table=False)

    prec = argparse.ArgumentParser(add_help=False)
    prec.add_argument("--precision", type=int, default=None, help="bits (default: $PPL_PRECISION_BITS or 256)")
    prec.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.LARGEST_PRIME.value)

    parser = argparse.ArgumentParser(prog="esbound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", parents=[common], help="rational points of bounded height")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("reduce", parents=[common], help="ternary equation from a progression")
    for name in ("n", "d", "k", "ell", "p"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("frey", parents=[common], help="Frey curve analysis of a triple")
    p.add_argument("--triple", type=_int_list, required=True, help="a,b,c,u,v,w")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--q", type=_int_list, default=[], help="odd primes, comma separated")
    p.add_argument("--k", type=int, default=None, help="with --p, also report the level bound")
    p.add_argument("--p", type=int, default=None)
    p.set_defaults(func=cmd_frey)

    p = sub.add_parser("bound", parents=[common, prec], help="certified exponent bound for one k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--coeff-primes", type=_int_list, default=None, help="primes of b in x...(x+k-1) = b y^ell")
    p.add_argument("--allow-small-k", action="store_true", help="evaluate the formula below k = 35 (non-theorem)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", parents=[common, prec], help="certify log(ell) < 3^k for a range of k")
    p.add_argument("--kmin", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--full", action="store_true", help="emit full per-k reports")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("theta", parents=[common], help="certify theta(k) < 1.000081 k up to a limit")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--precision", type=int, default=None)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("es-check", parents=[common], help="integer products of consecutive integers that are powers")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--xmax", type=int, required=True)
    p.add_argument("--ellmax", type=int, required=True)
    p.add_argument("--negative", action="store_true", help="start the scan at x = -xmax")
    p.set_defaults(func=cmd_es_check)

    p = sub.add_parser("small-k", parents=[common], help="which earlier result settles 2 <= k <= 34")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_small_k)
    return parser


def _render_table(line_records: list[dict]) -> str:
    out = []
    for rec in line_records:
        kind = rec.get("record", "")
        fields = []
        for key, value in rec.items():
            if key == "record":
                continue
            if isinstance(value, dict) and "approx" in value:
                value = f"~{value['approx']}"
            elif isinstance(value, (dict, list)):
                value = dumps(value) if isinstance(value, dict) else ",".join(map(str, value))
            fields.append(f"{key}={value}")
        out.append(f"{kind:<12} " + "  ".join(fields))
    return "\n".join(out)


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "table", "command")}


def run(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func: Callable[..., Iterator[dict]] = args.func
    start = time.perf_counter()
    lines: list[str] = []
    records: list[dict] = []
    code = EXIT_OK
    try:
        for rec in func(args):
            records.append(to_jsonable(rec))
            lines.append(dumps(rec))
    except _Failed as exc:
        code = exc.code
    except PreconditionError as exc:
        print(f"esbound {args.command}: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (BudgetExceeded, FactorizationError) as exc:
        print(f"esbound {args.command}: budget exhausted: {exc}", file=stderr)
        return EXIT_BUDGET
    except PrecisionExhausted as exc:
        print(f"esbound {args.command}: indeterminate: {exc}", file=stderr)
        return EXIT_INDETERMINATE
    manifest = {
        "record": "manifest",
        "command": args.command,
        "params": _params(args),
        "version": __version__,
        "precision_bits": getattr(args, "precision", None) or config.precision_bits(),
        "sieve_limit": config.sieve_limit(),
        "wall_clock_s": f"{time.perf_counter() - start:.3f}",
        "result_digest": digest(lines),
        "exit_code": code,
    }
    if args.table:
        print(_render_table(records), file=stdout)
        print(_render_table([to_jsonable(manifest)]), file=stdout)
    else:
        for line in lines:
            print(line, file=stdout)
        print(dumps(manifest), file=stdout)
    return code


def main(argv=None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
