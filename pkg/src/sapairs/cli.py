"""Command line: ``sapairs {check,search,experiment,reduce,obstruct}``.

Exit codes: 0 success, 2 hypothesis check failed, 3 budget exhausted,
4 input error.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import __version__
from .exact import ARCHIMEDEAN, CoefficientError, format_scalar, parse_rational
from .instance import InstanceError, instance_digest, instance_to_doc, load_instance
from .local import check_hypotheses
from .report import Report, emit, search_row
from .search import (
    EXHAUSTED,
    PreconditionError,
    SearchBudget,
    epsilon_experiment,
    obstruction_scan,
    reduce_dimension,
    search_witness,
)

EXIT_OK, EXIT_HYPOTHESIS, EXIT_EXHAUSTED, EXIT_INPUT = 0, 2, 3, 4
DEFAULT_SEED = 20240611


class UsageError(ValueError):
    pass


def _positive_rational(text: str) -> Fraction:
    try:
        q = parse_rational(text)
    except (CoefficientError, ValueError) as exc:
        raise UsageError(f"bad rational {text!r}: {exc}") from None
    if q <= 0:
        raise UsageError(f"epsilon must be positive, got {text!r}")
    return q


def _eps_p(items, primes) -> dict:
    out = {p: [] for p in primes}
    for item in items or []:
        place, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--eps-p expects PLACE=RAT, got {item!r}")
        try:
            p = int(place)
        except ValueError:
            raise UsageError(f"--eps-p place {place!r} is not a prime of the instance") from None
        if p not in out:
            raise UsageError(f"--eps-p place {p} is not a finite place of the instance")
        out[p].append(_positive_rational(val))
    return out


def _schedule(args, inst, single: bool) -> list:
    arch = [_positive_rational(e) for e in args.eps_arch or []]
    finite = _eps_p(args.eps_p, inst.primes)
    if not arch:
        raise UsageError("missing --eps-arch")
    for p, vals in finite.items():
        if not vals:
            raise UsageError(f"missing --eps-p {p}=RAT")
    if single and (len(arch) > 1 or any(len(v) > 1 for v in finite.values())):
        raise UsageError("search takes one epsilon per place (use experiment for schedules)")
    combos = [[]]
    for p in inst.primes:
        combos = [c + [(p, v)] for c in combos for v in finite[p]]
    return [{ARCHIMEDEAN: a, **dict(c)} for a in arch for c in combos]


def _config(args, schedule=None) -> dict:
    cfg = {"mode": args.mode, "instance": args.instance, "seed": args.seed}
    if getattr(args, "budget", None) is not None:
        cfg["budget"] = args.budget
    if schedule is not None:
        cfg["schedule"] = [{str(s): format_scalar(e) for s, e in row.items()} for row in schedule]
    for key in ("height", "samples", "override"):
        if getattr(args, key, None) not in (None, False):
            cfg[key] = getattr(args, key)
    return cfg


def run(args) -> Report:
    """Execute one configured run and return its report (never raises on bad input)."""
    t0 = time.perf_counter()
    report = Report(version=__version__, digest="", mode=args.mode, config={"mode": args.mode})
    try:
        inst = load_instance(args.instance)
    except InstanceError as exc:
        report.status, report.exit_code, report.errors = "INPUT_ERROR", EXIT_INPUT, exc.errors
        return report
    report.digest = instance_digest(inst)
    try:
        _dispatch(args, inst, report)
    except UsageError as exc:
        report.status, report.exit_code, report.errors = "INPUT_ERROR", EXIT_INPUT, [str(exc)]
    except PreconditionError as exc:
        report.status, report.exit_code, report.errors = "HYPOTHESIS_FAILED", EXIT_HYPOTHESIS, [str(exc)]
    report.timings = {"total_s": round(time.perf_counter() - t0, 6)}
    return report


def _dispatch(args, inst, report: Report) -> None:
    mode = args.mode
    budget = SearchBudget(max_steps=args.budget, seed=args.seed) if hasattr(args, "budget") else None
    if mode == "check":
        report.config = _config(args)
        rep = check_hypotheses(inst)
        report.rows.append({"hypotheses": rep.to_dict()})
        ok = rep.passed
        report.status = "PASS" if ok else "FAIL"
        report.exit_code = EXIT_OK if ok else EXIT_HYPOTHESIS
        return

    if mode in ("search", "experiment"):
        schedule = _schedule(args, inst, single=mode == "search")
        report.config = _config(args, schedule)
        if mode == "search":
            res = search_witness(inst, schedule[0], budget, override=args.override)
            report.rows.append(search_row(0, schedule[0], res))
            ok = res.found
        else:
            rows = epsilon_experiment(inst, schedule, budget, override=args.override)
            for k, row in enumerate(rows):
                report.rows.append(search_row(k, row.eps, row.result, row.reused))
            ok = all(r.result.found for r in rows)
        report.status = "FOUND" if ok else EXHAUSTED
        report.exit_code = EXIT_OK if ok else EXIT_EXHAUSTED
        return

    if mode == "reduce":
        report.config = _config(args)
        res = reduce_dimension(inst, max_samples=args.samples, seed=args.seed)
        if res == EXHAUSTED:
            report.rows.append({"samples": args.samples, "status": EXHAUSTED})
            report.status, report.exit_code = EXHAUSTED, EXIT_EXHAUSTED
            return
        row = res.to_dict()
        row["restricted_instance"] = instance_to_doc(res.instance)
        row["restricted_digest"] = instance_digest(res.instance)
        report.rows.append(row)
        report.status, report.exit_code = "REDUCED", EXIT_OK
        return

    if mode == "obstruct":
        report.config = _config(args)
        res = obstruction_scan(inst, args.height)
        report.rows.append(res.to_dict())
        report.status = res.status if res.holds else "FLOOR_VIOLATED"
        report.exit_code = EXIT_OK if res.holds else 1
        return
    raise UsageError(f"unknown mode {mode!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sapairs", description="Workbench for S-arithmetic pairs (Q, L).")
    ap.add_argument("--version", action="version", version=f"sapairs {__version__}")
    sub = ap.add_subparsers(dest="mode", required=True)

    def common(sp):
        sp.add_argument("--instance", required=True, help="instance JSON path, or builtin:NAME")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--no-plot", action="store_true", help="skip the PNG written next to --out")

    def eps(sp):
        sp.add_argument("--eps-arch", action="append", metavar="RAT")
        sp.add_argument("--eps-p", action="append", metavar="PLACE=RAT")
        sp.add_argument("--budget", type=int, default=10**7, help="max enumeration steps per search")
        sp.add_argument("--override", action="store_true", help="search even if the hypotheses fail")

    common(sub.add_parser("check", help="decide conditions (1)-(3)"))
    sp = sub.add_parser("search", help="look for one witness")
    common(sp)
    eps(sp)
    sp = sub.add_parser("experiment", help="search along an epsilon schedule (cross product)")
    common(sp)
    eps(sp)
    sp = sub.add_parser("reduce", help="restrict an n >= 5 instance to a rational hyperplane")
    common(sp)
    sp.add_argument("--samples", type=int, default=10**4)
    sp = sub.add_parser("obstruct", help="product-formula scan for a rational pencil")
    common(sp)
    sp.add_argument("--height", type=int, default=20)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "budget", 1) < 0 or getattr(args, "samples", 1) < 0:
        print("budget and samples must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    report = run(args)
    text = emit(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        if not args.no_plot and report.exit_code in (EXIT_OK, EXIT_EXHAUSTED):
            from .plotting import render

            render(report, args.out)
    else:
        sys.stdout.write(text)
    for err in report.errors:
        print(f"error: {err}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
