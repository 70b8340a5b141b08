"""Command line front end: ``weyl-lab {count,zeta,remainder,divisor,sharpness,fit}``.

Series are written as CSV with the header ``tau,count,leading,remainder,normalized``
(floats at 17 significant digits, counts as exact integers) or as JSON with
``meta`` and ``rows``. Output is assembled in full before anything is written,
so a failure never leaves a partial file. Errors are printed to stderr as a
JSON object and mapped to exit codes: 2 usage, 3 domain, 4 budget or
tolerance, 5 overflow, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .asymptotics import EXAMPLES, asymptotic_law, classify, fit_exponent, remainder_series, sharpness_suite
from .config import RunConfig
from .counting import CountingSample, count
from .divisor import (
    DivisorQuery,
    anisotropic_bruteforce,
    anisotropic_count,
    anisotropic_main_term,
    dirichlet_main_term,
    divisor_bruteforce,
    divisor_summatory,
)
from .errors import WeylLabError
from .grid import GridSpec, parse_grid
from .parser import parse_factor, parse_operator, render
from .zeta import spectral_zeta

CSV_HEADER = "tau,count,leading,remainder,normalized"


class UsageError(Exception):
    exit_code = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _json_num(x):
    if x is None or isinstance(x, int):
        return x
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


def _number(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return value


def _positive(text: str) -> Fraction:
    value = _number(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _grid(text: str) -> GridSpec:
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def render_rows(rows: Sequence[CountingSample], fmt: str, meta: dict) -> str:
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in rows:
            lines.append(",".join(_fmt(v) for v in (r.tau, r.count, r.leading, r.remainder, r.normalized_remainder)))
        return "\n".join(lines) + "\n"
    payload = {
        "meta": meta,
        "rows": [
            {
                "tau": _json_num(r.tau),
                "count": r.count,
                "leading": _json_num(r.leading),
                "remainder": _json_num(r.remainder),
                "normalized": _json_num(r.normalized_remainder),
            }
            for r in rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _render_record(record: dict, fmt: str) -> str:
    if fmt == "csv":
        keys = list(record)
        return ",".join(keys) + "\n" + ",".join(_fmt(record[k]) for k in keys) + "\n"
    return json.dumps({k: _json_num(v) if not isinstance(v, str) else v for k, v in record.items()}, indent=2) + "\n"


def _law_meta(law) -> dict:
    return {
        "case": law.case.value,
        "leading_coeff": law.leading_coeff,
        "leading_exp": str(law.leading_exp),
        "remainder_exp": str(law.remainder_exp),
        "remainder_log_power": law.remainder_log_power,
    }


# ---------------------------------------------------------------------------
# commands; each returns the full output text
# ---------------------------------------------------------------------------


def cmd_count(args, cfg: RunConfig) -> str:
    op = parse_operator(args.expr, cfg.s1_zero_mode_mult)
    n = count(op, args.tau, args.method, budget=cfg.work_budget)
    return f"{n}\n"


def cmd_zeta(args, cfg: RunConfig) -> str:
    spec = parse_factor(args.expr, cfg.s1_zero_mode_mult)
    z = spectral_zeta(spec, args.s, cfg.tolerance, budget=cfg.work_budget)
    return _render_record({"value": z.value, "tail_bound": z.tail_bound, "terms_used": z.terms_used}, cfg.output_format)


def _series(args, cfg: RunConfig):
    op = parse_operator(args.expr, cfg.s1_zero_mode_mult)
    taus = args.grid.values(op)
    if not taus:
        raise UsageError("the grid contains no sample points")
    law = asymptotic_law(op, cfg.tolerance)
    rows = remainder_series(op, taus, law=law, method=args.method, threads=cfg.threads)
    meta = {"expression": render(op), **_law_meta(law), "grid": vars(args.grid), "config": cfg.as_dict()}
    return op, law, rows, meta


def cmd_remainder(args, cfg: RunConfig) -> str:
    _, _, rows, meta = _series(args, cfg)
    return render_rows(rows, cfg.output_format, meta)


def cmd_fit(args, cfg: RunConfig) -> str:
    _, law, rows, _ = _series(args, cfg)
    k = law.remainder_log_power if args.log_power is None else args.log_power
    theta, conf = fit_exponent(rows, args.tail_fraction, log_power=k)
    return _render_record(
        {"theta": theta, "confidence": conf, "predicted": float(law.remainder_exp), "log_power": k},
        cfg.output_format,
    )


def cmd_divisor(args, cfg: RunConfig) -> str:
    classical = args.alpha == 1 and args.beta == 1
    q = DivisorQuery(args.tau, args.alpha, args.beta)
    method = args.method
    if method == "bruteforce":
        n = divisor_bruteforce(q.tau, budget=cfg.work_budget) if classical else anisotropic_bruteforce(q, budget=cfg.work_budget)
    elif classical and method in ("auto", "hyperbola"):
        n = divisor_summatory(q.tau)
    else:
        n = anisotropic_count(q, "direct" if method in ("auto", "hyperbola") else method, budget=cfg.work_budget)
    if not args.with_main:
        return f"{n}\n"
    tau = float(q.tau)
    if classical:
        main, scale = dirichlet_main_term(tau), math.sqrt(tau)
    else:
        main, scale = anisotropic_main_term(q), tau ** float(1 / (q.alpha + q.beta))
    row = CountingSample(tau, n, main, n - main, (n - main) / scale)
    meta = {"alpha": str(q.alpha), "beta": str(q.beta), "method": method, "config": cfg.as_dict()}
    return render_rows([row], cfg.output_format, meta)


def cmd_sharpness(args, cfg: RunConfig) -> str:
    report = sharpness_suite(
        args.example,
        args.grid,
        tail_fraction=args.tail_fraction,
        zero_mode_mult=cfg.s1_zero_mode_mult,
        tol=cfg.tolerance,
        threads=cfg.threads,
    )
    rows = sorted(report.samples + report.breakpoint_samples, key=lambda r: r.tau)
    meta = {**report.summary(), "grid": vars(args.grid) if args.grid else None, "config": cfg.as_dict()}
    return render_rows(rows, cfg.output_format, meta)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _global_options(parser: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = parser.add_argument_group("global options")
    g.add_argument("--tol", type=float, default=d(1e-8), help="zeta tolerance (default 1e-8)")
    g.add_argument("--budget", type=int, default=d(10**8), help="work budget in tuples or steps (default 1e8)")
    g.add_argument("--s1-zero-mode-mult", type=int, choices=(1, 2), default=d(2),
                   help="multiplicity of the constant mode on the circle (default 2)")
    g.add_argument("--format", choices=("csv", "json"), default=d("csv"), help="output format (default csv)")
    g.add_argument("--out", default=d(None), help="write output to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weyl-lab", description="Counting functions, zeta values and Weyl remainders of model operators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        _global_options(p, suppress=True)
        return p

    p = add("count", "exact eigenvalue count N(tau) of a tensor product")
    p.add_argument("expr")
    p.add_argument("--tau", type=_positive, required=True)
    p.add_argument("--method", choices=("recursive", "bruteforce"), default="recursive")
    p.set_defaults(func=cmd_count)

    p = add("zeta", "spectral zeta function of a single factor")
    p.add_argument("expr")
    p.add_argument("--s", type=_number, required=True)
    p.set_defaults(func=cmd_zeta)

    for name, func, text in (
        ("remainder", cmd_remainder, "remainder series over a tau grid"),
        ("fit", cmd_fit, "fit the remainder exponent over a tau grid"),
    ):
        p = add(name, text)
        p.add_argument("expr")
        p.add_argument("--grid", type=_grid, required=True, help="KIND:START:STOP:POINTS, KIND in geometric|linear|breakpoints")
        p.add_argument("--method", choices=("recursive", "bruteforce"), default="recursive")
        if name == "fit":
            p.add_argument("--tail-fraction", type=float, default=0.5)
            p.add_argument("--log-power", type=int, default=None,
                           help="log power divided out before fitting (default: the predicted one)")
        p.set_defaults(func=func)

    p = add("divisor", "Dirichlet or anisotropic divisor count below tau")
    p.add_argument("--tau", type=_positive, required=True)
    p.add_argument("--alpha", type=_positive, default=Fraction(1))
    p.add_argument("--beta", type=_positive, default=Fraction(1))
    p.add_argument("--method", choices=("auto", "hyperbola", "direct", "split", "bruteforce"), default="auto")
    p.add_argument("--with-main", action="store_true", help="also print the main term and normalized remainder")
    p.set_defaults(func=cmd_divisor)

    p = add("sharpness", "sharpness report for example B, C or D")
    p.add_argument("example", choices=sorted(EXAMPLES))
    p.add_argument("--grid", type=_grid, default=None, help="default geometric:1e3:1e6:200")
    p.add_argument("--tail-fraction", type=float, default=0.25)
    p.set_defaults(func=cmd_sharpness)
    return parser


def _fail(exc: BaseException, code: int) -> int:
    obj = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(obj) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig.from_args(args)
        text = args.func(args, cfg)
    except UsageError as exc:
        return _fail(exc, 2)
    except WeylLabError as exc:
        return _fail(exc, exc.exit_code)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        return _fail(exc, 2)
    except Exception as exc:  # noqa: BLE001 - every failure becomes a structured error
        return _fail(exc, 1)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the flush at exit
            sys.stdout = open(os.devnull, "w")
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
