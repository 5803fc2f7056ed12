"""Command-line front end.

Exit codes::

    0  certified and the empirical fit passed (selftest: every criterion passed)
    1  input error: unparsable equation, unreadable file, bad flag value
    2  rejected: some hypothesis failed (the report lists which)
    3  numeric failure, or a certified equation whose fit did not pass
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .classify import Retro, check_retro
from .fixpoint import solve
from .report import analyze
from .term import ParseError, parse

__all__ = ["RunConfig", "ConfigError", "main", "cmd_analyze", "cmd_coeffs", "cmd_selftest"]

EXIT_OK, EXIT_INPUT, EXIT_REJECTED, EXIT_NUMERIC = 0, 1, 2, 3

ORDER_RANGE = (32, 2048)
TOL_RANGE = (1e-12, 1e-4)
DEFAULT_ORDER = 600
ORDER_ENV = "POLYA_ORDER"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    order: int = DEFAULT_ORDER
    tol: float = 1e-8
    fit_threshold: float = 0.05
    output: str = "text"
    m_max: int = 400

    def __post_init__(self):
        lo, hi = ORDER_RANGE
        if not lo <= self.order <= hi:
            raise ConfigError(f"order {self.order} outside [{lo}, {hi}]")
        lo, hi = TOL_RANGE
        if not lo <= self.tol <= hi:
            raise ConfigError(f"tolerance {self.tol:g} outside [{lo:g}, {hi:g}]")
        if not 0 < self.fit_threshold < 1:
            raise ConfigError("fit threshold must lie in (0, 1)")
        if self.output not in ("text", "json"):
            raise ConfigError(f"unknown output format {self.output!r}")
        if self.m_max < 8:
            raise ConfigError("m-max must be at least 8")


def default_order(environ=os.environ) -> int:
    raw = environ.get(ORDER_ENV)
    if raw is None:
        return DEFAULT_ORDER
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{ORDER_ENV}={raw!r} is not an integer") from None


def _config(args) -> RunConfig:
    order = args.order if args.order is not None else default_order()
    return RunConfig(
        order=order,
        tol=args.tol,
        fit_threshold=getattr(args, "fit_threshold", 0.05),
        output="json" if getattr(args, "json", False) else "text",
        m_max=getattr(args, "m_max", 400),
    )


def _read_equation(args) -> str:
    if args.file and args.equation:
        raise ConfigError("give either an inline equation or -f FILE, not both")
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read {args.file}: {e.strerror}") from None
    if args.equation:
        if os.path.isfile(args.equation) and "=" not in args.equation:
            with open(args.equation, encoding="utf-8") as fh:
                return fh.read()
        return args.equation
    raise ConfigError("no equation given")


def cmd_analyze(text: str, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    report = analyze(text, order=cfg.order, tol=cfg.tol, fit_threshold=cfg.fit_threshold, m_max=cfg.m_max)
    print(report.to_json() if cfg.output == "json" else report.to_text(), file=out)
    return report.exit_code


def _fmt(c) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def cmd_coeffs(text: str, order: int, as_json: bool = False, out=None) -> int:
    out = out or sys.stdout
    if not 1 <= order <= ORDER_RANGE[1]:
        raise ConfigError(f"order {order} outside [1, {ORDER_RANGE[1]}]")
    t = parse(text)
    if check_retro(t) is not Retro.RETRO:
        print("error: equation is not retro; its coefficients are not determined recursively", file=sys.stderr)
        return EXIT_REJECTED
    values = [_fmt(c) for c in solve(t, order).coeffs()]
    if as_json:
        print(json.dumps({"order": order, "coefficients": values}), file=out)
    else:
        for v in values:
            print(v, file=out)
        print(",".join(values), file=out)
    return EXIT_OK


def cmd_selftest(order: int | None = None, tol: float = 1e-8, out=None) -> int:
    out = out or sys.stdout
    from .acceptance import SuiteConfig, run_suite

    results = run_suite(SuiteConfig(order=order, tol=tol))
    for r in results:
        print(r.line(), file=out)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} criteria passed", file=out)
    return EXIT_OK if not failed else EXIT_NUMERIC


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; exit 2 is reserved for rejections
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _add_common(p: argparse.ArgumentParser, full: bool) -> None:
    p.add_argument("--order", type=int, default=None, help=f"truncation order N (default {DEFAULT_ORDER}, or ${ORDER_ENV})")
    p.add_argument("--tol", type=float, default=1e-8, help="numeric tolerance (default 1e-8)")
    if full:
        p.add_argument("--fit-threshold", type=float, default=0.05, help="relative deviation allowed by the fit")
        p.add_argument("--m-max", type=int, default=400, help="truncation of infinite operator sums")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyalaw", description="Certify recursion equations and compute their universal-law asymptotics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, full, helptext in (
        ("analyze", True, "certify, solve and report the asymptotic law"),
        ("coeffs", False, "print the exact coefficients t(1..N); any N from 1 to 2048"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("equation", nargs="?", help="inline equation such as 'w = z + z*w^2', or a file")
        p.add_argument("-f", "--file", help="read the equation from FILE")
        _add_common(p, full)
    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--order", type=int, default=None, help="force every criterion to this N")
    p.add_argument("--tol", type=float, default=1e-8)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            RunConfig(order=args.order or DEFAULT_ORDER, tol=args.tol)
            return cmd_selftest(args.order, args.tol)
        text = _read_equation(args)
        if args.command == "coeffs":
            order = args.order if args.order is not None else default_order()
            return cmd_coeffs(text, order, args.json)
        return cmd_analyze(text, _config(args))
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, RuntimeError) as e:
        print(f"numeric failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
