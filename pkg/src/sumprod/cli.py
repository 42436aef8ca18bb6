"""``sumprod`` command line: gen, stats, verify, sweep.

Exit codes: 0 pass, 1 exact assertion violated, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import lab
from .errors import BudgetExceeded, IdentityViolation, SumProdError
from .gaussian import GaussianRational, to_rational
from .sets import format_set, generate, read_set

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _complex_arg(text: str) -> GaussianRational:
    """``re`` or ``re,im`` with rational parts, e.g. ``1/2,3``."""
    parts = text.split(",")
    if len(parts) > 2:
        raise argparse.ArgumentTypeError(f"expected re[,im], got {text!r}")
    try:
        return GaussianRational(*(to_rational(p) for p in parts))
    except SumProdError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_arg(text: str):
    try:
        q = to_rational(text)
    except SumProdError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if q <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return text


def _int_list(text: str) -> list:
    """``4,8,16`` or ``lo:hi[:step]`` (inclusive); empty string gives no values."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            bits = [int(b) for b in text.split(":")]
            lo, hi = bits[0], bits[1]
            step = bits[2] if len(bits) > 2 else 1
            return list(range(lo, hi + 1, step))
        return [int(b) for b in text.split(",") if b.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sumprod", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated set file")
    g.add_argument("--kind", required=True, choices=sorted(
        ["arithmetic", "geometric", "complex_lattice", "random", "random_sector"]))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--start", type=_complex_arg)
    g.add_argument("--step", type=_complex_arg)
    g.add_argument("--ratio", type=_complex_arg)
    g.add_argument("--seed", type=int)
    g.add_argument("--epsilon", type=_rational_arg)
    g.add_argument("--height", type=int)
    g.add_argument("--side", type=int)
    g.add_argument("--out")

    s = sub.add_parser("stats", help="sizes, energies and observed exponent ratios of a set file")
    s.add_argument("path")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.add_argument("--out")

    v = sub.add_parser("verify", help="run exact verification suites")
    v.add_argument("--suite", choices=[*lab.SUITES, "all"], default="all")
    v.add_argument("--family", choices=lab.FAMILIES)
    v.add_argument("--count", type=int, default=20)
    v.add_argument("--n-max", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--epsilon", type=_rational_arg, default="1/100")
    v.add_argument("--format", choices=["json", "csv"], default="json")
    v.add_argument("--out")
    v.add_argument("--config", help="replay a RunConfig JSON (or a previous report)")
    v.add_argument("--counterexample-dir", default="counterexamples")

    w = sub.add_parser("sweep", help="one stats row per set size")
    w.add_argument("--family", choices=["ap", "gp", "lattice", "random", "random_sector"], default="ap")
    w.add_argument("--n", type=_int_list, required=True, help="e.g. 4,8,16 or 2:32:2")
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--epsilon", type=_rational_arg, default="1/100")
    w.add_argument("--format", choices=["json", "csv"], default="csv")
    w.add_argument("--out")
    return p


def _cmd_gen(args) -> int:
    params = {"n": args.n}
    optional = {
        "start": args.start, "step": args.step, "ratio": args.ratio, "seed": args.seed,
        "eps": args.epsilon, "height": args.height, "side": args.side,
    }
    params.update({k: v for k, v in optional.items() if v is not None})
    A = generate(args.kind, **params)
    _emit(format_set(A, comment=f"{args.kind} n={args.n}"), args.out)
    return EXIT_OK


def _cmd_stats(args) -> int:
    A = read_set(args.path)
    rep = lab.cmd_stats(A, set_id=args.path)
    if args.format == "csv":
        _emit(lab.stats_csv([rep]), args.out)
    else:
        _emit(lab.dumps(rep.to_json()), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        cfg = lab.RunConfig.from_json(data.get("config", data))
    else:
        suites = list(lab.SUITES) if args.suite == "all" else [args.suite]
        cfg = lab.RunConfig(
            suite=suites, family=args.family, count=args.count, n_max=args.n_max,
            seed=args.seed, epsilon=args.epsilon, output=args.out, format=args.format,
        ).validate()
    report = lab.cmd_verify(cfg, args.counterexample_dir)
    out = args.out or cfg.output
    if cfg.format == "csv":
        _emit(lab.verify_report_csv(report), out)
    else:
        _emit(lab.dumps(report), out)
    for name, suite in report["suites"].items():
        status = "PASS" if suite["passed"] else "FAIL"
        print(f"{status} {name}: {suite['sets']} sets", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VIOLATION


def _cmd_sweep(args) -> int:
    rows = lab.cmd_sweep(args.family, args.n, args.seed, args.epsilon)
    if args.format == "csv":
        _emit(lab.stats_csv(rows), args.out)
    else:
        _emit(lab.dumps([r.to_json() for r in rows]), args.out)
    return EXIT_OK


COMMANDS = {"gen": _cmd_gen, "stats": _cmd_stats, "verify": _cmd_verify, "sweep": _cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except IdentityViolation as exc:
        print(f"sumprod: identity violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except BudgetExceeded as exc:
        print(f"sumprod: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SumProdError, OSError, json.JSONDecodeError) as exc:
        print(f"sumprod: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
