"""Command-line entry points.

Exit status is 0 when everything checked passes, 1 when an expectation
fails and 2 for unusable input.  Files go to ``--out`` or, failing that,
to the directory named by ``F2HOMALG_OUT`` (default: the current one).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .chart import chart_from_ext, chart_from_graded, chart_from_run, emit_csv, emit_svg, emit_tikz
from .chart.spec import ChartSpec
from .ss.engine import RunResult
from .ss.fiber import GradedSpace
from .ss.scenario import ScenarioError, parse_scenario

OUT_ENV = "F2HOMALG_OUT"
PASS, FAIL, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _out_dir(arg: Optional[str]) -> Path:
    path = Path(arg or os.environ.get(OUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _module(name: str):
    from .steenrod import a1_ij_module, c2_module, steenrod_algebra, trivial_module

    alg = steenrod_algebra()
    if name.startswith("a1-") and len(name) == 5 and set(name[3:]) <= {"0", "1"}:
        return a1_ij_module(int(name[3]), int(name[4]), alg)
    if name == "c2":
        return c2_module(alg)
    if name == "f2":
        return trivial_module(alg)
    raise InputError(f"unknown module {name!r} (use a1-00, a1-01, a1-10, a1-11, c2 or f2)")


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}")
    return path


# subcommands -------------------------------------------------------------

def cmd_resolve(args) -> int:
    from .steenrod import ext_chart, minimal_resolution

    module = _module(args.module)
    t0 = time.perf_counter()
    res = minimal_resolution(module, args.max_s, args.max_t)
    chart = ext_chart(res, products=args.products)
    print(f"resolved {args.module} to (s, t) <= ({args.max_s}, {args.max_t}) "
          f"in {time.perf_counter() - t0:.1f} s")
    hi = args.max_t - args.max_s
    spec = chart_from_ext(chart, (0, hi), title=f"Ext for {args.module}")
    out = _out_dir(args.out)
    _write(out / f"{args.module}.csv", emit_csv(spec))
    _write(out / f"{args.module}.svg", emit_svg(spec))
    totals = " ".join(f"{n}:{chart.stem_total(n)}" for n in range(0, hi + 1))
    print(f"stem totals {totals}")
    return PASS


def cmd_cobar_check(args) -> int:
    from .cobar import verify_detection_classes

    ok = True
    for ij in args.modules:
        for rep in verify_detection_classes(int(ij[0]), int(ij[1]), cap=args.cap):
            status = "pass" if rep.ok else "fail"
            ok &= rep.ok
            print(f"A(1)[{ij}] {rep.name} {rep.bidegree}: cocycle={rep.cocycle} "
                  f"coboundary={rep.coboundary} {status}")
    return PASS if ok else FAIL


def _registry_for(target: str):
    """Registry plus scenario name for a scenario name or a .scn path."""
    from .pipeline import Registry

    path = Path(target)
    if path.suffix == ".scn" or path.exists():
        if not path.is_file():
            raise InputError(f"no such scenario file {target}")
        reg = Registry(path.parent)
        return reg, path.stem
    return Registry(), target


def _dir_registry(directory: Optional[str]):
    from .pipeline import Registry

    if directory is None:
        return None
    if not Path(directory).is_dir():
        raise InputError(f"no such scenario directory {directory}")
    return Registry(directory)


def _print_verdicts(verdicts, verbose: bool = True) -> bool:
    ok = True
    for v in verdicts:
        ok &= v.passed
        if verbose or not v.passed:
            print(f"{v.row()}\t{v.detail}" if v.detail else v.row())
    return ok


def cmd_ss_run(args) -> int:
    from .pipeline import check_expectations
    from .pipeline.suite import invariant_verdict

    reg, name = _registry_for(args.scenario)
    sc = reg.scenario(name)
    t0 = time.perf_counter()
    result = reg.run(name)
    print(f"{name}: {sc.kind} finished in {time.perf_counter() - t0:.1f} s")
    verdicts = check_expectations(sc, result, reg)
    if isinstance(result, RunResult):
        verdicts.append(invariant_verdict(name, result))
        if args.audit:
            for a in result.audit:
                print(f"  {a}")
    ok = _print_verdicts(verdicts)
    if args.out or os.environ.get(OUT_ENV):
        _write(_out_dir(args.out) / f"{name}.csv", emit_csv(_chart_of(result, sc)))
    return PASS if ok else FAIL


def cmd_pipeline(args) -> int:
    from .pipeline.suite import run_all, write_verdicts

    names = None if args.all or not args.names else args.names
    t0 = time.perf_counter()
    verdicts = run_all(_dir_registry(args.dir), names=names, adams=not args.no_adams,
                       log=(lambda m: print(m, file=sys.stderr)) if args.verbose else None)
    path = write_verdicts(verdicts, _out_dir(args.out) / "verdicts.tsv")
    ok = _print_verdicts(verdicts, verbose=args.verbose)
    failed = sum(not v.passed for v in verdicts)
    print(f"{len(verdicts)} rows, {failed} failing, {time.perf_counter() - t0:.1f} s; wrote {path}")
    return PASS if ok else FAIL


def _chart_of(result, sc) -> ChartSpec:
    from .pipeline.runner import FiberRun

    if isinstance(result, RunResult):
        spec = chart_from_run(result, lines=[m for m in ("eta", "nu", "v2") if _has(result, m)])
    elif isinstance(result, FiberRun):
        spec = chart_from_graded(result.fiber, title=sc.name)
    elif isinstance(result, GradedSpace):
        spec = chart_from_graded(result, title=sc.name)
    else:
        raise InputError(f"cannot chart {type(result).__name__}")
    spec.annotations.extend(sc.annotations)
    return spec


def _has(run: RunResult, name: str) -> bool:
    alg = getattr(run.space, "algebra", run.space)
    return name in getattr(alg, "gen_index", {})


def cmd_chart(args) -> int:
    path = Path(args.input)
    if not path.is_file():
        raise InputError(f"no such scenario file {args.input}")
    text = path.read_text(encoding="utf-8")
    if not any(line.split("#", 1)[0].strip() for line in text.splitlines()):
        spec = ChartSpec(title=path.stem)
    else:
        reg, name = _registry_for(str(path))
        sc = reg.scenario(name)
        spec = _chart_of(reg.run(name), sc)
    emit = {"svg": emit_svg, "tikz": emit_tikz, "csv": emit_csv}[args.format]
    body = emit(spec)
    if args.output == "-":
        sys.stdout.write(body)
    else:
        suffix = {"svg": ".svg", "tikz": ".tex", "csv": ".csv"}[args.format]
        target = Path(args.output) if args.output else _out_dir(None) / f"{path.stem}{suffix}"
        _write(target, body)
    return PASS


def cmd_verify(args) -> int:
    from .pipeline.suite import run_all

    verdicts = run_all(_dir_registry(args.dir), names=args.names or None, adams=not args.no_adams)
    ok = _print_verdicts(verdicts, verbose=False)
    print(f"{len(verdicts)} expectations, {sum(not v.passed for v in verdicts)} failing")
    return PASS if ok else FAIL


# parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="f2homalg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("resolve", help="minimal resolution and Ext chart of a module")
    r.add_argument("--module", required=True, help="a1-00, a1-01, a1-10, a1-11, c2 or f2")
    r.add_argument("--max-s", type=int, default=16)
    r.add_argument("--max-t", type=int, default=52)
    r.add_argument("--products", action="store_true", help="draw h0, h1, h2 lines")
    r.add_argument("--out")
    r.set_defaults(func=cmd_resolve)

    c = sub.add_parser("cobar-check", help="verify the three detection cochains")
    c.add_argument("--modules", nargs="+", default=["00", "01", "10", "11"])
    c.add_argument("--cap", type=int, default=12)
    c.set_defaults(func=cmd_cobar_check)

    s = sub.add_parser("ss-run", help="run one scenario and check its expectations")
    s.add_argument("scenario", help="bundled scenario name or path to a .scn file")
    s.add_argument("--audit", action="store_true", help="print every nonzero differential")
    s.add_argument("--out")
    s.set_defaults(func=cmd_ss_run)

    pl = sub.add_parser("pipeline", help="run the scenarios and write verdicts.tsv")
    pl.add_argument("--all", action="store_true", help="every bundled scenario (the default)")
    pl.add_argument("names", nargs="*")
    pl.add_argument("--no-adams", action="store_true")
    pl.add_argument("--dir", help="scenario directory instead of the bundled one")
    pl.add_argument("--out")
    pl.add_argument("-v", "--verbose", action="store_true")
    pl.set_defaults(func=cmd_pipeline)

    ch = sub.add_parser("chart", help="render a scenario as SVG, TikZ-style text or CSV")
    ch.add_argument("--in", dest="input", required=True)
    ch.add_argument("--format", choices=("svg", "tikz", "csv"), default="svg")
    ch.add_argument("-o", "--output", help="file to write, '-' for stdout")
    ch.set_defaults(func=cmd_chart)

    v = sub.add_parser("verify", help="exit nonzero iff some expectation fails")
    v.add_argument("names", nargs="*")
    v.add_argument("--no-adams", action="store_true")
    v.add_argument("--dir", help="scenario directory instead of the bundled one")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return PASS if e.code == 0 else BAD_INPUT
    try:
        return args.func(args)
    except (InputError, ScenarioError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
