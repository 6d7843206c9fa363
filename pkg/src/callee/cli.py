"""Command-line front end: ``callee check|run|effects FILE``.

Exit codes: 0 success, 1 diagnostics, 2 usage or I/O error, 3 stuck or out of
fuel, 4 monitor violation. Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from callee.classtable import build_table
from callee.diagnostics import DiagnosticError
from callee.interp import DEFAULT_FUEL, eval, monitored_eval
from callee.relations import effect_graph
from callee.syntax.parser import parse_program
from callee.typecheck import check_source, elaborate

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_USAGE, EXIT_STUCK, EXIT_VIOLATION = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    path: str
    fuel: int = DEFAULT_FUEL
    trace: bool = False
    monitor: bool = False
    dot: bool = False
    unchecked: bool = False

    def __post_init__(self):
        if self.command not in ("check", "run", "effects"):
            raise ValueError(f"unknown command {self.command!r}")
        if self.fuel < 1:
            raise ValueError("fuel must be at least 1")


def _read(path, err):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        print(f"callee: cannot read {path}: {exc}", file=err)
        return None


def _report(diags, path, err):
    for d in diags:
        print(d.render(path), file=err)


def cmd_check(path, out=sys.stdout, err=sys.stderr) -> int:
    text = _read(path, err)
    if text is None:
        return EXIT_USAGE
    _, _, diags = check_source(text)
    _report(diags, path, err)
    return EXIT_DIAGNOSTICS if diags else EXIT_OK


def cmd_run(config: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    text = _read(config.path, err)
    if text is None:
        return EXIT_USAGE
    if config.unchecked:
        try:
            program = parse_program(text)
            table = build_table(program)
        except DiagnosticError as exc:
            _report(exc.diagnostics, config.path, err)
            return EXIT_DIAGNOSTICS
    else:
        program, table, diags = check_source(text)
        if diags:
            _report(diags, config.path, err)
            return EXIT_DIAGNOSTICS
    if program.main is None:
        print(f"callee: {config.path} has no main expression", file=err)
        return EXIT_USAGE

    table, main = elaborate(table, program.main)
    if config.monitor:
        outcome = monitored_eval(table, main, fuel=config.fuel)
    else:
        outcome = eval(table, main, fuel=config.fuel)
    if config.trace:
        for ev in outcome.events:
            print(ev, file=out)
    elif outcome.violations:
        for v in outcome.violations:
            print(v, file=err)
    if outcome.status == "value":
        print(outcome.value, file=out)
    else:
        print(f"callee: {outcome.status.replace('_', ' ')}: {outcome.reason}", file=err)
    if outcome.violations:
        return EXIT_VIOLATION
    return EXIT_OK if outcome.status == "value" else EXIT_STUCK


def cmd_effects(path, dot=False, out=sys.stdout, err=sys.stderr) -> int:
    text = _read(path, err)
    if text is None:
        return EXIT_USAGE
    _, table, diags = check_source(text)
    if diags:
        _report(diags, path, err)
        return EXIT_DIAGNOSTICS
    graph = effect_graph(table)
    out.write(graph.to_dot() if dot else graph.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="callee", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="type- and effect-check a file")
    p.add_argument("path", metavar="FILE")

    p = sub.add_parser("run", help="check and evaluate main")
    p.add_argument("path", metavar="FILE")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--trace", action="store_true", help="print one line per runtime event")
    p.add_argument("--monitor", action="store_true", help="check soundness at every call")
    p.add_argument("--unchecked", action="store_true", help="skip the type checker")

    p = sub.add_parser("effects", help="list effect annotations")
    p.add_argument("path", metavar="FILE")
    p.add_argument("--dot", action="store_true", help="emit a Graphviz digraph")
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = RunConfig(ns.command, ns.path, getattr(ns, "fuel", DEFAULT_FUEL),
                           getattr(ns, "trace", False), getattr(ns, "monitor", False),
                           getattr(ns, "dot", False), getattr(ns, "unchecked", False))
    except ValueError as exc:
        print(f"callee: {exc}", file=err)
        return EXIT_USAGE
    if config.command == "check":
        return cmd_check(config.path, out, err)
    if config.command == "run":
        return cmd_run(config, out, err)
    return cmd_effects(config.path, config.dot, out, err)


if __name__ == "__main__":
    sys.exit(main())
