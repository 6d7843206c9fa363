"""Check and run every corpus program, printing one row per file.

    python3 scripts/run_corpus.py [--fuel N]

Positive files are checked, then evaluated under the monitor with top bound
``[*]``. Negative files are checked, and the ones that still parse are also
run unchecked under the monitor, which shows what the checker was guarding
against.
"""

import argparse
import pathlib
import time

from callee.classtable import build_table
from callee.diagnostics import DiagnosticError
from callee.interp import monitored_eval
from callee.syntax.parser import parse_program
from callee.typecheck import check_source, elaborate

ROOT = pathlib.Path(__file__).resolve().parents[1] / "corpus"


def unchecked_run(text, fuel):
    try:
        program = parse_program(text)
        table = build_table(program)
    except DiagnosticError:
        return "-"
    if program.main is None:
        return "no main"
    table, main = elaborate(table, program.main)
    out = monitored_eval(table, main, fuel=fuel)
    result = str(out.value) if out.status == "value" else out.status
    return f"{result}, {len(out.violations)} violation(s)"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fuel", type=int, default=100_000)
    args = ap.parse_args()

    for kind in ("positive", "negative"):
        print(f"== {kind}")
        for path in sorted((ROOT / kind).glob("*.cle")):
            text = path.read_text(encoding="utf-8")
            start = time.perf_counter()
            _, _, diags = check_source(text)
            codes = ",".join(sorted({d.code for d in diags})) or "ok"
            run = unchecked_run(text, args.fuel)
            ms = (time.perf_counter() - start) * 1000
            print(f"{path.name:28} {codes:10} {run:40} {ms:7.1f} ms")


if __name__ == "__main__":
    main()
