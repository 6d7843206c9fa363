"""Compare is_subeffect with the brute-force derivation oracle on the fixture tables.

    python3 scripts/oracle_sweep.py [--extra N] [--height H] [--seed S]

Prints per-table query counts, disagreements, and the largest derivation
height the oracle needed. Exits non-zero on any disagreement.
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "tests"))

import fixture_tables as fx  # noqa: E402
from derivations import MAX_ATOMS, Oracle  # noqa: E402

from callee.relations import is_subeffect  # noqa: E402
from callee.syntax.ast import show_effects  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--extra", type=int, default=40, help="random queries per environment")
    ap.add_argument("--height", type=int, default=8, help="oracle derivation height bound")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    total = bad = 0
    start = time.perf_counter()
    for name, table, env in fx.all_fixture_envs():
        oracle = Oracle(table, env, max_height=args.height)
        n = skipped = disagree = holds = 0
        deepest = 0
        for lhs, rhs in fx.sample_queries(table, env, args.extra, seed=args.seed):
            if len(oracle.universe(lhs + rhs)) > MAX_ATOMS:
                skipped += 1
                continue
            n += 1
            expected = oracle.derivable(lhs, rhs)
            deepest = max(deepest, oracle.heights)
            holds += expected
            if is_subeffect(table, env, lhs, rhs) != expected:
                disagree += 1
                print(f"  disagreement: {show_effects(lhs)} <= {show_effects(rhs)} "
                      f"(oracle says {expected})")
        bounds = ", ".join(f"{v}: {b}" for v, b in env.bounds) or "-"
        print(f"{name:11} env[{bounds:18}] {n:4} queries, {holds:4} derivable, "
              f"{disagree} disagreements, {skipped} skipped, closure height {deepest}")
        total += n
        bad += disagree
    print(f"total {total} queries, {bad} disagreements, {time.perf_counter() - start:.1f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
