"""Acceptance criteria. Each test records one PASS/FAIL line, printed in the
terminal summary (and immediately when run with ``-s``)."""

import io
import random
import time

from callee.classtable import TypeEnv, build_table, instantiate
from callee.cli import cmd_check
from callee.diagnostics import DiagnosticError
from callee.interp import monitored_eval
from callee.relations import effect_wf, is_subeffect, is_subtype
from callee.syntax.ast import MethodEffect, WILDCARD
from callee.syntax.parser import parse_program
from callee.syntax.printer import show
from callee.typecheck import elaborate

import fixture_tables as fx
from conftest import ACCEPTANCE_LINES, CORPUS, NEGATIVE, POSITIVE, checked
from derivations import MAX_ATOMS, Oracle
from preservation import preservation_trace

ALL_CODES = ["E101", "E102", "E103", "E104", "E105", "E106", "E107", "E110", "E111",
             "E201", "E202", "E203", "E204", "E205"]


def report(number, ok, text):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_1_positive_corpus(at_root):
    expected = {"console", "ui_element", "hashable", "path", "permission"}
    names = {p.stem for p in POSITIVE}
    start = time.perf_counter()
    codes = {p.stem: cmd_check(str(p.relative_to(at_root)), io.StringIO(), io.StringIO())
             for p in POSITIVE}
    elapsed = time.perf_counter() - start
    failing = sorted(n for n, c in codes.items() if c != 0)
    ok = expected <= names and not failing and elapsed < 1.0
    assert report(1, ok, f"{len(codes)} positive files check with exit 0 in {elapsed:.3f}s "
                         f"(limit 1s){'; failing: ' + ', '.join(failing) if failing else ''}")


def test_2_negative_corpus(at_root):
    covered = set()
    mismatched = []
    for path in NEGATIVE:
        rel = str(path.relative_to(at_root))
        err = io.StringIO()
        code = cmd_check(rel, io.StringIO(), err)
        golden = path.with_suffix(".err").read_text(encoding="utf-8")
        if code != 1 or err.getvalue() != golden:
            mismatched.append(path.name)
        covered |= {line.split("]")[0].split("[")[1] for line in golden.splitlines()}
    named = {"e204_hello": "E204", "e203_override_widen": "E203", "e202_print_line": "E202"}
    named_ok = all(code in (CORPUS / "negative" / f"{n}.err").read_text() for n, code in named.items())
    missing = [c for c in ALL_CODES if c not in covered]
    ok = len(NEGATIVE) >= 10 and not missing and not mismatched and named_ok
    assert report(2, ok, f"{len(NEGATIVE)} negative fixtures, {len(covered & set(ALL_CODES))}/"
                         f"{len(ALL_CODES)} codes covered, {len(mismatched)} golden mismatches"
                         f"{'; missing ' + ', '.join(missing) if missing else ''}")


def test_3_oracle_equivalence():
    start = time.perf_counter()
    queried = disagreements = skipped = 0
    examples = []
    for name, table, env in fx.all_fixture_envs():
        decls, methods = fx.table_size(table)
        assert decls <= 4 and methods <= 6, name
        oracle = Oracle(table, env, max_height=8)
        for lhs, rhs in fx.sample_queries(table, env, extra=40, seed=len(name)):
            if len(oracle.universe(lhs + rhs)) > MAX_ATOMS:
                skipped += 1
                continue
            queried += 1
            if is_subeffect(table, env, lhs, rhs) != oracle.derivable(lhs, rhs):
                disagreements += 1
                examples.append((name, lhs, rhs))
    elapsed = time.perf_counter() - start
    ok = queried >= 500 and disagreements == 0 and elapsed < 30
    assert report(3, ok, f"{queried} queries against the depth-8 derivation oracle, "
                         f"{disagreements} disagreements, {skipped} beyond the oracle's universe, "
                         f"{elapsed:.1f}s (limit 30s)"), examples[:5]


def test_4_relation_properties():
    failures = []
    checks = 0

    def expect(cond, what):
        nonlocal checks
        checks += 1
        if not cond:
            failures.append(what)

    rng = random.Random(4)
    for name, table, env in fx.all_fixture_envs():
        pool = fx.effect_pool(table, env)
        lists = [[]] + [[a] for a in pool] + [[a, b] for a in pool for b in pool if a != b]
        sub = {}

        def le(a, b):
            key = (tuple(a), tuple(b))
            if key not in sub:
                sub[key] = is_subeffect(table, env, a, b)
            return sub[key]

        for xs in lists:
            expect(le(xs, xs), ("reflexivity", name, xs))
            expect(le(xs, [WILDCARD]), ("top", name, xs))
            expect(le([], xs), ("bottom", name, xs))
            for x in xs:
                expect(le([x], xs), ("membership", name, x, xs))
        for _ in range(300):
            a, b, c = (rng.choice(lists) for _ in range(3))
            if le(a, b) and le(b, c):
                expect(le(a, c), ("transitivity", name, a, b, c))
        for e in pool:
            if e == WILDCARD:
                continue
            for u in fx.types_in(table, env):
                wider = MethodEffect(u, e.selector)
                if is_subtype(table, env, e.receiver, u) and not effect_wf(table, env, wider):
                    expect(le([e], [wider]), ("covariance", name, e, wider))
        for e in fx.declared_method_effects(table):
            ann = list(instantiate(table, e.receiver.name, e.selector).sig.effects)
            expect(is_subeffect(table, TypeEnv(), [e], ann), ("effect rule", name, e))
    ok = not failures
    assert report(4, ok, f"{checks} property instances (reflexivity, transitivity, membership, "
                         f"top, bottom, Effect rule, covariance) over {len(fx.FIXTURES)} fixture "
                         f"tables, {len(failures)} failures"), failures[:5]


def test_5_preservation():
    steps = 0
    typed_failures, type_failures, effect_failures = [], [], []
    for path in POSITIVE:
        table, main = checked(path.read_text())
        for rec in preservation_trace(table, main, max_steps=1000):
            steps += 1
            where = f"{path.stem} step {rec.index}: {show(rec.expr)}"
            if not rec.well_typed:
                typed_failures.append(where)
            elif not rec.type_ok:
                type_failures.append(where)
            elif not rec.effects_below_original:
                effect_failures.append(where)
    ok = not (typed_failures or type_failures or effect_failures)
    detail = f"{steps} steps over {len(POSITIVE)} mains: {len(typed_failures)} ill-typed, " \
             f"{len(type_failures)} with a larger type, {len(effect_failures)} with effects " \
             f"not below the original's"
    if effect_failures:
        detail += f" (first: {effect_failures[0]})"
    assert report(5, ok, detail), effect_failures[:5]


def test_6_monitor_silence():
    loud = []
    for path in POSITIVE:
        table, main = checked(path.read_text())
        out = monitored_eval(table, main, (WILDCARD,), fuel=100000)
        if out.status != "value" or out.violations:
            loud.append(path.stem)

    # the corrupted fixture passes parsing but not checking; run it unchecked
    program = parse_program((CORPUS / "negative" / "corrupted_console.cle").read_text())
    table, main = elaborate(build_table(program), program.main)
    out = monitored_eval(table, main, (WILDCARD,))
    site = [(v.which, str(v.effect)) for v in out.violations]
    caught = site == [("frame", "Console.print")]
    ok = not loud and caught
    assert report(6, ok, f"{len(POSITIVE) - len(loud)}/{len(POSITIVE)} corpus programs silent; "
                         f"corrupted fixture reports {site}")


def test_7_round_trip_and_determinism(at_root):
    bad_round_trip, nondeterministic, parsed = [], [], 0
    for path in POSITIVE + NEGATIVE:
        text = path.read_text()
        try:
            prog = parse_program(text)
        except DiagnosticError:
            prog = None
        if prog is not None:
            parsed += 1
            again = parse_program(show(prog))
            if again != prog or show(again) != show(prog):
                bad_round_trip.append(path.name)
        runs = []
        for _ in range(2):
            out, err = io.StringIO(), io.StringIO()
            code = cmd_check(str(path.relative_to(at_root)), out, err)
            runs.append((code, out.getvalue(), err.getvalue()))
        if runs[0] != runs[1]:
            nondeterministic.append(path.name)
    ok = not bad_round_trip and not nondeterministic
    assert report(7, ok, f"{parsed} corpus files round-trip ({len(bad_round_trip)} failures); "
                         f"{len(POSITIVE) + len(NEGATIVE)} files check identically twice "
                         f"({len(nondeterministic)} differences)")
