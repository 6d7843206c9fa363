"""Step-by-step re-typing of a reduction sequence."""

from dataclasses import dataclass

from callee.classtable import TypeEnv, instantiate
from callee.interp import CallEvent, Machine, is_value
from callee.relations import is_subeffect, is_subtype
from callee.typecheck import TypeCheckError, type_of

EMPTY = TypeEnv()


@dataclass
class StepRecord:
    index: int
    expr: object
    well_typed: bool
    type_ok: bool = False
    effects_below_original: bool = False     # effects(e_i) ⪯ effects(e_0)
    effects_below_previous: bool = False     # effects(e_i) ⪯ effects(e_{i-1}) ++ contracted annotation
    detail: str = ""


def preservation_trace(table, main, max_steps=1000):
    """Reduce ``main`` with plain small steps, re-typing every intermediate expression."""
    original = type_of(table, EMPTY, {}, main)
    prev = original
    records = []
    e = main
    machine = Machine(table)
    for i in range(1, max_steps + 1):
        if is_value(e):
            return records
        before = len(machine.events)
        e = machine.step(e)
        allowance = ()
        for ev in machine.events[before:]:
            if isinstance(ev, CallEvent):
                allowance = instantiate(table, ev.dynamic_class, ev.selector).sig.effects
        try:
            now = type_of(table, EMPTY, {}, e)
        except TypeCheckError as err:
            records.append(StepRecord(i, e, False, detail=str(err)))
            prev = None
            continue
        rec = StepRecord(
            i, e, True,
            type_ok=is_subtype(table, EMPTY, now.type, original.type),
            effects_below_original=is_subeffect(table, EMPTY, now.effects, original.effects),
            effects_below_previous=prev is not None and is_subeffect(
                table, EMPTY, now.effects, tuple(prev.effects) + tuple(allowance)),
        )
        records.append(rec)
        prev = now
    raise AssertionError(f"no value after {max_steps} steps")
