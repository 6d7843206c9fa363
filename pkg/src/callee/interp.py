"""Small-step reduction and a runtime monitor for the soundness claims.

Reduction follows FGJ with a fixed leftmost-innermost order. ``restrict[ε̄] e``
reduces to ``e`` in one step.

Evaluation runs the same machine but keeps a marker around every method body
it is executing (and, when monitoring, around every restrict body), so at each
call it knows which bound the call happens under. Markers never appear in the
output of :func:`step`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from callee.classtable import ArityError, ClassTable, TypeEnv, instantiate
from callee.relations import is_subeffect
from callee.syntax.ast import (
    Call, ClassDecl, ClassName, FieldAccess, MethodEffect, New, Restrict,
    Selector, Type, Var, WILDCARD, show_effects,
)
from callee.syntax.printer import show_expr

DEFAULT_FUEL = 100_000


class Stuck(Exception):
    """No reduction rule applies."""


class SoundnessError(AssertionError):
    """A call reduced to a body whose effects exceed the static annotation."""


@dataclass(frozen=True)
class Value:
    cls: str
    fields: tuple["Value", ...] = ()

    def to_expr(self) -> New:
        return New(ClassName(self.cls), tuple(v.to_expr() for v in self.fields))

    @classmethod
    def from_expr(cls, e) -> "Value":
        return cls(e.cls.name, tuple(cls.from_expr(a) for a in e.args))

    def __str__(self):
        return show_expr(self.to_expr())


# -- trace events ---------------------------------------------------------------

@dataclass(frozen=True)
class CallEvent:
    static_type: Type
    dynamic_class: str
    selector: Selector
    allowed: tuple

    def __str__(self):
        return (f"CALL {self.dynamic_class}.{self.selector} static={self.static_type} "
                f"allow={show_effects(self.allowed)}")


@dataclass(frozen=True)
class RestrictEvent:
    bound: tuple

    def __str__(self):
        return f"RESTRICT {show_effects(self.bound)}"


@dataclass(frozen=True)
class Violation:
    which: str   # "direct" or "frame"
    effect: MethodEffect
    detail: str = ""

    def __str__(self):
        return f"VIOLATION {self.which} {self.effect}"


@dataclass
class Outcome:
    status: str                      # "value", "stuck" or "out_of_fuel"
    value: Optional[Value] = None
    events: list = field(default_factory=list)
    steps: int = 0
    reason: str = ""

    @property
    def violations(self):
        return [e for e in self.events if isinstance(e, Violation)]


# -- expression helpers ---------------------------------------------------------

@dataclass(frozen=True)
class _Frame:
    """Runtime-only marker: ``body`` runs under effect bound ``bound``."""
    bound: tuple
    body: object


def is_value(e) -> bool:
    stack = [e]
    while stack:
        x = stack.pop()
        if not isinstance(x, New):
            return False
        stack.extend(x.args)
    return True


def _children(e):
    if isinstance(e, New):
        return list(e.args)
    if isinstance(e, FieldAccess):
        return [e.recv]
    if isinstance(e, Call):
        return [e.recv, *e.args]
    if isinstance(e, _Frame):
        return [e.body]
    return []


def _rebuild(e, i, child):
    if isinstance(e, New):
        args = list(e.args)
        args[i] = child
        return New(e.cls, tuple(args), e.span)
    if isinstance(e, FieldAccess):
        return FieldAccess(child, e.field, e.span)
    if isinstance(e, Call):
        if i == 0:
            return Call(child, e.selector, e.args, e.span, e.recv_type)
        args = list(e.args)
        args[i - 1] = child
        return Call(e.recv, e.selector, tuple(args), e.span, e.recv_type)
    if isinstance(e, _Frame):
        if is_value(child):
            return child
        if isinstance(child, _Frame):
            # an inner bound supersedes the outer one for as long as it exists
            return child
        return _Frame(e.bound, child)
    raise AssertionError(e)


def subst_vars(e, env: dict):
    """Replace free variables by the expressions in ``env`` (no binders occur in expressions)."""
    if isinstance(e, Var):
        return env.get(e.name, e)
    if isinstance(e, New):
        return New(e.cls, tuple(subst_vars(a, env) for a in e.args), e.span)
    if isinstance(e, FieldAccess):
        return FieldAccess(subst_vars(e.recv, env), e.field, e.span)
    if isinstance(e, Call):
        return Call(subst_vars(e.recv, env), e.selector,
                    tuple(subst_vars(a, env) for a in e.args), e.span, e.recv_type)
    if isinstance(e, Restrict):
        return Restrict(e.bound, subst_vars(e.body, env), e.span)
    raise TypeError(f"not an expression: {e!r}")


# -- the machine ------------------------------------------------------------------

class Machine:
    def __init__(self, table: ClassTable, frames=False, monitor=False, check_direct=False,
                 top=(WILDCARD,)):
        self.table = table
        self.frames = frames
        self.monitor = monitor
        self.check_direct = check_direct
        self.top = tuple(top)
        self.events: list = []

    def step(self, e):
        """One reduction of ``e``; None if ``e`` is a value."""
        if is_value(e):
            return None
        # walk down to the leftmost-innermost redex, remembering the path
        path = []
        bound = self.top
        node = e
        while True:
            if isinstance(node, _Frame):
                bound = node.bound
            kids = _children(node)
            idx = next((i for i, k in enumerate(kids) if not is_value(k)), None)
            if idx is None or isinstance(node, Restrict):
                break
            if isinstance(node, New) or isinstance(node, (FieldAccess, Call, _Frame)):
                path.append((node, idx))
                node = kids[idx]
                continue
            break
        new = self.contract(node, bound)
        for parent, idx in reversed(path):
            new = _rebuild(parent, idx, new)
        return new

    def contract(self, e, bound):
        if isinstance(e, Restrict):
            self.events.append(RestrictEvent(e.bound))
            if self.frames and self.monitor and not is_value(e.body):
                return _Frame(e.bound, e.body)
            return e.body
        if isinstance(e, Var):
            raise Stuck(f"free variable '{e.name}'")
        if isinstance(e, FieldAccess):
            decl = self.table.get(e.recv.cls.name)
            if isinstance(decl, ClassDecl):
                for i, f in enumerate(decl.fields):
                    if f.name == e.field and i < len(e.recv.args):
                        return e.recv.args[i]
            raise Stuck(f"no field '{e.field}' on {show_expr(e.recv)}")
        if isinstance(e, Call):
            return self.reduce_call(e, bound)
        raise Stuck(f"no rule for {type(e).__name__}")

    def reduce_call(self, e: Call, bound):
        dyn = e.recv.cls.name
        if not isinstance(self.table.get(dyn), ClassDecl):
            raise Stuck(f"'{dyn}' is not a class")
        try:
            entry = instantiate(self.table, dyn, e.selector)
        except ArityError as err:
            raise Stuck(str(err)) from None
        if entry is None or entry.body is None:
            raise Stuck(f"'{dyn}' has no method '{e.selector.name}'")
        if len(entry.sig.params) != len(e.args):
            raise Stuck(f"wrong number of arguments to {dyn}.{e.selector}")

        static = e.recv_type if isinstance(e.recv_type, ClassName) else ClassName(dyn)
        self.events.append(CallEvent(static, dyn, e.selector, bound))
        called = MethodEffect(ClassName(dyn), e.selector)
        if self.monitor:
            self._monitor_call(called, static, entry, bound)

        env = {"this": e.recv}
        env.update((p.name, a) for p, a in zip(entry.sig.params, e.args))
        body = subst_vars(entry.body, env)
        if self.check_direct:
            self._assert_direct(body, static, e.selector)
        if self.frames and not is_value(body):
            return _Frame(entry.sig.effects, body)
        return body

    def _static_annotation(self, static, sel):
        try:
            entry = instantiate(self.table, static.name, sel)
        except ArityError:
            return None
        return None if entry is None else entry.sig.effects

    def _monitor_call(self, called, static, entry, bound):
        env = TypeEnv()
        if static.name != called.receiver.name:
            allowed = self._static_annotation(static, called.selector)
            if allowed is not None and not is_subeffect(self.table, env, entry.sig.effects, allowed):
                self.events.append(Violation(
                    "direct", called,
                    f"annotation {show_effects(entry.sig.effects)} exceeds "
                    f"{static}.{called.selector}'s {show_effects(allowed)}"))
        if not is_subeffect(self.table, env, [called], bound):
            self.events.append(Violation(
                "frame", called, f"{called} is not a sub-effect of {show_effects(bound)}"))

    def _assert_direct(self, body, static, sel):
        from callee.typecheck import TypeCheckError, type_of

        allowed = self._static_annotation(static, sel)
        try:
            effects = type_of(self.table, TypeEnv(), {}, body).effects
        except TypeCheckError as err:
            raise SoundnessError(f"reduct of {static}.{sel} is ill-typed: {err}") from None
        if allowed is None or not is_subeffect(self.table, TypeEnv(), effects, allowed):
            raise SoundnessError(
                f"reduct of {static}.{sel} has effects {show_effects(effects)}, "
                f"annotation allows {show_effects(allowed or ())}")


def step(table: ClassTable, e, check_direct=False):
    """Single FGJ reduction step. Returns None for values, raises Stuck otherwise."""
    return Machine(table, check_direct=check_direct).step(e)


def _run(machine: Machine, e, fuel: int) -> Outcome:
    if fuel < 1:
        raise ValueError("fuel must be positive")
    steps = 0
    while not is_value(e):
        if steps >= fuel:
            return Outcome("out_of_fuel", events=machine.events, steps=steps,
                           reason=f"no value after {fuel} steps")
        try:
            e = machine.step(e)
        except Stuck as err:
            return Outcome("stuck", events=machine.events, steps=steps, reason=str(err))
        steps += 1
    return Outcome("value", Value.from_expr(e), machine.events, steps)


def eval(table: ClassTable, e, fuel: int = DEFAULT_FUEL, top=(WILDCARD,)) -> Outcome:  # noqa: A001
    """Reduce ``e`` to a value in at most ``fuel`` steps, tracing every call."""
    return _run(Machine(table, frames=True, top=top), e, fuel)


def monitored_eval(table: ClassTable, e, top=(WILDCARD,), fuel: int = DEFAULT_FUEL) -> Outcome:
    """Like :func:`eval`, additionally checking every call against the bounds in force.

    At a call dispatched to ``C.m<T̄>`` it checks that C's annotation is below the
    annotation of the method the call was typed against (direct soundness) and
    that ``C.m<T̄>`` itself is below the current bound: the enclosing method's
    annotation, the innermost restrict, or ``top`` (indirect soundness).
    Failures are recorded as Violation events; evaluation carries on.
    """
    return _run(Machine(table, frames=True, monitor=True, top=top), e, fuel)
