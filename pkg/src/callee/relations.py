"""Subtyping, the sub-effect relation, and the indirect-effect graph.

The sub-effect rules are declarative (transitivity and list recombination
take arbitrary intermediates), so :func:`is_subeffect` decides them
algorithmically instead:

* a list is below ``R`` iff each of its elements is (lists are sets up to
  order and duplication, and ``[]`` is the bottom);
* ``*`` is below ``R`` iff ``*`` is in ``R``;
* ``T.m`` is below ``R`` iff ``*`` is in ``R``, or some supertype ``T'.m`` is
  in ``R``, or for some supertype ``T'`` declaring ``m`` every effect in the
  instantiated annotation of ``T'.m`` is below ``R``.

The last case is recursive and annotations may mention themselves
(``print effect[Console.print]``). The relation is the least fixed point of
the rules, so a goal that is already on the search path counts as failed.
Failures that relied on such an assumption are not memoised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from callee.classtable import ArityError, ClassTable, TypeEnv, instantiate, lookup_method
from callee.diagnostics import Diagnostic, DiagnosticError
from callee.syntax.ast import (
    ClassDecl, ClassName, Effect, MethodEffect, Type, TypeVar, Wildcard,
)


# -- subtyping -----------------------------------------------------------------

def supertypes(table: ClassTable, env: TypeEnv, t: Type) -> list[Type]:
    """Every ``T'`` with ``Δ ⊢ t ≤ T'``, ``t`` itself first.

    Type variables reach their bound and, through it, the bound's interfaces,
    whether the bound is a class or an interface.
    """
    b = env(t)
    if b is None or b.name not in table:
        raise DiagnosticError([Diagnostic("E101", f"unknown type '{t}'", t.span)])
    result = [t]
    if b != t:
        result.append(b)
    decl = table[b.name]
    if isinstance(decl, ClassDecl):
        for i in decl.interfaces:
            if i not in result:
                result.append(ClassName(i.name))
    return result


def is_subtype(table: ClassTable, env: TypeEnv, t: Type, u: Type) -> bool:
    if t == u:
        return True
    try:
        return u in supertypes(table, env, t)
    except DiagnosticError:
        return False


def type_wf(table: ClassTable, env: TypeEnv, t: Type) -> list[Diagnostic]:
    b = env(t)
    if b is None or b.name not in table:
        return [Diagnostic("E101", f"unknown type '{t}'", t.span)]
    return []


# -- sub-effects -----------------------------------------------------------------

def is_subeffect(table: ClassTable, env: TypeEnv, lhs, rhs) -> bool:
    """Decide ``Δ ⊢ lhs ⪯ rhs``."""
    return _Search(table, env, rhs).holds_all(lhs)


class _Search:
    def __init__(self, table, env, rhs):
        self.table = table
        self.env = env
        self.rhs = frozenset(rhs)
        self.top = any(isinstance(e, Wildcard) for e in self.rhs)
        self.memo: dict[Effect, bool] = {}
        self.active: list[Effect] = []

    def holds_all(self, lhs) -> bool:
        if self.top:
            return True
        return all(self.prove(e)[0] for e in lhs)

    def _supers(self, t):
        try:
            return supertypes(self.table, self.env, t)
        except DiagnosticError:
            return [t]

    def prove(self, goal: Effect) -> tuple[bool, frozenset]:
        """Return (holds, in-progress goals the answer assumed to be false)."""
        if self.top or goal in self.rhs:
            return True, frozenset()
        if isinstance(goal, Wildcard):
            return False, frozenset()
        if goal in self.memo:
            return self.memo[goal], frozenset()
        if goal in self.active:
            return False, frozenset([goal])

        self.active.append(goal)
        assumed: set = set()
        holds = False
        supers = self._supers(goal.receiver)
        if any(MethodEffect(s, goal.selector) in self.rhs for s in supers):
            holds = True
        else:
            for s in supers:
                if not isinstance(s, ClassName):
                    continue
                try:
                    entry = instantiate(self.table, s.name, goal.selector)
                except ArityError:
                    continue
                if entry is None:
                    continue
                ok = True
                for eff in entry.sig.effects:
                    sub_ok, sub_assumed = self.prove(eff)
                    assumed |= sub_assumed
                    if not sub_ok:
                        ok = False
                        break
                if ok:
                    holds = True
                    break
        self.active.pop()

        assumed.discard(goal)
        if holds:
            self.memo[goal] = True
            return True, frozenset()
        if not assumed:
            self.memo[goal] = False
        return False, frozenset(assumed)


# -- well-formedness of effects ------------------------------------------------

def effect_wf(table: ClassTable, env: TypeEnv, eff: Effect) -> list[Diagnostic]:
    """``Δ ⊢ ε``; an empty list means well-formed."""
    if isinstance(eff, Wildcard):
        return []
    recv = eff.receiver
    bad = type_wf(table, env, recv)
    if bad:
        return [Diagnostic("E101", f"unknown type '{recv}' in effect {eff}", eff.span)]
    owner = env(recv).name
    sel = eff.selector
    entry = lookup_method(table, owner, sel.name)
    if entry is None:
        return [Diagnostic("E104", f"'{owner}' has no method '{sel.name}' (effect {eff})", eff.span)]
    return selector_wf(table, env, owner, entry.sig, sel, eff.span)


def selector_wf(table, env, owner, sig, sel, span) -> list[Diagnostic]:
    """Type arguments of ``sel`` against the declared parameters of ``sig``."""
    if len(sel.type_args) != len(sig.type_params):
        return [Diagnostic(
            "E103",
            f"{owner}.{sel.name} expects {len(sig.type_params)} type argument(s), "
            f"got {len(sel.type_args)}", span)]
    diags = []
    mapping = {tp.var.name: t for tp, t in zip(sig.type_params, sel.type_args)}
    for tp, arg in zip(sig.type_params, sel.type_args):
        if type_wf(table, env, arg):
            diags.append(Diagnostic("E101", f"unknown type '{arg}'", arg.span or span))
            continue
        bound = tp.bound
        if isinstance(bound, TypeVar):
            bound = mapping.get(bound.name, bound)
        if not is_subtype(table, env, arg, bound):
            diags.append(Diagnostic(
                "E105", f"type argument {arg} of {owner}.{sel.name} is not a subtype of "
                f"bound {bound}", span))
    return diags


# -- effect graph ----------------------------------------------------------------

@dataclass(frozen=True)
class GraphNode:
    owner: str
    name: str
    type_params: tuple[str, ...] = ()

    def __str__(self):
        return f"{self.owner}.{self.name}"


@dataclass
class EffectGraph:
    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[tuple[GraphNode, Effect]] = field(default_factory=list)

    def to_dot(self) -> str:
        lines = ["digraph effects {"]
        lines += [f'  "{n}";' for n in self.nodes]
        lines += [f'  "{src}" -> "{dst}";' for src, dst in self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        by_node: dict[GraphNode, list] = {n: [] for n in self.nodes}
        for src, dst in self.edges:
            by_node[src].append(str(dst))
        return "".join(f"{n} effect[{', '.join(by_node[n])}]\n" for n in self.nodes)


def effect_graph(table: ClassTable) -> EffectGraph:
    """Methods as nodes, one edge per entry of each effect annotation."""
    graph = EffectGraph()
    entries = sorted(
        (e for name in table for e in table.entries(name)),
        key=lambda e: (e.owner, e.sig.name))
    for entry in entries:
        node = GraphNode(entry.owner, entry.sig.name, tuple(v.name for v in entry.sig.type_vars))
        graph.nodes.append(node)
        for eff in entry.sig.effects:
            graph.edges.append((node, eff))
    return graph
