"""The global class table, selector-substituting method lookup, and environments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from callee.diagnostics import Diagnostic, DiagnosticError
from callee.syntax.ast import (
    ClassDecl, ClassName, Decl, Expr, InterfaceDecl, Method, Param, Program, Selector,
    Signature, Type, TypeParam, TypeVar, map_types,
)


class ArityError(ValueError):
    """Selector type-argument count differs from the declared type parameters."""


@dataclass(frozen=True)
class MethodEntry:
    owner: str
    sig: Signature
    body: Optional[Expr] = None  # None for interface signatures


class ClassTable:
    """Immutable map from declaration name to declaration."""

    def __init__(self, decls: Mapping[str, Decl]):
        self._decls = dict(decls)

    def __contains__(self, name):
        return name in self._decls

    def __getitem__(self, name) -> Decl:
        return self._decls[name]

    def __iter__(self):
        return iter(self._decls)

    def __len__(self):
        return len(self._decls)

    def __eq__(self, other):
        return isinstance(other, ClassTable) and self._decls == other._decls

    def __hash__(self):
        return hash(frozenset(self._decls.items()))

    def __repr__(self):
        return f"ClassTable({sorted(self._decls)})"

    def get(self, name) -> Optional[Decl]:
        return self._decls.get(name)

    def decls(self):
        return list(self._decls.values())

    def is_class(self, name) -> bool:
        return isinstance(self._decls.get(name), ClassDecl)

    def is_interface(self, name) -> bool:
        return isinstance(self._decls.get(name), InterfaceDecl)

    def entries(self, name) -> list[MethodEntry]:
        d = self._decls[name]
        if isinstance(d, ClassDecl):
            return [MethodEntry(name, m.sig, m.body) for m in d.methods]
        return [MethodEntry(name, s) for s in d.sigs]

    def replace(self, decl: Decl) -> "ClassTable":
        """Copy of the table with one declaration swapped (used for elaboration and fixtures)."""
        decls = dict(self._decls)
        decls[decl.name] = decl
        return ClassTable(decls)


def build_table(program: Program) -> ClassTable:
    """Collect the program's declarations. Raises DiagnosticError(E102) on duplicates."""
    decls: dict[str, Decl] = {}
    errors = []
    for d in program.decls:
        if d.name in decls:
            errors.append(Diagnostic("E102", f"duplicate declaration '{d.name}'", d.span))
        else:
            decls[d.name] = d
    if errors:
        raise DiagnosticError(errors)
    return ClassTable(decls)


def lookup_method(table: ClassTable, cls: str, name: str) -> Optional[MethodEntry]:
    for entry in table.entries(cls):
        if entry.sig.name == name:
            return entry
    return None


def substitute(node, mapping: Mapping[str, Type]):
    """Replace free type variables by name.

    Works on types, selectors, effects, expressions, signatures, methods and
    declarations. A signature's own type parameters bind their names, so
    those are removed from ``mapping`` before descending into it.
    """
    if isinstance(node, ClassDecl):
        shell = map_types(ClassDecl(node.name, node.fields, node.interfaces, (), node.span),
                          lambda t: substitute(t, mapping))
        return ClassDecl(shell.name, shell.fields, shell.interfaces,
                         tuple(substitute(m, mapping) for m in node.methods), node.span)
    if isinstance(node, InterfaceDecl):
        return InterfaceDecl(node.name, tuple(substitute(s, mapping) for s in node.sigs), node.span)
    if isinstance(node, Signature):
        bound = {tp.var.name for tp in node.type_params}
        mapping = {k: v for k, v in mapping.items() if k not in bound}
    if isinstance(node, Method):
        inner = {k: v for k, v in mapping.items() if k not in {x.name for x in node.sig.type_vars}}
        return Method(substitute(node.sig, mapping), substitute(node.body, inner))
    if not mapping:
        return node

    def fn(t):
        if isinstance(t, TypeVar) and t.name in mapping:
            return mapping[t.name]
        return t

    return map_types(node, fn)


def instantiate(table: ClassTable, cls: str, sel: Selector) -> Optional[MethodEntry]:
    """``Σ(C.mm<T̄>)``: the named method with its type parameters replaced by ``sel``'s arguments.

    Binding occurrences in the type-parameter list are kept as written; only
    the bounds on the right of ``:`` are substituted.
    """
    entry = lookup_method(table, cls, sel.name)
    if entry is None:
        return None
    sig = entry.sig
    if len(sel.type_args) != len(sig.type_params):
        raise ArityError(
            f"{cls}.{sel.name} expects {len(sig.type_params)} type argument(s), "
            f"got {len(sel.type_args)}")
    if not sig.type_params:
        return entry
    mapping = {tp.var.name: t for tp, t in zip(sig.type_params, sel.type_args)}

    def fn(t):
        if isinstance(t, TypeVar) and t.name in mapping:
            return mapping[t.name]
        return t

    new_sig = Signature(
        fn(sig.ret),
        sig.name,
        tuple(TypeParam(tp.var, fn(tp.bound)) for tp in sig.type_params),
        tuple(Param(fn(p.type), p.name, p.span) for p in sig.params),
        tuple(map_types(e, fn) for e in sig.effects),
        sig.span,
    )
    body = None if entry.body is None else map_types(entry.body, fn)
    return MethodEntry(entry.owner, new_sig, body)


@dataclass(frozen=True)
class TypeEnv:
    """Δ: type-variable bounds. ``env(C) == C`` for any class name C."""
    bounds: tuple[tuple[str, ClassName], ...] = ()

    @classmethod
    def of(cls, type_params) -> "TypeEnv":
        return cls(tuple((tp.var.name, tp.bound) for tp in type_params))

    @classmethod
    def from_dict(cls, d: Mapping[str, str]) -> "TypeEnv":
        return cls(tuple((k, ClassName(v)) for k, v in d.items()))

    def __call__(self, t: Type) -> Optional[ClassName]:
        if isinstance(t, ClassName):
            return t
        for name, bound in self.bounds:
            if name == t.name:
                return bound
        return None

    def __contains__(self, var: str):
        return any(name == var for name, _ in self.bounds)


# Γ: variable name -> type. Plain dict; methods never shadow.
VarEnv = dict
