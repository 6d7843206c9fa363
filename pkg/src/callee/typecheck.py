"""Expression typing with effects, method and declaration checking, refinement.

Typing is algorithmic: every expression gets its minimal type, and the
subsumption rule is replaced by explicit ``≤`` checks where a type is
consumed (constructor arguments, call arguments, method results). Call
effects record the receiver's minimal type, which gives the least effect
list since effects are covariant in their receiver.
"""

from __future__ import annotations

from dataclasses import dataclass

from callee.classtable import (
    ClassTable, TypeEnv, build_table, instantiate,
)
from callee.diagnostics import Diagnostic, DiagnosticError, sort_diagnostics
from callee.relations import (
    effect_wf, is_subeffect, is_subtype, type_wf,
)
from callee.syntax.ast import (
    Call, ClassDecl, ClassName, FieldAccess, InterfaceDecl, Method, MethodEffect,
    New, Program, Restrict, Signature, Type, TypeParam, TypeVar, Var,
    map_types, show_effects,
)
from callee.syntax.parser import parse_program


class TypeCheckError(DiagnosticError):
    def __init__(self, diag: Diagnostic):
        super().__init__([diag])
        self.diagnostic = diag


@dataclass(frozen=True)
class TypedExpr:
    expr: object      # the input expression with Call.recv_type filled in
    type: Type
    effects: tuple


def _fail(code, message, span):
    raise TypeCheckError(Diagnostic(code, message, span))


def type_of(table: ClassTable, env: TypeEnv, vars: dict, e) -> TypedExpr:
    """``Δ|Γ ⊢ e : T | ε̄`` with ``T`` minimal. Raises TypeCheckError."""
    if isinstance(e, Var):
        if e.name not in vars:
            _fail("E110", f"unbound variable '{e.name}'", e.span)
        return TypedExpr(e, vars[e.name], ())

    if isinstance(e, New):
        name = e.cls.name
        if name not in table:
            _fail("E101", f"unknown type '{name}'", e.cls.span)
        decl = table[name]
        if not isinstance(decl, ClassDecl):
            _fail("E107", f"cannot instantiate interface '{name}'", e.span)
        if len(e.args) != len(decl.fields):
            _fail("E201", f"new {name} expects {len(decl.fields)} argument(s), "
                  f"got {len(e.args)}", e.span)
        args, effects = [], []
        for arg, fld in zip(e.args, decl.fields):
            ta = type_of(table, env, vars, arg)
            if not is_subtype(table, env, ta.type, fld.type):
                _fail("E201", f"argument for field '{fld.name}' has type {ta.type}, "
                      f"expected a subtype of {fld.type}", arg.span)
            args.append(ta.expr)
            effects.extend(ta.effects)
        return TypedExpr(New(e.cls, tuple(args), e.span), ClassName(name), tuple(effects))

    if isinstance(e, FieldAccess):
        tr = type_of(table, env, vars, e.recv)
        bound = env(tr.type)
        decl = table.get(bound.name) if bound is not None else None
        if not isinstance(decl, ClassDecl):
            _fail("E111", f"field access '.{e.field}' on non-class type {tr.type}", e.span)
        for fld in decl.fields:
            if fld.name == e.field:
                return TypedExpr(FieldAccess(tr.expr, e.field, e.span), fld.type, tr.effects)
        _fail("E111", f"class '{decl.name}' has no field '{e.field}'", e.span)

    if isinstance(e, Call):
        tr = type_of(table, env, vars, e.recv)
        recv_t = tr.type
        call_effect = MethodEffect(recv_t, e.selector, e.span)
        bad = effect_wf(table, env, call_effect)
        if bad:
            d = bad[0]
            _fail(d.code, d.message, e.span)
        entry = instantiate(table, env(recv_t).name, e.selector)
        sig = entry.sig
        if len(e.args) != len(sig.params):
            _fail("E201", f"{env(recv_t).name}.{sig.name} expects {len(sig.params)} "
                  f"argument(s), got {len(e.args)}", e.span)
        args, effects = [], list(tr.effects)
        for arg, param in zip(e.args, sig.params):
            ta = type_of(table, env, vars, arg)
            if not is_subtype(table, env, ta.type, param.type):
                _fail("E201", f"argument '{param.name}' has type {ta.type}, "
                      f"expected a subtype of {param.type}", arg.span)
            args.append(ta.expr)
            effects.extend(ta.effects)
        effects.append(call_effect)
        out = Call(tr.expr, e.selector, tuple(args), e.span, recv_t)
        return TypedExpr(out, sig.ret, tuple(effects))

    if isinstance(e, Restrict):
        for eff in e.bound:
            bad = effect_wf(table, env, eff)
            if bad:
                raise TypeCheckError(bad[0])
        tb = type_of(table, env, vars, e.body)
        if not is_subeffect(table, env, tb.effects, e.bound):
            _fail("E204", f"effects {show_effects(tb.effects)} are not sub-effects of "
                  f"restrict{show_effects(e.bound)}", e.span)
        return TypedExpr(Restrict(e.bound, tb.expr, e.span), tb.type, tb.effects)

    raise TypeError(f"not an expression: {e!r}")


def _duplicates(items, what, span_of):
    seen, diags = set(), []
    for it, name in items:
        if name in seen:
            diags.append(Diagnostic("E102", f"duplicate {what} '{name}'", span_of(it)))
        seen.add(name)
    return diags


def check_sig(table: ClassTable, sig: Signature) -> list[Diagnostic]:
    """``⊢ SIG``: bounds are declared names; return, parameter and effect types are well-formed."""
    diags = _duplicates(((tp, tp.var.name) for tp in sig.type_params), "type parameter",
                        lambda tp: tp.var.span)
    diags += _duplicates(((p, p.name) for p in sig.params), "parameter", lambda p: p.span)
    diags += [Diagnostic("E102", "parameter may not be named 'this'", p.span)
              for p in sig.params if p.name == "this"]
    for tp in sig.type_params:
        if not isinstance(tp.bound, ClassName) or tp.bound.name not in table:
            diags.append(Diagnostic("E101", f"unknown bound '{tp.bound}'", tp.bound.span))
    env = TypeEnv.of(sig.type_params)
    diags += type_wf(table, env, sig.ret)
    for p in sig.params:
        diags += type_wf(table, env, p.type)
    for eff in sig.effects:
        diags += effect_wf(table, env, eff)
    return diags


def method_env(owner: str, sig: Signature) -> tuple[TypeEnv, dict]:
    vars = {"this": ClassName(owner)}
    vars.update((p.name, p.type) for p in sig.params)
    return TypeEnv.of(sig.type_params), vars


def check_method(table: ClassTable, owner: str, sig: Signature, body) -> list[Diagnostic]:
    """``C ⊢ SIG = e``."""
    diags = check_sig(table, sig)
    env, vars = method_env(owner, sig)
    try:
        typed = type_of(table, env, vars, body)
    except TypeCheckError as err:
        return diags + [err.diagnostic]
    if not is_subtype(table, env, typed.type, sig.ret):
        diags.append(Diagnostic(
            "E201", f"body of {owner}.{sig.name} has type {typed.type}, "
            f"expected a subtype of {sig.ret}", body.span))
    if not is_subeffect(table, env, typed.effects, sig.effects):
        diags.append(Diagnostic(
            "E202", f"body of {owner}.{sig.name} has effects {show_effects(typed.effects)}, "
            f"not sub-effects of its annotation {show_effects(sig.effects)}", body.span))
    return diags


def _rename_type_params(sig: Signature, new_vars) -> Signature:
    """Alpha-rename a signature's type parameters (binders included)."""
    mapping = {tp.var.name: TypeVar(v.name) for tp, v in zip(sig.type_params, new_vars)}

    def fn(t):
        if isinstance(t, TypeVar) and t.name in mapping:
            return mapping[t.name]
        return t

    renamed = map_types(sig, fn)
    return Signature(
        renamed.ret, renamed.name,
        tuple(TypeParam(mapping[tp.var.name], tp.bound) for tp in renamed.type_params),
        renamed.params, renamed.effects, renamed.span)


def check_refinement(table: ClassTable, class_methods, iface_sig: Signature,
                     iface_name: str, cls_name: str = "", span=None) -> list[Diagnostic]:
    """``SIG=e ◁ SIG'``: some class method implements ``iface_sig``."""
    impl = next((m.sig for m in class_methods if m.sig.name == iface_sig.name), None)
    where = f"{iface_name}.{iface_sig.name}"
    if impl is None or len(impl.params) != len(iface_sig.params):
        if span is None:
            span = iface_sig.span
        return [Diagnostic("E205", f"class '{cls_name}' does not implement {where}", span)]
    if len(impl.type_params) != len(iface_sig.type_params):
        return [Diagnostic("E203", f"{cls_name}.{impl.name} declares {len(impl.type_params)} "
                           f"type parameter(s), {where} declares {len(iface_sig.type_params)}",
                           impl.span)]
    impl = _rename_type_params(impl, iface_sig.type_vars)
    env = TypeEnv.of(iface_sig.type_params)
    diags = []

    def fail(msg):
        diags.append(Diagnostic("E203", f"{cls_name}.{impl.name} does not refine {where}: {msg}",
                                impl.span))

    if not is_subtype(table, env, impl.ret, iface_sig.ret):
        fail(f"return type {impl.ret} is not a subtype of {iface_sig.ret}")
    for p1, p2 in zip(impl.params, iface_sig.params):
        if not is_subtype(table, env, p2.type, p1.type):
            fail(f"parameter '{p1.name}' type {p1.type} is not a supertype of {p2.type}")
    for tp1, tp2 in zip(impl.type_params, iface_sig.type_params):
        if not is_subtype(table, env, tp2.bound, tp1.bound):
            fail(f"bound {tp1.bound} of {tp1.var} is not a supertype of {tp2.bound}")
    if not is_subeffect(table, env, impl.effects, iface_sig.effects):
        fail(f"effects {show_effects(impl.effects)} are not sub-effects of "
             f"{show_effects(iface_sig.effects)}")
    return diags


def check_decl(table: ClassTable, d) -> list[Diagnostic]:
    """``⊢ D``."""
    if isinstance(d, InterfaceDecl):
        diags = _duplicates(((s, s.name) for s in d.sigs), "method", lambda s: s.span)
        for s in d.sigs:
            diags += check_sig(table, s)
        return diags

    diags = _duplicates(((f, f.name) for f in d.fields), "field", lambda f: f.span)
    diags += _duplicates(((m, m.sig.name) for m in d.methods), "method", lambda m: m.sig.span)
    diags += _duplicates(((i, i.name) for i in d.interfaces), "interface", lambda i: i.span)
    for f in d.fields:
        if f.type.name not in table:
            diags.append(Diagnostic("E101", f"unknown type '{f.type}'", f.type.span))
    for m in d.methods:
        diags += check_method(table, d.name, m.sig, m.body)
    for i in dict.fromkeys(d.interfaces):
        if i.name not in table:
            diags.append(Diagnostic("E101", f"unknown type '{i}'", i.span))
        elif not isinstance(table[i.name], InterfaceDecl):
            diags.append(Diagnostic("E106", f"'{i}' is not an interface", i.span))
        else:
            for s in table[i.name].sigs:
                diags += check_refinement(table, d.methods, s, i.name, d.name, i.span)
    return diags


def check_program(table: ClassTable, program: Program) -> list[Diagnostic]:
    """All declarations, then ``main`` under empty environments. Empty list = well-typed."""
    diags = []
    for d in program.decls:
        diags += check_decl(table, d)
    if program.main is not None:
        try:
            type_of(table, TypeEnv(), {}, program.main)
        except TypeCheckError as err:
            diags.append(err.diagnostic)
    return sort_diagnostics(diags)


def check_source(text: str):
    """Parse, build and check. Returns (program, table, diagnostics); the first two
    are None when parsing or table construction failed."""
    try:
        program = parse_program(text)
    except DiagnosticError as err:
        return None, None, err.diagnostics
    try:
        table = build_table(program)
    except DiagnosticError as err:
        return program, None, err.diagnostics
    return program, table, check_program(table, program)


def elaborate(table: ClassTable, main=None):
    """Fill in ``Call.recv_type`` throughout method bodies and ``main``.

    Bodies that fail to type are left as written, so unchecked programs can
    still run.
    """
    out = table
    for name in table:
        d = table[name]
        if not isinstance(d, ClassDecl):
            continue
        methods = []
        for m in d.methods:
            env, vars = method_env(name, m.sig)
            try:
                methods.append(Method(m.sig, type_of(table, env, vars, m.body).expr))
            except TypeCheckError:
                methods.append(m)
        out = out.replace(ClassDecl(d.name, d.fields, d.interfaces, tuple(methods), d.span))
    if main is not None:
        try:
            main = type_of(table, TypeEnv(), {}, main).expr
        except TypeCheckError:
            pass
    return out, main
