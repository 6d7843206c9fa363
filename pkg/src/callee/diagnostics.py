"""Checker output: coded diagnostics and their one-line rendering."""

from __future__ import annotations

from dataclasses import dataclass

from callee.syntax.ast import NO_SPAN, Span

CODES = {
    "E001": "parse error",
    "E101": "unknown type",
    "E102": "duplicate name",
    "E103": "type-argument arity mismatch",
    "E104": "unknown method",
    "E105": "bound violation",
    "E106": "implements a non-interface",
    "E107": "new on an interface",
    "E110": "unbound variable",
    "E111": "bad field access",
    "E201": "subtype failure",
    "E202": "method effect exceeded",
    "E203": "refinement failure",
    "E204": "restrict violation",
    "E205": "missing implementation",
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Span = NO_SPAN
    severity: str = "error"

    def __post_init__(self):
        if self.code not in CODES:
            raise ValueError(f"unknown diagnostic code {self.code}")

    def sort_key(self):
        return (self.span.line, self.span.col, self.code, self.message)

    def render(self, filename: str) -> str:
        return (f"{self.severity}[{self.code}]: {self.message} "
                f"--> {filename}:{self.span.line}:{self.span.col}")


class DiagnosticError(Exception):
    """Raised by phases that cannot produce a result at all."""

    def __init__(self, diagnostics):
        self.diagnostics = sorted(diagnostics, key=Diagnostic.sort_key)
        super().__init__("; ".join(f"{d.code}: {d.message}" for d in self.diagnostics))


def sort_diagnostics(diags):
    return sorted(diags, key=Diagnostic.sort_key)
