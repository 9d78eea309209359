"""ISO error balls and the Python-side exceptions the engine raises.

Builtins never raise for Prolog-level failures; they push error states whose
ball has the standard error(Kind, Context) shape built here.
"""

from __future__ import annotations

from ._core import Atom, Compound, Num, Term


def _ctx(context) -> Term:
    if isinstance(context, Term):
        return context
    if isinstance(context, str) and "/" in context:
        name, _, arity = context.rpartition("/")
        return Compound("/", (Atom(name), Num(int(arity))))
    return Atom(str(context))


def error_ball(kind: Term, context) -> Compound:
    return Compound("error", (kind, _ctx(context)))


def instantiation(context) -> Compound:
    return error_ball(Atom("instantiation_error"), context)


def type_error(expected: str, culprit: Term, context) -> Compound:
    return error_ball(Compound("type_error", (Atom(expected), culprit)), context)


def domain_error(domain: str, culprit: Term, context) -> Compound:
    return error_ball(Compound("domain_error", (Atom(domain), culprit)), context)


def existence_error(kind: str, culprit: Term, context) -> Compound:
    return error_ball(Compound("existence_error", (Atom(kind), culprit)), context)


def permission_error(action: str, kind: str, culprit: Term, context) -> Compound:
    return error_ball(
        Compound("permission_error", (Atom(action), Atom(kind), culprit)), context
    )


def evaluation_error(what: str, context) -> Compound:
    return error_ball(Compound("evaluation_error", (Atom(what),)), context)


def representation_error(what: str, context) -> Compound:
    return error_ball(Compound("representation_error", (Atom(what),)), context)


def syntax_error_ball(detail: str, context) -> Compound:
    return error_ball(Compound("syntax_error", (Atom(detail),)), context)


def system_error(detail: str, context) -> Compound:
    return error_ball(Compound("system_error", (Atom(detail),)), context)


class BallError(Exception):
    """Internal: raised inside a native procedure to signal a Prolog error;
    the step loop turns it into an error state on the stack."""

    def __init__(self, ball: Term):
        super().__init__(repr(ball))
        self.ball = ball


class PrologError(Exception):
    """An uncaught Prolog error surfaced to the embedding host."""

    def __init__(self, ball: Term, rendered: str = ""):
        super().__init__(rendered or repr(ball))
        self.ball = ball


class LimitExceeded(Exception):
    """Inference budget exhausted (deferred facade only; resumable)."""


class Halt(Exception):
    """halt/0 or halt/1 executed; carries the exit code."""

    def __init__(self, code: int = 0):
        super().__init__(f"halt({code})")
        self.code = code


class SibylogSyntaxError(Exception):
    """Host-side syntax error with source location; also carries the ball."""

    def __init__(self, detail: str, line: int, column: int, text: str = ""):
        super().__init__(f"syntax error at line {line}, column {column}: {detail}")
        self.detail = detail
        self.line = line
        self.column = column
        self.text = text

    def ball(self) -> Compound:
        where = Compound(
            "at", (Num(self.line), Num(self.column))
        )
        return Compound(
            "error",
            (Compound("syntax_error", (Atom(self.detail),)), where),
        )
