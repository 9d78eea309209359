"""Arithmetic evaluation: is/2 and the numeric comparison family.

Integers are arbitrary precision; / returns an integer when exact, a float
otherwise; // and rem truncate toward zero, mod follows the divisor's sign.
Everything else is by the ISO evaluable-functor table.
"""

from __future__ import annotations

import math

from .._core import Atom, Compound, Num, Var
from ..errors import BallError, evaluation_error, instantiation, type_error


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def _int_arg(v, isf, culprit, ctx):
    if isf:
        raise BallError(type_error("integer", culprit, ctx))
    return v


def _guard_float(v, ctx):
    if isinstance(v, float) and (math.isinf(v) or math.isnan(v)):
        raise BallError(evaluation_error("float_overflow", ctx))
    return v


def arith_eval(t, ctx):
    """Evaluate an arithmetic expression term to (value, is_float)."""
    tt = type(t)
    if tt is Num:
        return t.value, t.is_float
    if tt is Var:
        raise BallError(instantiation(ctx))
    if tt is not Compound:
        raise BallError(type_error("evaluable", t, ctx))
    n = len(t.args)
    f = t.functor
    if n == 0:
        if f == "pi":
            return math.pi, True
        if f == "e":
            return math.e, True
        if f == "epsilon":
            return 2.220446049250313e-16, True
        raise BallError(
            type_error("evaluable", Compound("/", (Atom(f), Num(0))), ctx)
        )
    if n == 1:
        a, fa = arith_eval(t.args[0], ctx)
        return _eval1(f, a, fa, t, ctx)
    if n == 2:
        a, fa = arith_eval(t.args[0], ctx)
        b, fb = arith_eval(t.args[1], ctx)
        return _eval2(f, a, fa, b, fb, t, ctx)
    raise BallError(
        type_error("evaluable", Compound("/", (Atom(f), Num(n))), ctx)
    )


def _eval1(f, a, fa, t, ctx):
    if f == "-":
        return -a, fa
    if f == "+":
        return a, fa
    if f == "abs":
        return abs(a), fa
    if f == "sign":
        if fa:
            return (0.0 if a == 0 else math.copysign(1.0, a)), True
        return (a > 0) - (a < 0), False
    if f == "min" or f == "max":
        raise BallError(type_error("evaluable", Compound("/", (Atom(f), Num(1))), ctx))
    if f == "sqrt":
        if a < 0:
            raise BallError(evaluation_error("undefined", ctx))
        return math.sqrt(a), True
    if f in ("sin", "cos", "tan", "exp"):
        return _guard_float(getattr(math, f)(a), ctx), True
    if f in ("asin", "acos"):
        if not -1 <= a <= 1:
            raise BallError(evaluation_error("undefined", ctx))
        return getattr(math, f)(a), True
    if f == "atan":
        return math.atan(a), True
    if f == "log":
        if a <= 0:
            raise BallError(evaluation_error("undefined", ctx))
        return math.log(a), True
    if f == "float":
        return float(a), True
    if f == "integer":
        return int(round(a)), False
    if f == "truncate":
        return math.trunc(a), False
    if f == "round":
        return math.floor(a + 0.5) if fa else a, False
    if f == "ceiling":
        return math.ceil(a), False
    if f == "floor":
        return math.floor(a), False
    if f == "float_integer_part":
        return float(math.trunc(a)), True
    if f == "float_fractional_part":
        return a - math.trunc(a), True
    if f == "\\":
        return ~_int_arg(a, fa, t.args[0], ctx), False
    if f == "msb":
        v = _int_arg(a, fa, t.args[0], ctx)
        if v <= 0:
            raise BallError(evaluation_error("undefined", ctx))
        return v.bit_length() - 1, False
    raise BallError(type_error("evaluable", Compound("/", (Atom(f), Num(1))), ctx))


def _eval2(f, a, fa, b, fb, t, ctx):
    isf = fa or fb
    if f == "+":
        return _guard_float(a + b, ctx), isf
    if f == "-":
        return _guard_float(a - b, ctx), isf
    if f == "*":
        return _guard_float(a * b, ctx), isf
    if f == "/":
        if b == 0:
            raise BallError(evaluation_error("zero_divisor", ctx))
        if not isf:
            if a % b == 0:
                return _trunc_div(a, b), False
            return a / b, True
        return _guard_float(a / b, ctx), True
    if f == "//":
        ia = _int_arg(a, fa, t.args[0], ctx)
        ib = _int_arg(b, fb, t.args[1], ctx)
        if ib == 0:
            raise BallError(evaluation_error("zero_divisor", ctx))
        return _trunc_div(ia, ib), False
    if f == "div":
        ia = _int_arg(a, fa, t.args[0], ctx)
        ib = _int_arg(b, fb, t.args[1], ctx)
        if ib == 0:
            raise BallError(evaluation_error("zero_divisor", ctx))
        return ia // ib, False
    if f == "mod":
        ia = _int_arg(a, fa, t.args[0], ctx)
        ib = _int_arg(b, fb, t.args[1], ctx)
        if ib == 0:
            raise BallError(evaluation_error("zero_divisor", ctx))
        return ia % ib, False  # sign follows the divisor
    if f == "rem":
        ia = _int_arg(a, fa, t.args[0], ctx)
        ib = _int_arg(b, fb, t.args[1], ctx)
        if ib == 0:
            raise BallError(evaluation_error("zero_divisor", ctx))
        return ia - _trunc_div(ia, ib) * ib, False
    if f == "min":
        return (a, fa) if (a < b or (a == b and not fa)) else (b, fb)
    if f == "max":
        return (a, fa) if (a > b or (a == b and not fa)) else (b, fb)
    if f == "**":
        if a == 0 and b < 0:
            raise BallError(evaluation_error("zero_divisor", ctx))
        try:
            return _guard_float(float(a) ** float(b), ctx), True
        except (OverflowError, ValueError):
            raise BallError(evaluation_error("float_overflow", ctx))
    if f == "^":
        if not isf:
            if b < 0:
                if a in (1, -1):
                    return a ** b, False
                raise BallError(type_error("float", t.args[0], ctx))
            return a ** b, False
        try:
            return _guard_float(float(a) ** float(b), ctx), True
        except (OverflowError, ValueError):
            raise BallError(evaluation_error("undefined", ctx))
    if f == "atan" or f == "atan2":
        return math.atan2(a, b), True
    if f == ">>":
        return _int_arg(a, fa, t.args[0], ctx) >> _int_arg(b, fb, t.args[1], ctx), False
    if f == "<<":
        return _int_arg(a, fa, t.args[0], ctx) << _int_arg(b, fb, t.args[1], ctx), False
    if f == "/\\":
        return _int_arg(a, fa, t.args[0], ctx) & _int_arg(b, fb, t.args[1], ctx), False
    if f == "\\/":
        return _int_arg(a, fa, t.args[0], ctx) | _int_arg(b, fb, t.args[1], ctx), False
    if f == "xor":
        return _int_arg(a, fa, t.args[0], ctx) ^ _int_arg(b, fb, t.args[1], ctx), False
    if f == "gcd":
        return math.gcd(_int_arg(a, fa, t.args[0], ctx), _int_arg(b, fb, t.args[1], ctx)), False
    raise BallError(type_error("evaluable", Compound("/", (Atom(f), Num(2))), ctx))


def bi_is(thread, point, atom):
    value, isf = arith_eval(atom.args[1], "is/2")
    thread.unify_push(point, atom.args[0], Num(value, isf))


def _cmp(op):
    def native(thread, point, atom):
        ctx = f"{op.__name__}/2"
        a, _ = arith_eval(atom.args[0], ctx)
        b, _ = arith_eval(atom.args[1], ctx)
        if op(a, b):
            thread.success(point)

    return native


def _eq(a, b):
    return a == b


def _ne(a, b):
    return a != b


def _lt(a, b):
    return a < b


def _gt(a, b):
    return a > b


def _le(a, b):
    return a <= b


def _ge(a, b):
    return a >= b


PREDICATES = {
    "is/2": bi_is,
    "=:=/2": _cmp(_eq),
    "=\\=/2": _cmp(_ne),
    "</2": _cmp(_lt),
    ">/2": _cmp(_gt),
    "=</2": _cmp(_le),
    ">=/2": _cmp(_ge),
}
