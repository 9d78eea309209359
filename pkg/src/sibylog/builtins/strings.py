"""Atom and number text builtins: atom_codes, sub_atom and friends."""

from __future__ import annotations

from .._core import (
    Atom,
    Compound,
    Num,
    Var,
    is_atom,
    is_proper_list,
    list_parts,
    make_list,
    replace_selected,
)
from ..errors import (
    BallError,
    domain_error,
    instantiation,
    representation_error,
    syntax_error_ball,
    type_error,
)


def _atom_text(t, ctx, allow_number=False):
    if type(t) is Var:
        raise BallError(instantiation(ctx))
    if is_atom(t):
        return t.functor
    if allow_number and type(t) is Num:
        from ..reader import format_float

        return format_float(t.value) if t.is_float else str(t.value)
    raise BallError(type_error("atom", t, ctx))


def _codes_text(lst, ctx):
    """Decode a proper list of character codes into text."""
    if not is_proper_list(lst):
        raise BallError(instantiation(ctx))
    items, _ = list_parts(lst)
    out = []
    for it in items:
        if type(it) is Var:
            raise BallError(instantiation(ctx))
        if type(it) is not Num or it.is_float or not 0 <= it.value <= 0x10FFFF:
            raise BallError(representation_error("character_code", ctx))
        out.append(chr(it.value))
    return "".join(out)


def _chars_text(lst, ctx):
    if not is_proper_list(lst):
        raise BallError(instantiation(ctx))
    items, _ = list_parts(lst)
    out = []
    for it in items:
        if type(it) is Var:
            raise BallError(instantiation(ctx))
        if not is_atom(it) or len(it.functor) != 1:
            raise BallError(type_error("character", it, ctx))
        out.append(it.functor)
    return "".join(out)


def bi_atom_length(thread, point, atom):
    a, n = atom.args
    text = _atom_text(a, "atom_length/2")
    if type(n) is not Var:
        if type(n) is not Num or n.is_float:
            raise BallError(type_error("integer", n, "atom_length/2"))
        if n.value < 0:
            raise BallError(domain_error("not_less_than_zero", n, "atom_length/2"))
    thread.unify_push(point, n, Num(len(text)))


def bi_atom_codes(thread, point, atom):
    a, codes = atom.args
    if type(a) is not Var:
        text = _atom_text(a, "atom_codes/2", allow_number=True)
        thread.unify_push(point, codes, make_list([Num(ord(c)) for c in text]))
        return
    thread.unify_push(point, a, Atom(_codes_text(codes, "atom_codes/2")))


def bi_atom_chars(thread, point, atom):
    a, chars = atom.args
    if type(a) is not Var:
        text = _atom_text(a, "atom_chars/2", allow_number=True)
        thread.unify_push(point, chars, make_list([Atom(c) for c in text]))
        return
    thread.unify_push(point, a, Atom(_chars_text(chars, "atom_chars/2")))


def bi_char_code(thread, point, atom):
    ch, code = atom.args
    if type(ch) is Var and type(code) is Var:
        raise BallError(instantiation("char_code/2"))
    if type(ch) is not Var:
        if not is_atom(ch) or len(ch.functor) != 1:
            raise BallError(type_error("character", ch, "char_code/2"))
        thread.unify_push(point, code, Num(ord(ch.functor)))
        return
    if type(code) is not Num or code.is_float:
        raise BallError(type_error("integer", code, "char_code/2"))
    if not 0 <= code.value <= 0x10FFFF:
        raise BallError(representation_error("character_code", "char_code/2"))
    thread.unify_push(point, ch, Atom(chr(code.value)))


def bi_atom_concat(thread, point, atom):
    a, b, c = atom.args
    ctx = "atom_concat/3"
    if type(a) is not Var and type(b) is not Var:
        thread.unify_push(
            point, c, Atom(_atom_text(a, ctx, True) + _atom_text(b, ctx, True))
        )
        return
    text = _atom_text(c, ctx, True)  # instantiation error if c unbound too
    states = []
    for i in range(len(text) + 1):
        conj = Compound(
            ",",
            (Compound("=", (a, Atom(text[:i]))), Compound("=", (b, Atom(text[i:])))),
        )
        states.append(thread.child(point, replace_selected(point.goal, conj)))
    thread.prepend(states)


def bi_sub_atom(thread, point, atom):
    whole, before, length, after, sub = atom.args
    ctx = "sub_atom/5"
    text = _atom_text(whole, ctx)
    n = len(text)

    def want(t):
        if type(t) is Var:
            return None
        if type(t) is not Num or t.is_float:
            raise BallError(type_error("integer", t, ctx))
        return t.value

    wb, wl, wa = want(before), want(length), want(after)
    wsub = None
    if type(sub) is not Var:
        wsub = _atom_text(sub, ctx)
    states = []
    for b in range(n + 1) if wb is None else [wb]:
        if b < 0 or b > n:
            continue
        lengths = range(n - b + 1) if wl is None else [wl]
        if wsub is not None:
            lengths = [len(wsub)]
        if wa is not None:
            lengths = [n - b - wa]
        for ln in lengths:
            if ln < 0 or b + ln > n:
                continue
            s = text[b : b + ln]
            if wsub is not None and s != wsub:
                continue
            conj = Compound(
                ",",
                (
                    Compound("=", (before, Num(b))),
                    Compound(
                        ",",
                        (
                            Compound("=", (length, Num(ln))),
                            Compound(
                                ",",
                                (
                                    Compound("=", (after, Num(n - b - ln))),
                                    Compound("=", (sub, Atom(s))),
                                ),
                            ),
                        ),
                    ),
                ),
            )
            states.append(thread.child(point, replace_selected(point.goal, conj)))
    thread.prepend(states)


def bi_number_codes(thread, point, atom):
    n, codes = atom.args
    ctx = "number_codes/2"
    if type(n) is not Var:
        if type(n) is not Num:
            raise BallError(type_error("number", n, ctx))
        from ..reader import format_float

        text = format_float(n.value) if n.is_float else str(n.value)
        thread.unify_push(point, codes, make_list([Num(ord(c)) for c in text]))
        return
    text = _codes_text(codes, ctx)
    from ..reader import parse_number_text

    parsed = parse_number_text(text)
    if parsed is None:
        raise BallError(syntax_error_ball("illegal_number", ctx))
    thread.unify_push(point, n, parsed)


def bi_number_chars(thread, point, atom):
    n, chars = atom.args
    ctx = "number_chars/2"
    if type(n) is not Var:
        if type(n) is not Num:
            raise BallError(type_error("number", n, ctx))
        from ..reader import format_float

        text = format_float(n.value) if n.is_float else str(n.value)
        thread.unify_push(point, chars, make_list([Atom(c) for c in text]))
        return
    text = _chars_text(chars, ctx)
    from ..reader import parse_number_text

    parsed = parse_number_text(text)
    if parsed is None:
        raise BallError(syntax_error_ball("illegal_number", ctx))
    thread.unify_push(point, n, parsed)


PREDICATES = {
    "atom_length/2": bi_atom_length,
    "atom_codes/2": bi_atom_codes,
    "atom_chars/2": bi_atom_chars,
    "char_code/2": bi_char_code,
    "atom_concat/3": bi_atom_concat,
    "sub_atom/5": bi_sub_atom,
    "number_codes/2": bi_number_codes,
    "number_chars/2": bi_number_chars,
}
