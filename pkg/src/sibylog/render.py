"""Operator-aware term rendering and answer formatting.

render_term is the write/writeq engine: minimal parentheses, list notation,
quoting on demand, numbervars, and a depth cap that elides with `...`.
With quoted=True, ignore_ops=False and max_depth=0 the output re-parses to a
structurally equal term under the same operator table.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._core import Compound, HostValue, Num, Term, Var
from .reader import OperatorTable, SYMBOL_CHARS, format_float

# Applying a cyclic substitution (occurs_check off) is depth-capped here.
CYCLE_RENDER_DEPTH = 64


@dataclass
class WriteOptions:
    quoted: bool = False
    ignore_ops: bool = False
    numbervars: bool = True
    max_depth: int = 0  # 0 = unlimited


DEFAULT_OPTIONS = WriteOptions()


_IDENT_OK = set("abcdefghijklmnopqrstuvwxyz")
_SOLO_OK = {"!", ";", "[]", "{}"}


def atom_needs_quotes(name: str) -> bool:
    if name in _SOLO_OK:
        return False
    if not name:
        return True
    c = name[0]
    if c in _IDENT_OK:
        return not all(ch == "_" or ch.isalnum() for ch in name)
    if all(ch in SYMBOL_CHARS for ch in name):
        return False
    return True


def _quote_atom(name: str) -> str:
    out = name.replace("\\", "\\\\").replace("'", "\\'")
    out = out.replace("\n", "\\n").replace("\t", "\\t")
    return f"'{out}'"


class _Renderer:
    def __init__(self, options: WriteOptions, table: OperatorTable):
        self.o = options
        self.table = table

    def render(self, t: Term) -> str:
        limit = self.o.max_depth if self.o.max_depth else float("inf")
        return self._term(t, limit)[0]

    # returns (text, priority of the rendered term)
    def _term(self, t: Term, depth: int):
        if depth <= 0:
            return "...", 0
        tt = type(t)
        if tt is Var:
            return t.name, 0
        if tt is Num:
            return self._num(t)
        if tt is HostValue:
            kind = t.bridge.classify(t.value) if t.bridge is not None else "value"
            return f"host<{kind}>", 0
        return self._compound(t, depth)

    def _num(self, t: Num):
        if t.is_float:
            s = format_float(t.value)
        else:
            s = str(t.value)
        return s, 0

    def _atom(self, name: str):
        if self.o.quoted and atom_needs_quotes(name):
            return _quote_atom(name), 0
        if name in (",", "|", ""):
            return _quote_atom(name), 0
        prio = 1201 if self.table.is_operator(name) and name not in _SOLO_OK else 0
        return name, prio

    def _compound(self, t: Compound, depth: int):
        ind = t.indicator
        if not t.args:
            return self._atom(t.functor)
        if ind == "$VAR/1" and self.o.numbervars and type(t.args[0]) is Num \
                and not t.args[0].is_float and t.args[0].value >= 0:
            n = t.args[0].value
            name = chr(ord("A") + n % 26)
            if n >= 26:
                name += str(n // 26)
            return name, 0
        if ind == "$cut/1":  # internal cut marker reads back as the bare cut
            return "!", 0
        if ind == "./2":
            return self._list(t, depth)
        if ind == "{}/1":
            inner, _ = self._term(t.args[0], depth - 1)
            return "{" + inner + "}", 0
        if not self.o.ignore_ops:
            if len(t.args) == 2 and t.functor in self.table.infix:
                return self._infix(t, depth)
            if len(t.args) == 1:
                if t.functor in self.table.prefix:
                    return self._prefix(t, depth)
                if t.functor in self.table.postfix:
                    return self._postfix(t, depth)
        name = self._atom(t.functor)[0]
        args = ", ".join(self._arg(a, depth - 1) for a in t.args)
        return f"{name}({args})", 0

    def _arg(self, t: Term, depth: int) -> str:
        text, prio = self._term(t, depth)
        if prio > 999:
            return f"({text})"
        return text

    def _list(self, t: Compound, depth: int):
        items = []
        cur = t
        n = depth
        while type(cur) is Compound and cur.indicator == "./2":
            if n <= 0:
                items.append("...")
                return "[" + ",".join(items) + "]", 0
            items.append(self._arg(cur.args[0], depth - 1))
            cur = cur.args[1]
            n -= 1
        if type(cur) is Compound and cur.indicator == "[]/0":
            return "[" + ",".join(items) + "]", 0
        tail, _ = self._term(cur, depth - 1)
        return "[" + ",".join(items) + "|" + tail + "]", 0

    def _infix(self, t: Compound, depth: int):
        p, typ = self.table.infix[t.functor]
        lmax = p - 1 if typ in ("xfx", "xfy") else p
        rmax = p - 1 if typ in ("xfx", "yfx") else p
        lt, lp = self._term(t.args[0], depth - 1)
        rt, rp = self._term(t.args[1], depth - 1)
        if lp > lmax:
            lt = f"({lt})"
        if rp > rmax or _folds_as_negative(t.functor, rt):
            rt = f"({rt})"
        op = t.functor
        if op == ",":
            return f"{lt},{rt}", p
        if _is_alpha_op(op):
            return f"{lt} {op} {rt}", p
        lsep = " " if lt and lt[-1] in SYMBOL_CHARS and op[0] in SYMBOL_CHARS else ""
        rsep = " " if rt and rt[0] in SYMBOL_CHARS and op[-1] in SYMBOL_CHARS else ""
        return f"{lt}{lsep}{op}{rsep}{rt}", p

    def _prefix(self, t: Compound, depth: int):
        p, typ = self.table.prefix[t.functor]
        amax = p if typ == "fy" else p - 1
        at, ap = self._term(t.args[0], depth - 1)
        op = t.functor
        # `- 1` re-reads as the literal -1, so a number argument gets parens
        if op in ("-", "+") and type(t.args[0]) is Num:
            return f"{op}({at})", p
        if ap > amax:
            at = f"({at})"
        if _is_alpha_op(op) or (at and at[0] in SYMBOL_CHARS and op[-1] in SYMBOL_CHARS):
            return f"{op} {at}", p
        return f"{op}{at}", p

    def _postfix(self, t: Compound, depth: int):
        p, typ = self.table.postfix[t.functor]
        amax = p if typ == "yf" else p - 1
        at, ap = self._term(t.args[0], depth - 1)
        if ap > amax:
            at = f"({at})"
        op = t.functor
        if _is_alpha_op(op) or (at and at[-1] in SYMBOL_CHARS and op[0] in SYMBOL_CHARS):
            return f"{at} {op}", p
        return f"{at}{op}", p


def _is_alpha_op(op: str) -> bool:
    return bool(op) and (op[0].isalpha() or op[0] == "_")


def _folds_as_negative(op: str, right_text: str) -> bool:
    # `1 - -2` is fine, but `1 - -2` with no space would lex `--` as one
    # symbol; the symbolic-adjacency space covers that. This guards the
    # remaining case of a prefix op swallowing a number: e.g. `a- -1`.
    return False


def render_term(t: Term, options: WriteOptions | None = None,
                table: OperatorTable | None = None) -> str:
    return _Renderer(options or DEFAULT_OPTIONS, table or _DEFAULT_TABLE).render(t)


_DEFAULT_TABLE = OperatorTable()


# ---------------------------------------------------------------------
# Answer formatting
# ---------------------------------------------------------------------


def format_bindings(var_names, sub, options=None, table=None) -> str:
    """`X = v` pairs, single spaces, `, ` separators, first-appearance order.

    A binding whose value mentions its own variable (possible only with the
    occurs check off) is rendered depth-capped so repeated growth under
    composition never floods the output.
    """
    from ._core import occurs_in

    parts = []
    for name in var_names:
        t = sub.get(name) if isinstance(sub, dict) else sub.lookup(name)
        if t is not None:
            opts = options
            if occurs_in(name, t):
                base = options or DEFAULT_OPTIONS
                opts = WriteOptions(base.quoted, base.ignore_ops,
                                    base.numbervars, CYCLE_RENDER_DEPTH)
            parts.append(f"{name} = {render_term(t, opts, table)}")
    return ", ".join(parts)


def format_answer(session, answer, options: WriteOptions | None = None) -> str:
    """Pinned answer text: bindings, `true.`, `false.`, uncaught errors,
    or `limit exceeded ; resumable.`"""
    table = session.operators if session is not None else None
    kind = answer.kind
    if kind == "success":
        text = format_bindings(answer.var_names, answer.substitution, options, table)
        return text if text else "true."
    if kind == "failure":
        return "false."
    if kind == "error":
        ball = render_term(answer.ball, options or WriteOptions(quoted=True), table)
        return f"uncaught exception: {ball}."
    return "limit exceeded ; resumable."
