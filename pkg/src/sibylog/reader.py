"""Tokenizer and operator-precedence parser for ISO Prolog text.

The tokenizer is table-independent, so a whole source can be tokenized up
front while parsing stays incremental: op/3 directives executed mid-consult
affect how the *next* term is parsed, because the parser consults the
operator table live for every term.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._core import (
    Atom,
    Compound,
    EMPTY_LIST,
    Num,
    Var,
    body_has_cut,
    make_list,
)
from .errors import SibylogSyntaxError

# ---------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------

SYMBOL_CHARS = set("#$&*+-./:<=>?@^~\\")
SOLO_ATOMS = {"!", ";"}
PUNCT = {"(", ")", "[", "]", "{", "}", ",", "|"}


@dataclass(frozen=True)
class SourceLocation:
    line: int
    column: int
    offset: int


@dataclass
class Token:
    kind: str  # name | var | int | float | string | punct | end | eof
    text: str
    loc: SourceLocation
    value: object = None
    quoted: bool = False
    func_paren: bool = False  # name immediately followed by '(' (no layout)


_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "a": "\a", "b": "\b",
    "f": "\f", "v": "\v", "\\": "\\", "'": "'", '"': '"', "`": "`",
    "0": "\0", "e": "\x1b",
}


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def loc(self) -> SourceLocation:
        return SourceLocation(self.line, self.col, self.pos)

    def peek(self, ahead=0):
        i = self.pos + ahead
        return self.text[i] if i < len(self.text) else ""

    def advance(self, n=1) -> str:
        out = self.text[self.pos : self.pos + n]
        for ch in out:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n
        return out

    def error(self, detail, loc=None):
        loc = loc or self.loc()
        raise SibylogSyntaxError(detail, loc.line, loc.column)

    # -- layout ---------------------------------------------------------

    def skip_layout(self) -> bool:
        """Skip whitespace and comments; True if anything was skipped."""
        skipped = False
        while self.pos < len(self.text):
            ch = self.peek()
            if ch in " \t\r\n":
                self.advance()
                skipped = True
            elif ch == "%":
                while self.pos < len(self.text) and self.peek() != "\n":
                    self.advance()
                skipped = True
            elif ch == "/" and self.peek(1) == "*":
                start = self.loc()
                self.advance(2)
                while not (self.peek() == "*" and self.peek(1) == "/"):
                    if self.pos >= len(self.text):
                        self.error("unterminated block comment", start)
                    self.advance()
                self.advance(2)
                skipped = True
            else:
                break
        return skipped

    # -- quoted items ----------------------------------------------------

    def scan_quoted(self, quote: str) -> str:
        start = self.loc()
        self.advance()
        out = []
        while True:
            if self.pos >= len(self.text):
                self.error(f"unterminated {quote} quote", start)
            ch = self.advance()
            if ch == quote:
                if self.peek() == quote:  # doubled quote
                    self.advance()
                    out.append(quote)
                    continue
                return "".join(out)
            if ch == "\\":
                nxt = self.peek()
                if nxt == "":
                    self.error(f"unterminated {quote} quote", start)
                if nxt == "\n":  # line continuation
                    self.advance()
                    continue
                if nxt in "x01234567":
                    out.append(self._scan_code_escape())
                    continue
                if nxt in _ESCAPES:
                    self.advance()
                    out.append(_ESCAPES[nxt])
                    continue
                self.error(f"unknown escape \\{nxt}")
            else:
                out.append(ch)

    def _scan_code_escape(self) -> str:
        if self.peek() == "x":
            self.advance()
            digits = ""
            while self.peek() in "0123456789abcdefABCDEF":
                digits += self.advance()
            base = 16
        else:
            digits = ""
            while self.peek() in "01234567":
                digits += self.advance()
            base = 8
        if not digits or self.peek() != "\\":
            self.error("bad character code escape")
        self.advance()
        return chr(int(digits, base))

    # -- numbers ---------------------------------------------------------

    def scan_number(self) -> Token:
        loc = self.loc()
        if self.peek() == "0" and self.peek(1) == "'":
            self.advance(2)
            ch = self.peek()
            if ch == "":
                self.error("bad character code literal", loc)
            if ch == "\\":
                self.advance()
                nxt = self.peek()
                if nxt in "x01234567":
                    c = self._scan_code_escape()
                elif nxt in _ESCAPES:
                    self.advance()
                    c = _ESCAPES[nxt]
                else:
                    self.error(f"unknown escape \\{nxt}", loc)
                return Token("int", f"0'{c}", loc, value=ord(c))
            if ch == "'" and self.peek(1) == "'":
                self.advance(2)
                return Token("int", "0'''", loc, value=ord("'"))
            self.advance()
            return Token("int", f"0'{ch}", loc, value=ord(ch))
        if self.peek() == "0" and self.peek(1) in "xob":
            base = {"x": 16, "o": 8, "b": 2}[self.peek(1)]
            chars = "0123456789abcdefABCDEF"[:base] if base != 16 else "0123456789abcdefABCDEF"
            self.advance(2)
            digits = ""
            while self.peek() in chars:
                digits += self.advance()
            if not digits:
                self.error("bad radix literal", loc)
            return Token("int", digits, loc, value=int(digits, base))
        digits = ""
        while self.peek().isdigit():
            digits += self.advance()
        # float needs a digit on both sides of the dot
        if self.peek() == "." and self.peek(1).isdigit():
            self.advance()
            frac = ""
            while self.peek().isdigit():
                frac += self.advance()
            exp = ""
            if self.peek() in "eE" and (
                self.peek(1).isdigit()
                or (self.peek(1) in "+-" and self.peek(2).isdigit())
            ):
                exp = self.advance()
                if self.peek() in "+-":
                    exp += self.advance()
                while self.peek().isdigit():
                    exp += self.advance()
            text = f"{digits}.{frac}{exp}"
            return Token("float", text, loc, value=float(text))
        return Token("int", digits, loc, value=int(digits))


def tokenize(text: str) -> list[Token]:
    sc = _Scanner(text)
    tokens: list[Token] = []
    while True:
        sc.skip_layout()
        loc = sc.loc()
        if sc.pos >= len(sc.text):
            tokens.append(Token("eof", "", loc))
            return tokens
        ch = sc.peek()
        if ch.isdigit():
            tokens.append(sc.scan_number())
        elif ch == "_" or ch.isalpha():
            name = ""
            while sc.peek() == "_" or sc.peek().isalnum():
                name += sc.advance()
            if ch == "_" or ch.isupper():
                if name.startswith("_G") and name[2:].isdigit():
                    sc.error(f"variable name {name} is reserved", loc)
                tokens.append(Token("var", name, loc))
            else:
                tokens.append(_name(sc, name, loc))
        elif ch == "'":
            text_ = sc.scan_quoted("'")
            tokens.append(_name(sc, text_, loc, quoted=True))
        elif ch == '"':
            tokens.append(Token("string", sc.scan_quoted('"'), loc))
        elif ch in PUNCT:
            sc.advance()
            tokens.append(Token("punct", ch, loc))
        elif ch in SOLO_ATOMS:
            sc.advance()
            tokens.append(_name(sc, ch, loc))
        elif ch in SYMBOL_CHARS:
            sym = ""
            while sc.peek() in SYMBOL_CHARS:
                sym += sc.advance()
            # '.' is the end token when followed by layout, a comment or EOF
            if sym == "." and (sc.peek() in " \t\r\n%" or sc.peek() == ""):
                tokens.append(Token("end", ".", loc))
            else:
                tokens.append(_name(sc, sym, loc))
        else:
            sc.error(f"unexpected character {ch!r}", loc)


def _name(sc: _Scanner, text: str, loc, quoted=False) -> Token:
    return Token(
        "name", text, loc, quoted=quoted, func_paren=(sc.peek() == "("),
    )


# ---------------------------------------------------------------------
# Operator table
# ---------------------------------------------------------------------

PREFIX_TYPES = {"fy", "fx"}
INFIX_TYPES = {"xfx", "xfy", "yfx"}
POSTFIX_TYPES = {"xf", "yf"}

ISO_OPERATORS = [
    (1200, "xfx", ":-"), (1200, "xfx", "-->"),
    (1200, "fx", ":-"), (1200, "fx", "?-"),
    (1100, "xfy", ";"),
    (1050, "xfy", "->"),
    (1000, "xfy", ","),
    (900, "fy", "\\+"),
    (700, "xfx", "="), (700, "xfx", "\\="),
    (700, "xfx", "=="), (700, "xfx", "\\=="),
    (700, "xfx", "@<"), (700, "xfx", "@>"), (700, "xfx", "@=<"), (700, "xfx", "@>="),
    (700, "xfx", "=.."), (700, "xfx", "is"),
    (700, "xfx", "=:="), (700, "xfx", "=\\="),
    (700, "xfx", "<"), (700, "xfx", ">"), (700, "xfx", "=<"), (700, "xfx", ">="),
    (500, "yfx", "+"), (500, "yfx", "-"), (500, "yfx", "/\\"), (500, "yfx", "\\/"),
    (500, "yfx", "xor"),
    (400, "yfx", "*"), (400, "yfx", "/"), (400, "yfx", "//"),
    (400, "yfx", "rem"), (400, "yfx", "mod"), (400, "yfx", "div"),
    (400, "yfx", "<<"), (400, "yfx", ">>"),
    (200, "xfx", "**"),
    (200, "xfy", "^"),
    # ':' is not in the ISO seed set but {key: Value} record patterns
    # need it to bind tighter than ','.
    (200, "xfy", ":"),
    (200, "fy", "-"), (200, "fy", "+"), (200, "fy", "\\"),
]


class OperatorTable:
    """Priorities 1..1200; at most one prefix and one infix-or-postfix
    definition per name."""

    def __init__(self, seed=True):
        self.prefix: dict[str, tuple[int, str]] = {}
        self.infix: dict[str, tuple[int, str]] = {}
        self.postfix: dict[str, tuple[int, str]] = {}
        if seed:
            for p, t, n in ISO_OPERATORS:
                self.add(p, t, n)

    def add(self, priority: int, typ: str, name: str):
        if not 0 <= priority <= 1200:
            raise ValueError(f"operator priority out of range: {priority}")
        if typ in PREFIX_TYPES:
            table = self.prefix
        elif typ in INFIX_TYPES:
            table = self.infix
            if priority > 0 and name in self.postfix:
                raise ValueError(f"{name} already has a postfix definition")
        elif typ in POSTFIX_TYPES:
            table = self.postfix
            if priority > 0 and name in self.infix:
                raise ValueError(f"{name} already has an infix definition")
        else:
            raise ValueError(f"bad operator type {typ}")
        if priority == 0:
            table.pop(name, None)
        else:
            table[name] = (priority, typ)

    def is_operator(self, name: str) -> bool:
        return name in self.prefix or name in self.infix or name in self.postfix

    def entries(self):
        for name, (p, t) in self.prefix.items():
            yield p, t, name
        for name, (p, t) in self.infix.items():
            yield p, t, name
        for name, (p, t) in self.postfix.items():
            yield p, t, name


# ---------------------------------------------------------------------
# Clauses
# ---------------------------------------------------------------------


class Clause:
    """A stored program clause; body None encodes a fact."""

    __slots__ = ("head", "body", "has_cut")

    def __init__(self, head, body=None):
        self.head = head
        self.body = body
        self.has_cut = body is not None and body_has_cut(body)

    @property
    def indicator(self) -> str:
        return self.head.indicator

    def __repr__(self):
        return f"Clause({self.head!r}, {self.body!r})"


def clause_from_term(term, context="consult"):
    """Turn a read term into a Clause, applying ISO body conversion."""
    from .errors import type_error
    from .errors import PrologError

    if type(term) is Compound and term.indicator == ":-/2":
        head, body = term.args
    else:
        head, body = term, None
    if type(head) is Var:
        raise PrologError(_conv_ball("instantiation_error", None, context))
    if type(head) is not Compound:
        raise PrologError(type_error("callable", head, context))
    if body is not None:
        body = _convert_body(body, context)
        if type(body) is Compound and body.indicator == "true/0":
            body = None
    return Clause(head, body)


def _conv_ball(kind, culprit, context):
    inner = Atom(kind) if culprit is None else Compound(kind, (culprit,))
    return Compound("error", (inner, Atom(str(context))))


def _convert_body(b, context):
    """ISO body conversion: variables become call(V); numbers are errors."""
    from .errors import PrologError, type_error

    if type(b) is Var:
        return Compound("call", (b,))
    if type(b) is Num:
        raise PrologError(type_error("callable", b, context))
    if b.indicator in (",/2", ";/2", "->/2"):
        return Compound(
            b.functor,
            (_convert_body(b.args[0], context), _convert_body(b.args[1], context)),
        )
    return b


# ---------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------

_MAX_ARG_PRIORITY = 999


class Parser:
    """Incremental term parser over a token list.

    One Parser reads a whole source; variable scope resets per term. The
    operator table and double_quotes mode are read through `session_view`,
    a small object with attributes `operators` and `double_quotes`, so
    directives take effect between terms.
    """

    def __init__(self, tokens, view, fresh=None):
        self.tokens = tokens
        self.pos = 0
        self.view = view
        self.fresh = fresh or _FallbackFresh()
        self.varmap: dict[str, Var] = {}
        self.var_order: list[str] = []

    # -- token plumbing ---------------------------------------------------

    def peek(self, ahead=0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, detail, tok=None):
        tok = tok or self.peek()
        raise SibylogSyntaxError(detail, tok.loc.line, tok.loc.column)

    def at_eof(self) -> bool:
        return self.peek().kind == "eof"

    # -- entry points -----------------------------------------------------

    def read_term(self):
        """Read one `Term.`; returns (term, ordered var names) or None at EOF."""
        self.varmap = {}
        self.var_order = []
        if self.at_eof():
            return None
        term, _ = self.parse(1200)
        tok = self.next()
        if tok.kind != "end":
            self.error(f"operator expected before {tok.text!r}", tok)
        return term, list(self.var_order)

    # -- grammar ----------------------------------------------------------

    def parse(self, maxp: int):
        left, lp = self.parse_primary(maxp)
        return self.parse_infix(left, lp, maxp)

    def parse_infix(self, left, lp, maxp):
        table = self.view.operators
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text == ",":
                if maxp >= 1000 and lp < 1000:
                    self.next()
                    right, _ = self.parse(1000)
                    left = Compound(",", (left, right))
                    lp = 1000
                    continue
                return left, lp
            if tok.kind != "name":
                return left, lp
            entry = table.infix.get(tok.text)
            if entry is not None:
                p, typ = entry
                lmax = p - 1 if typ in ("xfx", "xfy") else p
                rmax = p - 1 if typ in ("xfx", "yfx") else p
                if p <= maxp and lp <= lmax and self._starts_term(self.peek(1)):
                    self.next()
                    right, _ = self.parse(rmax)
                    left = Compound(tok.text, (left, right))
                    lp = p
                    continue
            entry = table.postfix.get(tok.text)
            if entry is not None:
                p, typ = entry
                lmax = p - 1 if typ == "xf" else p
                if p <= maxp and lp <= lmax:
                    self.next()
                    left = Compound(tok.text, (left,))
                    lp = p
                    continue
            return left, lp

    def _starts_term(self, tok: Token) -> bool:
        if tok.kind in ("int", "float", "var", "string"):
            return True
        if tok.kind == "punct":
            return tok.text in ("(", "[", "{")
        if tok.kind == "name":
            # a closing context never follows an infix operator
            return True
        return False

    def parse_primary(self, maxp: int):
        tok = self.next()
        kind = tok.kind
        if kind == "int" or kind == "float":
            return Num(tok.value, kind == "float"), 0
        if kind == "string":
            return self._string_term(tok.text), 0
        if kind == "var":
            return self._mkvar(tok.text), 0
        if kind == "punct":
            if tok.text == "(":
                t, _ = self.parse(1200)
                self._expect(")")
                return t, 0
            if tok.text == "[":
                if self._try_punct("]"):
                    return EMPTY_LIST, 0
                return self._list_tail(), 0
            if tok.text == "{":
                if self._try_punct("}"):
                    return Atom("{}"), 0
                t, _ = self.parse(1200)
                self._expect("}")
                return Compound("{}", (t,)), 0
            self.error(f"unexpected {tok.text!r}", tok)
        if kind == "name":
            return self._name_primary(tok, maxp)
        if kind == "end":
            self.error("unexpected end of clause", tok)
        self.error("unexpected end of input", tok)

    def _name_primary(self, tok: Token, maxp: int):
        name = tok.text
        if tok.func_paren:
            self._expect("(")
            args = [self.parse(_MAX_ARG_PRIORITY)[0]]
            while self._try_punct(","):
                args.append(self.parse(_MAX_ARG_PRIORITY)[0])
            self._expect(")")
            return Compound(name, tuple(args)), 0
        table = self.view.operators
        pre = None if tok.quoted else table.prefix.get(name)
        if pre is not None:
            p, typ = pre
            nxt = self.peek()
            # '- 1' folds into a negative number literal
            if name == "-" and nxt.kind in ("int", "float"):
                self.next()
                return Num(-nxt.value, nxt.kind == "float"), 0
            if name == "+" and nxt.kind in ("int", "float"):
                self.next()
                return Num(nxt.value, nxt.kind == "float"), 0
            if p <= maxp and self._starts_term(nxt) and not self._is_infix_context(nxt):
                argmax = p if typ == "fy" else p - 1
                save = self.pos
                try:
                    arg, _ = self.parse(argmax)
                    return Compound(name, (arg,)), p
                except SibylogSyntaxError:
                    self.pos = save
        return Atom(name), 0

    def _is_infix_context(self, tok: Token) -> bool:
        """A name that is only an infix/postfix operator does not start a
        term unless it could itself be an operand (e.g. `- = - ` is fine)."""
        if tok.kind != "name" or tok.func_paren or tok.quoted:
            return False
        table = self.view.operators
        if tok.text in table.infix or tok.text in table.postfix:
            follower = self.peek(1)
            if tok.text in table.prefix and self._starts_term(follower):
                return False
            return not (
                follower.kind in ("punct", "end", "eof")
                and (follower.kind != "punct" or follower.text in (")", "]", "}", ","))
            )
        return False

    def _list_tail(self):
        items = [self.parse(_MAX_ARG_PRIORITY)[0]]
        while self._try_punct(","):
            items.append(self.parse(_MAX_ARG_PRIORITY)[0])
        tail = EMPTY_LIST
        if self._try_punct("|"):
            tail = self.parse(_MAX_ARG_PRIORITY)[0]
        self._expect("]")
        return make_list(items, tail)

    def _string_term(self, text: str):
        mode = self.view.double_quotes
        if mode == "atom":
            return Atom(text)
        if mode == "chars":
            return make_list([Atom(c) for c in text])
        return make_list([Num(ord(c)) for c in text])

    def _mkvar(self, name: str) -> Var:
        if name == "_":
            return Var(self.fresh.next_name())
        v = self.varmap.get(name)
        if v is None:
            v = Var(name)
            self.varmap[name] = v
            self.var_order.append(name)
        return v

    def _expect(self, punct: str):
        tok = self.next()
        if tok.kind != "punct" or tok.text != punct:
            self.error(f"expected {punct!r} before {tok.text!r}", tok)

    def _try_punct(self, punct: str) -> bool:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == punct:
            self.next()
            return True
        return False


class _FallbackFresh:
    """Stand-in fresh-name source for table-only parsing (tests, tools)."""

    def __init__(self):
        self.counter = [0]

    def next_name(self) -> str:
        self.counter[0] += 1
        return f"_G{self.counter[0]}"


@dataclass
class _View:
    operators: OperatorTable
    double_quotes: str = "codes"


def parse_term_text(text, table=None, double_quotes="codes", fresh=None):
    """Parse a single `Term.` out of text; the end dot is optional here."""
    toks = tokenize(text)
    if len(toks) >= 2 and toks[-2].kind != "end":
        toks.insert(-1, Token("end", ".", toks[-1].loc))
    parser = Parser(toks, _View(table or OperatorTable(), double_quotes), fresh)
    got = parser.read_term()
    if got is None:
        raise SibylogSyntaxError("empty input", 1, 1)
    term, names = got
    if not parser.at_eof():
        parser.error("text after end of term")
    return term, names


def parse_number_text(text: str):
    """Strict number syntax (for number_codes/2); returns Num or None."""
    try:
        toks = tokenize(text.strip())
    except SibylogSyntaxError:
        return None
    toks = [t for t in toks if t.kind != "eof"]
    neg = False
    if len(toks) == 2 and toks[0].kind == "name" and toks[0].text == "-":
        neg = True
        toks = toks[1:]
    if len(toks) != 1 or toks[0].kind not in ("int", "float"):
        return None
    v = toks[0].value
    return Num(-v if neg else v, toks[0].kind == "float")


# ---------------------------------------------------------------------
# DCG translation
# ---------------------------------------------------------------------


def dcg_translate(term, fresh):
    """Translate `Head --> Body` into an ordinary clause term.

    fresh is an object with next_name(); difference-list threading follows
    the textual order of the body.
    """
    head, body = term.args
    s0, s = Var(fresh.next_name()), Var(fresh.next_name())
    new_head = _dcg_add_args(head, s0, s)
    new_body = dcg_body(body, s0, s, fresh)
    return Compound(":-", (new_head, new_body))


def dcg_body(b, s0, s, fresh):
    if type(b) is Var:
        return Compound("phrase", (b, s0, s))
    if type(b) is Num:
        return Compound("phrase", (b, s0, s))  # fails with a type error at call time
    ind = b.indicator
    if ind == ",/2":
        mid = Var(fresh.next_name())
        return Compound(
            ",", (dcg_body(b.args[0], s0, mid, fresh), dcg_body(b.args[1], mid, s, fresh))
        )
    if ind == ";/2":
        return Compound(
            ";", (dcg_body(b.args[0], s0, s, fresh), dcg_body(b.args[1], s0, s, fresh))
        )
    if ind == "->/2":
        mid = Var(fresh.next_name())
        return Compound(
            "->", (dcg_body(b.args[0], s0, mid, fresh), dcg_body(b.args[1], mid, s, fresh))
        )
    if ind == "{}/1":
        return Compound(",", (b.args[0], Compound("=", (s0, s))))
    if ind == "!/0":
        return Compound(",", (b, Compound("=", (s0, s))))
    if ind == "\\+/1":
        drop = Var(fresh.next_name())
        neg = Compound("\\+", (dcg_body(b.args[0], s0, drop, fresh),))
        return Compound(",", (neg, Compound("=", (s0, s))))
    if ind == "[]/0":
        return Compound("=", (s0, s))
    if ind == "./2":
        return Compound("=", (s0, _dcg_terminal(b, s)))
    return _dcg_add_args(b, s0, s)


def _dcg_terminal(lst, tail):
    from ._core import list_parts

    items, end = list_parts(lst)
    if type(end) is Compound and end.indicator == "[]/0":
        return make_list(items, tail)
    return make_list(items, end)  # improper terminal; left as written


def _dcg_add_args(t, s0, s):
    return Compound(t.functor, tuple(t.args) + (s0, s))


# ---------------------------------------------------------------------
# Canonical constructor listing (clause compilation)
# ---------------------------------------------------------------------


def compile_clauses(clauses) -> str:
    """Render clauses as a canonical constructor listing.

    The output is itself valid Prolog text (one `predicate/2` term per
    indicator), so it round-trips through this same reader, and a package
    can embed it instead of shipping source that needs parsing at load time.
    Facts carry the body `null`.
    """
    by_ind: dict[str, list] = {}
    order: list[str] = []
    for c in clauses:
        if c.indicator not in by_ind:
            by_ind[c.indicator] = []
            order.append(c.indicator)
        by_ind[c.indicator].append(c)
    chunks = []
    for ind in order:
        rules = ",\n  ".join(
            f"rule({_ctor(c.head)}, {_ctor(c.body) if c.body is not None else 'null'})"
            for c in by_ind[ind]
        )
        chunks.append(f"predicate('{ind}', [\n  {rules}\n]).")
    return "\n".join(chunks) + ("\n" if chunks else "")


def _ctor(t) -> str:
    tt = type(t)
    if tt is Var:
        return f"var({_q(t.name)})"
    if tt is Num:
        if t.is_float:
            return f"num({format_float(t.value)})"
        return f"num({t.value})"
    args = ", ".join(_ctor(a) for a in t.args)
    return f"term({_q(t.functor)}, [{args}])"


def _q(name: str) -> str:
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def format_float(v: float) -> str:
    """Shortest float text that still satisfies ISO float syntax."""
    s = repr(v)
    if "e" in s or "E" in s:
        mant, _, exp = s.partition("e" if "e" in s else "E")
        if "." not in mant:
            mant += ".0"
        return f"{mant}e{exp}"
    if "." not in s:
        s += ".0"
    return s


def parse_compiled(text: str):
    """Inverse of compile_clauses: decode the constructor listing."""
    toks = tokenize(text)
    parser = Parser(toks, _View(OperatorTable()))
    out = []
    while True:
        got = parser.read_term()
        if got is None:
            return out
        term, _ = got
        if type(term) is not Compound or term.indicator != "predicate/2":
            raise ValueError("not a compiled clause listing")
        items, _tail = _decode_list(term.args[1])
        for rule in items:
            if type(rule) is not Compound or rule.indicator != "rule/2":
                raise ValueError("bad rule entry")
            head = _decode(rule.args[0])
            body_t = rule.args[1]
            body = None
            if not (type(body_t) is Compound and body_t.indicator == "null/0"):
                body = _decode(body_t)
            out.append(Clause(head, body))


def _decode_list(t):
    from ._core import list_parts

    return list_parts(t)


def _decode(t):
    if type(t) is not Compound:
        raise ValueError("bad constructor term")
    if t.indicator == "var/1":
        return Var(t.args[0].functor)
    if t.indicator == "num/1":
        n = t.args[0]
        return Num(n.value, n.is_float)
    if t.indicator == "term/2":
        items, _ = _decode_list(t.args[1])
        return Compound(t.args[0].functor, tuple(_decode(a) for a in items))
    raise ValueError(f"bad constructor {t.indicator}")
