"""Tokenizer, parser, program reading, DCG translation, clause compilation."""

import itertools
import random

import pytest

from sibylog import SibylogSyntaxError, create_session
from sibylog._core import Atom, Compound, Num, Var, make_list, struct_eq, list_parts
from sibylog.reader import (
    Clause,
    OperatorTable,
    compile_clauses,
    parse_compiled,
    parse_number_text,
    parse_term_text,
    tokenize,
)

from conftest import answer_texts, success_texts


class TestTokenizer:
    def test_simple(self):
        kinds = [(t.kind, t.text) for t in tokenize("foo(X).")]
        assert kinds == [
            ("name", "foo"), ("punct", "("), ("var", "X"), ("punct", ")"),
            ("end", "."), ("eof", ""),
        ]

    def test_infix_plus(self):
        toks = [t.text for t in tokenize("X is 1+2.") if t.kind != "eof"]
        assert toks == ["X", "is", "1", "+", "2", "."]

    def test_char_code_literal(self):
        tok = tokenize("0'a")[0]
        assert tok.kind == "int" and tok.value == 97
        assert tokenize("0'''")[0].value == ord("'")
        assert tokenize(r"0'\n")[0].value == 10

    def test_radix_literals(self):
        assert tokenize("0x1F")[0].value == 31
        assert tokenize("0o17")[0].value == 15
        assert tokenize("0b101")[0].value == 5

    def test_floats(self):
        assert tokenize("3.14")[0].value == 3.14
        assert tokenize("1.0e3")[0].value == 1000.0
        # '1.' is integer one followed by the end token
        toks = tokenize("1. ")
        assert toks[0].kind == "int" and toks[1].kind == "end"

    def test_locations(self):
        toks = tokenize("a.\nfoo.")
        assert toks[2].loc.line == 2 and toks[2].loc.column == 1

    def test_unterminated_quote(self):
        with pytest.raises(SibylogSyntaxError) as e:
            tokenize("'abc")
        assert e.value.line == 1

    def test_unterminated_block_comment(self):
        with pytest.raises(SibylogSyntaxError):
            tokenize("/* no end")

    def test_reserved_variable_namespace_rejected(self):
        with pytest.raises(SibylogSyntaxError):
            tokenize("foo(_G12)")
        tokenize("foo(_Goo)")  # only _G<digits> is reserved

    def test_quoted_atoms_and_escapes(self):
        t, _ = parse_term_text(r"'he said \'hi\'\n'")
        assert t.functor == "he said 'hi'\n"

    def test_comments_skipped(self):
        t, _ = parse_term_text("% line\n/* block */ foo")
        assert t.functor == "foo"


class TestParser:
    def parse(self, text):
        return parse_term_text(text)[0]

    def test_priorities(self):
        assert struct_eq(
            self.parse("1+2*3"),
            Compound("+", (Num(1), Compound("*", (Num(2), Num(3))))),
        )

    def test_clause_priority(self):
        t = self.parse("a:-b,c")
        assert t.indicator == ":-/2"
        assert t.args[1].indicator == ",/2"

    def test_record_pattern(self):
        t = self.parse("{x: 1, y: false}")
        assert t.indicator == "{}/1"
        inner = t.args[0]
        assert inner.indicator == ",/2"
        assert inner.args[0].indicator == ":/2"
        assert struct_eq(inner.args[0].args[0], Atom("x"))
        assert struct_eq(inner.args[1], Compound(":", (Atom("y"), Atom("false"))))

    def test_lists(self):
        t = self.parse("[a,b|T]")
        items, tail = list_parts(t)
        assert len(items) == 2 and type(tail) is Var
        assert struct_eq(self.parse("[]"), Atom("[]"))
        assert struct_eq(self.parse("[ ]"), Atom("[]"))

    def test_negative_number_folding(self):
        assert struct_eq(self.parse("- 1"), Num(-1))
        assert struct_eq(self.parse("-1"), Num(-1))
        assert struct_eq(self.parse("1 - 2"), Compound("-", (Num(1), Num(2))))
        assert struct_eq(self.parse("f(-1)"), Compound("f", (Num(-1),)))

    def test_associativity(self):
        # xfy: right nested; yfx: left nested
        t = self.parse("a,b,c")
        assert t.args[1].indicator == ",/2"
        t = self.parse("1-2-3")
        assert t.args[0].indicator == "-/2"
        t = self.parse("a;b;c")
        assert t.args[1].indicator == ";/2"

    def test_priority_violation(self):
        with pytest.raises(SibylogSyntaxError):
            self.parse("a :- b :- c")  # xfx 1200 cannot chain

    def test_curly_and_parens(self):
        assert struct_eq(self.parse("{}"), Atom("{}"))
        t = self.parse("{a,b}")
        assert t.indicator == "{}/1"
        assert struct_eq(self.parse("(a)"), Atom("a"))

    def test_operator_as_argument(self):
        t = self.parse("f(+, -)")
        assert struct_eq(t, Compound("f", (Atom("+"), Atom("-"))))

    def test_var_scope_and_anonymous(self):
        t, names = parse_term_text("f(X, _, X, _)")
        assert names == ["X"]
        assert t.args[0] is t.args[2] or struct_eq(t.args[0], t.args[2])
        assert t.args[1].name != t.args[3].name

    def test_double_quotes_modes(self):
        codes, _ = parse_term_text('"ab"', double_quotes="codes")
        items, _tail = list_parts(codes)
        assert [i.value for i in items] == [97, 98]
        chars, _ = parse_term_text('"ab"', double_quotes="chars")
        items, _tail = list_parts(chars)
        assert [i.functor for i in items] == ["a", "b"]
        atom, _ = parse_term_text('"ab"', double_quotes="atom")
        assert atom.functor == "ab"

    def test_dynamic_operator_table(self):
        table = OperatorTable()
        table.add(700, "xfx", "===")
        t, _ = parse_term_text("a === b", table)
        assert t.indicator == "===/2"

    def test_error_reports_location(self):
        with pytest.raises(SibylogSyntaxError) as e:
            parse_term_text("foo(")
        assert e.value.line == 1 and e.value.column >= 4


def test_functional_notation_with_layout_is_error():
    with pytest.raises(SibylogSyntaxError):
        parse_term_text("f (a)")


class TestNumbers:
    def test_parse_number_text(self):
        assert parse_number_text("42").value == 42
        assert parse_number_text("-7").value == -7
        assert parse_number_text("3.5").value == 3.5
        assert parse_number_text("0x10").value == 16
        assert parse_number_text("abc") is None
        assert parse_number_text("1 2") is None


class TestReadProgram:
    def test_append_program(self):
        s = create_session()
        s.consult_text_sync(
            "append([], X, X).\nappend([H|T], X, [H|S]) :- append(T, X, S)."
        )
        entry = s.user_clauses("append/3")
        assert len(entry.clauses) == 2
        assert entry.clauses[0].body is None

    def test_directive_affects_subsequent_parsing(self):
        s = create_session()
        s.consult_text_sync(":- op(700, xfx, ===).\na === b.")
        entry = s.user_clauses("===/2")
        assert len(entry.clauses) == 1

    def test_directive_throw_aborts_consult(self):
        s = create_session()
        got = []
        s.consult(":- throw(stop).\nunreached(1).", on_done=got.append)
        s.run()
        assert got[0] is not None
        assert s.user_clauses("unreached/1") is None

    def test_failed_directive_warns_but_continues(self):
        out = []
        s = create_session(stdout=out.append)
        s.consult_text_sync(":- fail.\nreached(1).")
        assert s.user_clauses("reached/1") is not None
        assert any("Warning" in t for t in out)

    def test_syntax_error_aborts_with_location(self):
        s = create_session()
        got = []
        s.consult("foo(.", on_done=got.append)
        s.run()
        err = got[0]
        assert err is not None and err.args[0].indicator == "syntax_error/1"


class TestDCG:
    GRAMMAR = """
greeting --> [hello], name.
name --> [world].
name --> [friend].
ab --> [].
ab --> [a], ab, [b].
"""

    def brute_force_language(self, max_len):
        """Oracle: all lists over {a,b,hello,world,friend} of length <= max_len
        accepted by the grammar, via direct CFG expansion in Python."""
        out = set()

        def expand(symbols, acc):
            if len(acc) > max_len:
                return
            if not symbols:
                out.add(tuple(acc))
                return
            head, rest = symbols[0], symbols[1:]
            if head == "greeting":
                expand(["hello", "name"] + rest, acc)
            elif head == "name":
                expand(["world"] + rest, acc)
                expand(["friend"] + rest, acc)
            elif head == "ab":
                expand(rest, acc)
                expand(["a", "ab", "b"] + rest, acc)
            else:
                expand(rest, acc + [head])

        return out

    def test_translation_shape(self):
        s = create_session()
        s.consult_text_sync("greeting --> [hello], name.")
        clause = s.user_clauses("greeting/2").clauses[0]
        assert clause.head.indicator == "greeting/2"
        # body: S0 = [hello|S1], name(S1, S)
        body = clause.body
        assert body.indicator == ",/2"
        assert body.args[0].indicator == "=/2"
        assert body.args[1].indicator == "name/2"

    def test_phrase_answers_equal_brute_force(self):
        """For small grammars, phrase/2 answer sets over lists of length <= 6
        equal brute-force CFG expansion (the reader invariant's oracle)."""
        s = create_session()
        s.consult_text_sync(self.GRAMMAR)
        rules = {
            "greeting": [["hello", "name"]],
            "name": [["world"], ["friend"]],
            "ab": [[], ["a", "ab", "b"]],
        }

        def expand(symbols, acc, out):
            if len(acc) > 6:
                return
            if not symbols:
                out.add(tuple(acc))
                return
            head, rest = symbols[0], symbols[1:]
            if head in rules:
                for rhs in rules[head]:
                    expand(list(rhs) + rest, acc, out)
            else:
                expand(rest, acc + [head], out)

        for nt in ("greeting", "ab"):
            oracle = set()
            expand([nt], [], oracle)
            oracle = {t for t in oracle if len(t) <= 6}
            # test every candidate list of length <= 6 over the terminal
            # alphabet against phrase/2 membership
            alphabet = sorted({sym for t in oracle for sym in t}) or ["a"]
            accepted = set()
            for n in range(0, 7):
                for combo in itertools.product(alphabet, repeat=n):
                    lst = "[" + ",".join(combo) + "]"
                    got = s.solve(f"phrase({nt}, {lst}).", 1)
                    if got[0].kind == "success":
                        accepted.add(combo)
            assert accepted == oracle

    def test_pushback_and_control(self):
        s = create_session()
        s.consult_text_sync(
            'digits([D|T]) --> digit(D), digits(T).\n'
            'digits([D]) --> digit(D).\n'
            "digit(D) --> [D], { D >= 0'0, D =< 0'9 }."
        )
        texts = success_texts(s, 'phrase(digits(Ds), "42").')
        assert texts == ["Ds = [52,50]"]

    def test_phrase_3_rest(self):
        s = create_session()
        s.consult_text_sync("one --> [x].")
        texts = success_texts(s, "phrase(one, [x,y,z], R).")
        assert texts == ["R = [y,z]"]


class TestCompileClauses:
    def test_append_listing(self):
        s = create_session()
        s.consult_text_sync(
            "append([], X, X).\nappend([H|T], X, [H|S]) :- append(T, X, S)."
        )
        clauses = s.user_clauses("append/3").clauses
        text = compile_clauses(clauses)
        assert "predicate('append/3'" in text
        assert text.count("rule(") == 2
        # facts carry a null body
        s2 = create_session()
        s2.consult_text_sync("p(a).")
        text2 = compile_clauses(s2.user_clauses("p/1").clauses)
        assert "null" in text2

    def test_round_trip(self):
        rng = random.Random(5)
        from conftest import random_term

        for _ in range(100):
            head = Compound("h", tuple(random_term(rng, 2) for _ in range(2)))
            body = random_term(rng, 2)
            if type(body) is not Compound:
                body = Compound("wrap", (body,))
            clauses = [Clause(head, body), Clause(head, None)]
            back = parse_compiled(compile_clauses(clauses))
            assert len(back) == 2
            assert struct_eq(back[0].head, head)
            assert struct_eq(back[0].body, body)
            assert back[1].body is None
