"""The `lists` library: clause-defined relations plus a few natives.

append and friends are shipped as clauses (the package-as-clause-list
contract); length, reverse, msort and sort are natives because they need
multiple modes or a comparison sort.
"""

from __future__ import annotations

from functools import cmp_to_key

from .._core import (
    Atom,
    Compound,
    Num,
    Var,
    compare_terms,
    is_proper_list,
    list_parts,
    make_list,
)
from ..errors import BallError, instantiation, type_error
from ..modules import ClauseList, Module
from ..reader import OperatorTable, Parser, Token, clause_from_term, tokenize

LISTS_SOURCE = """
append([], X, X).
append([H|T], X, [H|S]) :- append(T, X, S).

member(X, [X|_]).
member(X, [_|T]) :- member(X, T).

nth0(0, [X|_], X).
nth0(N, [_|T], X) :- N > 0, M is N - 1, nth0(M, T, X).

nth1(1, [X|_], X).
nth1(N, [_|T], X) :- N > 1, M is N - 1, nth1(M, T, X).

last([X], X).
last([_|T], X) :- last(T, X).

select(X, [X|T], T).
select(X, [H|T], [H|S]) :- select(X, T, S).
"""


class _StaticView:
    operators = OperatorTable()
    double_quotes = "codes"


def parse_library_clauses(source: str):
    """Parse a library source into Clause objects (no directives allowed)."""
    parser = Parser(tokenize(source), _StaticView())
    clauses = []
    while True:
        got = parser.read_term()
        if got is None:
            return clauses
        term, _ = got
        clauses.append(clause_from_term(term, "library"))


_CLAUSES = None


def _clauses():
    global _CLAUSES
    if _CLAUSES is None:
        _CLAUSES = parse_library_clauses(LISTS_SOURCE)
    return _CLAUSES


# -- natives ------------------------------------------------------------


def bi_length(thread, point, atom):
    lst, n = atom.args
    if type(n) is not Var:
        if type(n) is not Num or n.is_float:
            raise BallError(type_error("integer", n, "length/2"))
        if n.value < 0:
            return
    items, tail = list_parts(lst)
    if type(tail) is Compound and tail.indicator == "[]/0":
        thread.unify_push(point, n, Num(len(items)))
        return
    if type(tail) is not Var:
        raise BallError(type_error("list", lst, "length/2"))
    if type(n) is Num:
        want = n.value - len(items)
        if want < 0:
            return
        fresh = thread.session.fresh_names
        ext = make_list([Var(fresh.next_name()) for _ in range(want)])
        thread.unify_push(point, tail, ext)
        return
    # both open: enumerate longer and longer skeletons lazily
    fresh = thread.session.fresh_names
    states = []
    close = Compound(",", (Compound("=", (tail, Atom("[]"))),
                           Compound("=", (n, Num(len(items))))))
    states.append(thread.child(point, _replace(point, close)))
    grown = make_list([Var(fresh.next_name())], Var(fresh.next_name()))
    grow = Compound(",", (Compound("=", (tail, grown)),
                          Compound("length", (lst, n))))
    states.append(thread.child(point, _replace(point, grow)))
    thread.prepend(states)


def _replace(point, subgoal):
    from .._core import replace_selected

    return replace_selected(point.goal, subgoal)


def _proper_list_arg(t, ctx):
    if type(t) is Var:
        raise BallError(instantiation(ctx))
    if not is_proper_list(t):
        raise BallError(type_error("list", t, ctx))
    items, _ = list_parts(t)
    return items


def bi_reverse(thread, point, atom):
    a, b = atom.args
    if type(a) is not Var:
        items = _proper_list_arg(a, "reverse/2")
        thread.unify_push(point, b, make_list(list(reversed(items))))
        return
    items = _proper_list_arg(b, "reverse/2")
    thread.unify_push(point, a, make_list(list(reversed(items))))


def bi_msort(thread, point, atom):
    items = _proper_list_arg(atom.args[0], "msort/2")
    items = sorted(items, key=cmp_to_key(compare_terms))
    thread.unify_push(point, atom.args[1], make_list(items))


def bi_sort(thread, point, atom):
    items = _proper_list_arg(atom.args[0], "sort/2")
    items = sorted(items, key=cmp_to_key(compare_terms))
    deduped = [t for i, t in enumerate(items)
               if i == 0 or compare_terms(items[i - 1], t) != 0]
    thread.unify_push(point, atom.args[1], make_list(deduped))


def make_lists_module() -> Module:
    preds = {}
    for clause in _clauses():
        preds.setdefault(clause.indicator, ClauseList()).add(clause)
    preds["length/2"] = bi_length
    preds["reverse/2"] = bi_reverse
    preds["msort/2"] = bi_msort
    preds["sort/2"] = bi_sort
    return Module("lists", preds, visible=list(preds))
