"""The `system` module: ISO control constructs and core builtins.

Every native here follows the same calling convention: fn(thread, point,
atom) where `point` has already been popped and `atom` is the selected
(leftmost, fully substituted) goal atom. Natives either push choice points,
push an error state (by raising BallError), or return a truthy marker after
starting an asynchronous action. Pushing nothing means failure.
"""

from __future__ import annotations

from functools import cmp_to_key

from .._core import (
    Atom,
    ChoicePoint,
    Compound,
    EMPTY_LIST,
    HostValue,
    Num,
    TRUE,
    Var,
    apply_sub,
    compare_terms,
    compose_sub,
    is_atom,
    is_callable,
    is_proper_list,
    list_parts,
    make_list,
    mark_cuts,
    rename_term,
    replace_selected,
    restrict_sub,
    struct_eq,
    term_vars,
    unify,
    var_names_of,
)
from ..errors import (
    BallError,
    Halt,
    PrologError,
    domain_error,
    existence_error,
    instantiation,
    permission_error,
    type_error,
)
from ..modules import ClauseList, Module
from ..reader import clause_from_term
from . import arith, strings

_FRAME = Atom("$frame")


def pi_term(name, arity):
    return Compound("/", (Atom(name), Num(arity)))


def check_callable(g, context):
    if type(g) is Var:
        raise BallError(instantiation(context))
    if not is_callable(g):
        raise BallError(type_error("callable", g, context))


# =====================================================================
# Control
# =====================================================================


def bi_true(thread, point, atom):
    thread.success(point)


def bi_fail(thread, point, atom):
    pass  # pushing nothing is failure


def bi_bare_cut(thread, point, atom):
    # A `!` that arrived through a variable binding (call(X), X = !): the
    # construct it could cut is already gone, so it behaves as true.
    thread.success(point)


def bi_cut_marker(thread, point, atom):
    """$cut(Barrier, Depth): prune every stacked state whose parent chain
    passes through the barrier point, then succeed."""
    bid = atom.args[0].value
    bdepth = atom.args[1].value
    kept = []
    pruned = []
    for st in thread.points:
        node = st.parent
        while node is not None and node.depth > bdepth:
            node = node.parent
        if node is not None and node.pid == bid:
            pruned.append(st)
        else:
            kept.append(st)
    if pruned:
        thread.points = kept
        if thread.observer is not None:
            thread.observer.on_prune(pruned)
    thread.success(point)


def _cut_marker_for(point):
    return Compound("$cut", (Num(point.pid), Num(point.depth)))


def bi_semicolon(thread, point, atom):
    left, right = atom.args
    if type(left) is Compound and left.indicator == "->/2":
        cond, then = left.args
        commit = Compound(
            ",",
            (Compound("call", (cond,)), Compound(",", (_cut_marker_for(point), then))),
        )
        states = [
            thread.child(point, replace_selected(point.goal, commit)),
            thread.child(point, replace_selected(point.goal, right)),
        ]
        thread.prepend(states)
        return
    states = [
        thread.child(point, replace_selected(point.goal, left)),
        thread.child(point, replace_selected(point.goal, right)),
    ]
    thread.prepend(states)


def bi_if_then(thread, point, atom):
    cond, then = atom.args
    commit = Compound(
        ",",
        (Compound("call", (cond,)), Compound(",", (_cut_marker_for(point), then))),
    )
    thread.replace(point, commit)


def bi_not_provable(thread, point, atom):
    g = atom.args[0]
    check_callable(g, "\\+/1")
    probe = Compound(
        ",",
        (Compound("call", (g,)), Compound(",", (_cut_marker_for(point), Atom("fail")))),
    )
    states = [
        thread.child(point, replace_selected(point.goal, probe)),
        thread.child(point, replace_selected(point.goal, None)),
    ]
    thread.prepend(states)


def _make_call(thread, point, atom, context):
    g = atom.args[0]
    extra = atom.args[1:]
    check_callable(g, context)
    if extra:
        g = Compound(g.functor, tuple(g.args) + tuple(extra))
    thread.replace(point, mark_cuts(g, point.pid, point.depth))


def bi_call(thread, point, atom):
    _make_call(thread, point, atom, f"call/{len(atom.args)}")


def bi_throw(thread, point, atom):
    ball = atom.args[0]
    if type(ball) is Var:
        raise BallError(instantiation("throw/1"))
    raise BallError(rename_term(ball, {}, thread.session.fresh))


def bi_halt(thread, point, atom):
    if atom.args:
        code = atom.args[0]
        if type(code) is Var:
            raise BallError(instantiation("halt/1"))
        if type(code) is not Num or code.is_float:
            raise BallError(type_error("integer", code, "halt/1"))
        raise Halt(code.value)
    raise Halt(0)


# =====================================================================
# Sub-derivations (catch/3, findall/3 and friends)
# =====================================================================


class SubGoal:
    """Run a goal on a swapped-out stack, reporting outcomes to a handler.

    The machinery keeps the composite derivation resumable across inference
    limits (a $frame re-entry point is parked on the outer stack) and
    supports backtracking re-entry after a success was consumed.
    """

    def __init__(self, thread, point, goal, context):
        check_callable(goal, context)
        self.thread = thread
        self.point = point
        self.goal = Compound("call", (goal,))
        self.names = var_names_of(point.goal) if point.goal is not None else frozenset()
        self.saved = None
        self.subpoints = None
        self.handler = None

    def start(self, handler):
        th = self.thread
        self.handler = handler
        self.saved = th.points
        root = ChoicePoint(
            self.goal, self.point.sub, self.point, th.next_pid(), self.point.depth + 1
        )
        th.points = [root]
        if th.observer is not None:
            th.observer.on_push(root)
        th.push_protected(self.names)
        th.answer_internal(self._on)

    def _on(self, outcome):
        if outcome[0] == "limit":
            # Park: outer stack back in place with a re-entry frame on top;
            # the limit outcome keeps flowing to the next queued handler.
            th = self.thread
            self.subpoints = th.points
            frame = ChoicePoint(
                _FRAME,
                self.point.sub,
                self.point,
                th.next_pid(),
                self.point.depth + 1,
                payload=self._resume,
            )
            th.points = self.saved + [frame]
            th.pop_protected()
            return
        self.handler(outcome)

    def _resume(self, thread, fpoint):
        self.saved = thread.points
        thread.points = self.subpoints
        thread.push_protected(self.names)
        thread.answer_internal(self._on)

    def keep_searching(self):
        """Stay inside the sub-derivation and ask for the next answer."""
        self.thread.answer_internal(self._on)

    def finish(self):
        """Restore the outer stack, dropping the sub-derivation."""
        th = self.thread
        th.points = self.saved
        th.pop_protected()

    def detach(self):
        """Restore the outer stack keeping the sub-derivation re-enterable;
        returns the re-entry frame to push (or None if exhausted)."""
        th = self.thread
        sub = th.points
        th.points = self.saved
        th.pop_protected()
        if not sub:
            return None
        self.subpoints = sub
        return ChoicePoint(
            _FRAME,
            self.point.sub,
            self.point,
            th.next_pid(),
            self.point.depth + 1,
            payload=self._resume,
        )


def bi_frame(thread, point, atom):
    return point.payload(thread, point)


def bi_catch(thread, point, atom):
    goal, catcher, recovery = atom.args
    sg = SubGoal(thread, point, goal, "catch/3")
    session = thread.session

    def handler(outcome):
        kind = outcome[0]
        if kind == "success":
            anspoint = outcome[1]
            frame = sg.detach()
            cont_goal = replace_selected(point.goal, None)
            if cont_goal is not None:
                cont_goal = apply_sub(cont_goal, anspoint.sub)
            keep = set(thread._keep_base)
            if cont_goal is not None:
                keep.update(var_names_of(cont_goal))
            cont = ChoicePoint(
                cont_goal,
                restrict_sub(anspoint.sub, keep),
                point,
                thread.next_pid(),
                point.depth + 1,
            )
            states = [cont] if frame is None else [cont, frame]
            thread.prepend(states)
        elif kind == "failure":
            sg.finish()
        elif kind == "error":
            ball = outcome[1]
            sg.finish()
            ball_copy = rename_term(ball, {}, session.fresh)
            mgu = unify(catcher, ball_copy, session.flags["occurs_check"])
            if mgu is None:
                thread.throw_error(ball, point)
            else:
                recov = Compound("call", (recovery,))
                thread.replace(point, recov, mgu)

    sg.start(handler)


def _collect_all(thread, point, goal, context, on_solution, on_done):
    """Enumerate every solution of goal; on_solution(anspoint) per answer,
    then on_done(None) at exhaustion or on_done(ball) on an error."""
    sg = SubGoal(thread, point, goal, context)

    def handler(outcome):
        kind = outcome[0]
        if kind == "success":
            on_solution(outcome[1])
            sg.keep_searching()
        elif kind == "failure":
            sg.finish()
            on_done(None)
        else:
            sg.finish()
            on_done(outcome[1])

    sg.start(handler)


def _check_bag(bag, context):
    t = bag
    while type(t) is Compound and t.indicator == "./2":
        t = t.args[1]
    if type(t) is Var or (type(t) is Compound and t.indicator == "[]/0"):
        return
    raise BallError(type_error("list", bag, context))


def bi_findall(thread, point, atom):
    template, goal, bag = atom.args
    _check_bag(bag, "findall/3")
    acc = []
    session = thread.session

    def on_solution(anspoint):
        inst = apply_sub(template, anspoint.sub)
        acc.append(rename_term(inst, {}, session.fresh))

    def on_done(ball):
        if ball is not None:
            thread.throw_error(ball, point)
        else:
            thread.unify_push(point, bag, make_list(acc))

    _collect_all(thread, point, goal, "findall/3", on_solution, on_done)


def _strip_witnesses(goal):
    witnesses = []
    while type(goal) is Compound and goal.indicator == "^/2":
        witnesses.append(goal.args[0])
        goal = goal.args[1]
    return witnesses, goal


def _bagof(thread, point, atom, sort_sets):
    context = "setof/3" if sort_sets else "bagof/3"
    template, qgoal, bag = atom.args
    _check_bag(bag, context)
    witnesses, goal = _strip_witnesses(qgoal)
    bound = set(term_vars(template))
    for w in witnesses:
        bound.update(term_vars(w))
    free = [n for n in term_vars(goal) if n not in bound]
    session = thread.session
    acc = []
    free_term = make_list([Var(n) for n in free])

    def on_solution(anspoint):
        inst = apply_sub(Compound("-", (free_term, template)), anspoint.sub)
        acc.append(rename_term(inst, {}, session.fresh))

    def on_done(ball):
        if ball is not None:
            thread.throw_error(ball, point)
            return
        if not acc:
            return  # bagof/setof fail on an empty solution set
        groups = []  # (witness instance, [templates])
        keyed = {}
        from .._core import freeze

        for inst in acc:
            w, t = inst.args
            k = freeze(w)
            if k not in keyed:
                keyed[k] = []
                groups.append((w, keyed[k]))
            keyed[k].append(t)
        if sort_sets:
            groups.sort(key=lambda g: cmp_to_key(compare_terms)(g[0]))
        states = []
        for w, items in groups:
            if sort_sets:
                items = sorted(items, key=cmp_to_key(compare_terms))
                items = [t for i, t in enumerate(items)
                         if i == 0 or compare_terms(items[i - 1], t) != 0]
            conj = Compound(
                ",",
                (
                    Compound("=", (free_term, w)),
                    Compound("=", (bag, make_list(items))),
                ),
            )
            states.append(thread.child(point, replace_selected(point.goal, conj)))
        thread.prepend(states)

    _collect_all(thread, point, goal, context, on_solution, on_done)


def bi_bagof(thread, point, atom):
    _bagof(thread, point, atom, sort_sets=False)


def bi_setof(thread, point, atom):
    _bagof(thread, point, atom, sort_sets=True)


# =====================================================================
# Unification predicates
# =====================================================================


def bi_unify(thread, point, atom):
    thread.unify_push(point, atom.args[0], atom.args[1])


def bi_not_unify(thread, point, atom):
    mgu = unify(atom.args[0], atom.args[1], thread.session.flags["occurs_check"])
    if mgu is None:
        thread.success(point)


def bi_unify_oc(thread, point, atom):
    mgu = unify(atom.args[0], atom.args[1], True)
    if mgu is not None:
        thread.success(point, mgu)


# =====================================================================
# Type tests
# =====================================================================


def _type_test(pred):
    def native(thread, point, atom):
        if pred(atom.args[0]):
            thread.success(point)

    return native


bi_var = _type_test(lambda t: type(t) is Var)
bi_nonvar = _type_test(lambda t: type(t) is not Var)
bi_atom = _type_test(is_atom)
bi_number = _type_test(lambda t: type(t) is Num)
bi_integer = _type_test(lambda t: type(t) is Num and not t.is_float)
bi_float = _type_test(lambda t: type(t) is Num and t.is_float)
bi_compound = _type_test(lambda t: type(t) is Compound and bool(t.args))
bi_atomic = _type_test(
    lambda t: type(t) is Num or type(t) is HostValue or is_atom(t)
)
bi_callable = _type_test(is_callable)
bi_is_list = _type_test(is_proper_list)


# =====================================================================
# Term inspection and construction
# =====================================================================


def bi_functor(thread, point, atom):
    t, name, arity = atom.args
    if type(t) is not Var:
        if type(t) is Num:
            mgu = unify(
                Compound("f", (name, arity)), Compound("f", (t, Num(0))),
                thread.session.flags["occurs_check"],
            )
        else:
            mgu = unify(
                Compound("f", (name, arity)),
                Compound("f", (Atom(t.functor), Num(len(t.args)))),
                thread.session.flags["occurs_check"],
            )
        if mgu is not None:
            thread.success(point, mgu)
        return
    if type(name) is Var or type(arity) is Var:
        raise BallError(instantiation("functor/3"))
    if type(arity) is not Num or arity.is_float:
        raise BallError(type_error("integer", arity, "functor/3"))
    n = arity.value
    if n < 0:
        raise BallError(domain_error("not_less_than_zero", arity, "functor/3"))
    if n == 0:
        thread.unify_push(point, t, name)
        return
    if type(name) is Num:
        raise BallError(type_error("atomic", name, "functor/3"))
    if not is_atom(name):
        raise BallError(type_error("atom", name, "functor/3"))
    fresh = thread.session.fresh_names
    built = Compound(name.functor, tuple(Var(fresh.next_name()) for _ in range(n)))
    thread.unify_push(point, t, built)


def bi_arg(thread, point, atom):
    n, t, a = atom.args
    if type(n) is Var or type(t) is Var:
        raise BallError(instantiation("arg/3"))
    if type(n) is not Num or n.is_float:
        raise BallError(type_error("integer", n, "arg/3"))
    if type(t) is not Compound or not t.args:
        raise BallError(type_error("compound", t, "arg/3"))
    if 1 <= n.value <= len(t.args):
        thread.unify_push(point, a, t.args[n.value - 1])


def bi_univ(thread, point, atom):
    t, lst = atom.args
    if type(t) is not Var:
        if type(t) is Num:
            parts = make_list([t])
        else:
            parts = make_list([Atom(t.functor)] + list(t.args))
        thread.unify_push(point, lst, parts)
        return
    items, tail = list_parts(lst)
    if type(tail) is Var:
        raise BallError(instantiation("=../2"))
    if not (type(tail) is Compound and tail.indicator == "[]/0"):
        raise BallError(type_error("list", lst, "=../2"))
    if not items:
        raise BallError(domain_error("non_empty_list", lst, "=../2"))
    head = items[0]
    if type(head) is Var:
        raise BallError(instantiation("=../2"))
    if len(items) == 1:
        if type(head) is Compound and head.args:
            raise BallError(type_error("atomic", head, "=../2"))
        thread.unify_push(point, t, head)
        return
    if type(head) is Num:
        raise BallError(type_error("atom", head, "=../2"))
    if not is_atom(head):
        raise BallError(type_error("atom", head, "=../2"))
    thread.unify_push(point, t, Compound(head.functor, tuple(items[1:])))


def bi_copy_term(thread, point, atom):
    src, dst = atom.args
    thread.unify_push(point, dst, rename_term(src, {}, thread.session.fresh))


# =====================================================================
# Term comparison
# =====================================================================


def _compare_test(ok):
    def native(thread, point, atom):
        if ok(compare_terms(atom.args[0], atom.args[1])):
            thread.success(point)

    return native


bi_struct_eq = _compare_test(lambda c: c == 0)
bi_struct_neq = _compare_test(lambda c: c != 0)
bi_term_lt = _compare_test(lambda c: c < 0)
bi_term_gt = _compare_test(lambda c: c > 0)
bi_term_le = _compare_test(lambda c: c <= 0)
bi_term_ge = _compare_test(lambda c: c >= 0)


def bi_compare(thread, point, atom):
    order, a, b = atom.args
    if type(order) is not Var:
        if not is_atom(order):
            raise BallError(type_error("atom", order, "compare/3"))
        if order.functor not in ("<", "=", ">"):
            raise BallError(domain_error("order", order, "compare/3"))
    c = compare_terms(a, b)
    sym = "<" if c < 0 else (">" if c > 0 else "=")
    thread.unify_push(point, order, Atom(sym))


# =====================================================================
# Solution helpers
# =====================================================================


def bi_between(thread, point, atom):
    lo, hi, x = atom.args
    if type(lo) is Var or type(hi) is Var:
        raise BallError(instantiation("between/3"))
    for b in (lo, hi):
        if type(b) is not Num or b.is_float:
            raise BallError(type_error("integer", b, "between/3"))
    if type(x) is Num and not x.is_float:
        if lo.value <= x.value <= hi.value:
            thread.success(point)
        return
    if type(x) is not Var:
        raise BallError(type_error("integer", x, "between/3"))
    if lo.value > hi.value:
        return
    # Lazy enumeration: bind the low bound now, re-call for the rest on
    # backtracking so huge ranges never materialize on the stack.
    first = Compound("=", (x, lo))
    if lo.value == hi.value:
        thread.replace(point, first)
        return
    rest = Compound("between", (Num(lo.value + 1), hi, x))
    states = [
        thread.child(point, replace_selected(point.goal, first)),
        thread.child(point, replace_selected(point.goal, rest)),
    ]
    thread.prepend(states)


# =====================================================================
# Database
# =====================================================================


def _assert_clause(thread, atom, context):
    clause_term = atom.args[0]
    if type(clause_term) is Var:
        raise BallError(instantiation(context))
    try:
        clause = clause_from_term(clause_term, context)
    except PrologError as e:
        raise BallError(e.ball)
    session = thread.session
    if session.is_protected(clause.indicator):
        raise BallError(
            permission_error(
                "modify", "static_procedure",
                pi_term(clause.head.functor, len(clause.head.args)), context,
            )
        )
    return clause


def bi_assertz(thread, point, atom):
    clause = _assert_clause(thread, atom, "assertz/1")
    thread.session.user_clauses(clause.indicator, create=True).add(clause)
    thread.success(point)


def bi_asserta(thread, point, atom):
    clause = _assert_clause(thread, atom, "asserta/1")
    thread.session.user_clauses(clause.indicator, create=True).add(clause, front=True)
    thread.success(point)


def bi_retract(thread, point, atom):
    arg = atom.args[0]
    if type(arg) is Var:
        raise BallError(instantiation("retract/1"))
    if type(arg) is Compound and arg.indicator == ":-/2":
        head, body = arg.args
    else:
        head, body = arg, TRUE
    if type(head) is Var:
        raise BallError(instantiation("retract/1"))
    if not is_callable(head):
        raise BallError(type_error("callable", head, "retract/1"))
    session = thread.session
    if session.is_protected(head.indicator):
        raise BallError(
            permission_error(
                "modify", "static_procedure",
                pi_term(head.functor, len(head.args)), "retract/1",
            )
        )
    entry = session.user_clauses(head.indicator)
    if not isinstance(entry, ClauseList) or not entry.clauses:
        return
    goal = replace_selected(point.goal, Atom("$retract_pick"))
    states = [
        ChoicePoint(goal, point.sub, point, thread.next_pid(), point.depth + 1,
                    payload=(entry, cl, head, body))
        for cl in list(entry.clauses)
    ]
    thread.prepend(states)


def bi_retract_pick(thread, point, atom):
    entry, cl, head, body = point.payload
    if cl not in entry.clauses:
        return  # already retracted along another branch
    mapping = {}
    h2 = rename_term(cl.head, mapping, thread.session.fresh)
    b2 = rename_term(cl.body, mapping, thread.session.fresh) if cl.body is not None else TRUE
    mgu = unify(
        Compound(":-", (head, body)),
        Compound(":-", (h2, b2)),
        thread.session.flags["occurs_check"],
    )
    if mgu is None:
        return
    entry.remove(cl)
    thread.success(point, mgu)


def bi_abolish(thread, point, atom):
    pi = atom.args[0]
    if type(pi) is Var:
        raise BallError(instantiation("abolish/1"))
    if not (type(pi) is Compound and pi.indicator == "//2"):
        raise BallError(type_error("predicate_indicator", pi, "abolish/1"))
    name, arity = pi.args
    if type(name) is Var or type(arity) is Var:
        raise BallError(instantiation("abolish/1"))
    if not is_atom(name):
        raise BallError(type_error("atom", name, "abolish/1"))
    if type(arity) is not Num or arity.is_float:
        raise BallError(type_error("integer", arity, "abolish/1"))
    indicator = f"{name.functor}/{arity.value}"
    session = thread.session
    if session.is_protected(indicator):
        raise BallError(
            permission_error("modify", "static_procedure", pi, "abolish/1")
        )
    session.modules["user"].predicates.pop(indicator, None)
    session.invalidate(indicator)
    thread.success(point)


def bi_dynamic(thread, point, atom):
    spec = atom.args[0]
    items = []

    def flat(t):
        if type(t) is Compound and t.indicator in (",/2", "./2"):
            flat(t.args[0])
            flat(t.args[1])
        elif type(t) is Compound and t.indicator == "[]/0":
            pass
        else:
            items.append(t)

    flat(spec)
    session = thread.session
    for pi in items:
        if type(pi) is Var:
            raise BallError(instantiation("dynamic/1"))
        if not (type(pi) is Compound and pi.indicator == "//2"
                and is_atom(pi.args[0]) and type(pi.args[1]) is Num):
            raise BallError(type_error("predicate_indicator", pi, "dynamic/1"))
        indicator = f"{pi.args[0].functor}/{pi.args[1].value}"
        if session.is_protected(indicator):
            raise BallError(
                permission_error("modify", "static_procedure", pi, "dynamic/1")
            )
        session.user_clauses(indicator, create=True).dynamic = True
    thread.success(point)


# =====================================================================
# Flags and operators
# =====================================================================

_FLAG_VALUES = {
    "occurs_check": ("true", "false"),
    "double_quotes": ("codes", "chars", "atom"),
    "unknown": ("error", "fail"),
    "bounded": None,  # read-only
}


def bi_set_prolog_flag(thread, point, atom):
    f, v = atom.args
    if type(f) is Var or type(v) is Var:
        raise BallError(instantiation("set_prolog_flag/2"))
    if not is_atom(f):
        raise BallError(type_error("atom", f, "set_prolog_flag/2"))
    name = f.functor
    if name not in _FLAG_VALUES:
        raise BallError(domain_error("prolog_flag", f, "set_prolog_flag/2"))
    allowed = _FLAG_VALUES[name]
    if allowed is None:
        raise BallError(
            permission_error("modify", "flag", f, "set_prolog_flag/2")
        )
    if not is_atom(v) or v.functor not in allowed:
        raise BallError(
            domain_error("flag_value", Compound("+", (f, v)), "set_prolog_flag/2")
        )
    value = v.functor
    if name == "occurs_check":
        thread.session.flags[name] = value == "true"
    else:
        thread.session.flags[name] = value
    thread.success(point)


def bi_current_prolog_flag(thread, point, atom):
    f, v = atom.args
    if type(f) is not Var and not is_atom(f):
        raise BallError(type_error("atom", f, "current_prolog_flag/2"))
    session = thread.session
    flags = dict(session.flags)
    flags["occurs_check"] = "true" if flags["occurs_check"] else "false"
    states = []
    for name, value in flags.items():
        conj = Compound(
            ",", (Compound("=", (f, Atom(name))), Compound("=", (v, Atom(str(value)))))
        )
        states.append(thread.child(point, replace_selected(point.goal, conj)))
    thread.prepend(states)


_OP_TYPES = {"xfx", "xfy", "yfx", "fy", "fx", "xf", "yf"}


def bi_op(thread, point, atom):
    p, t, names = atom.args
    if type(p) is Var or type(t) is Var or type(names) is Var:
        raise BallError(instantiation("op/3"))
    if type(p) is not Num or p.is_float:
        raise BallError(type_error("integer", p, "op/3"))
    if not 0 <= p.value <= 1200:
        raise BallError(domain_error("operator_priority", p, "op/3"))
    if not is_atom(t):
        raise BallError(type_error("atom", t, "op/3"))
    if t.functor not in _OP_TYPES:
        raise BallError(domain_error("operator_specifier", t, "op/3"))
    if is_atom(names):
        name_list = [names]
    elif is_proper_list(names):
        name_list, _ = list_parts(names)
    else:
        raise BallError(type_error("list", names, "op/3"))
    table = thread.session.operators
    for n in name_list:
        if type(n) is Var:
            raise BallError(instantiation("op/3"))
        if not is_atom(n):
            raise BallError(type_error("atom", n, "op/3"))
        if n.functor == ",":
            raise BallError(
                permission_error("modify", "operator", n, "op/3")
            )
        try:
            table.add(p.value, t.functor, n.functor)
        except ValueError:
            raise BallError(
                permission_error("create", "operator", n, "op/3")
            )
    thread.success(point)


def bi_current_op(thread, point, atom):
    p, t, n = atom.args
    states = []
    for prio, typ, name in thread.session.operators.entries():
        conj = Compound(
            ",",
            (
                Compound("=", (p, Num(prio))),
                Compound(
                    ",", (Compound("=", (t, Atom(typ))), Compound("=", (n, Atom(name))))
                ),
            ),
        )
        states.append(thread.child(point, replace_selected(point.goal, conj)))
    thread.prepend(states)


# =====================================================================
# DCG interface
# =====================================================================


def bi_phrase(thread, point, atom):
    from ..reader import dcg_body

    g = atom.args[0]
    lst = atom.args[1]
    rest = atom.args[2] if len(atom.args) == 3 else EMPTY_LIST
    check_callable(g, f"phrase/{len(atom.args)}")
    fresh = thread.session.fresh_names
    s0, s = Var(fresh.next_name()), Var(fresh.next_name())
    translated = dcg_body(g, s0, s, fresh)
    goal = Compound(
        ",",
        (Compound("=", (s0, lst)), Compound(",", (translated, Compound("=", (s, rest))))),
    )
    thread.replace(point, mark_cuts(goal, point.pid, point.depth))


# =====================================================================
# Output (REPL conveniences; stream I/O lives in the os module)
# =====================================================================


def _write(thread, t, quoted):
    from ..render import WriteOptions, render_term

    text = render_term(t, WriteOptions(quoted=quoted), thread.session.operators)
    thread.session.stdout(text)


def bi_write(thread, point, atom):
    _write(thread, atom.args[0], quoted=False)
    thread.success(point)


def bi_writeq(thread, point, atom):
    _write(thread, atom.args[0], quoted=True)
    thread.success(point)


def bi_nl(thread, point, atom):
    thread.session.stdout("\n")
    thread.success(point)


# =====================================================================
# Loading
# =====================================================================


def bi_use_module(thread, point, atom):
    spec = atom.args[0]
    if type(spec) is Var:
        raise BallError(instantiation("use_module/1"))
    session = thread.session
    if type(spec) is Compound and spec.indicator == "library/1" and is_atom(spec.args[0]):
        name = spec.args[0].functor
        if session.import_library(name):
            thread.success(point)
            return
        # registry miss: look for <dir>/<name>.pl along the library path
        for d in session.library_path:
            path = f"{d.rstrip('/')}/{name}.pl" if d else f"{name}.pl"
            if session.fs.exists(path):
                return _consult_async(thread, point, path, "use_module/1")
        raise BallError(
            existence_error("source_sink", spec, "use_module/1")
        )
    if is_atom(spec):
        return _consult_async(thread, point, spec.functor, "use_module/1")
    raise BallError(type_error("atom", spec, "use_module/1"))


def bi_consult(thread, point, atom):
    src = atom.args[0]
    if type(src) is Var:
        raise BallError(instantiation("consult/1"))
    if not is_atom(src):
        raise BallError(type_error("atom", src, "consult/1"))
    return _consult_async(thread, point, src.functor, "consult/1")


def _consult_async(thread, point, source, context):
    """Nested consult: suspend this derivation until the load completes."""

    def done(err):
        if err is None:
            thread.success(point)
        else:
            thread.throw_error(err, point)
        thread.again()

    thread.session.consult(source, done)
    return True


# =====================================================================
# Module assembly
# =====================================================================


def make_system_module() -> Module:
    preds = {
        "true/0": bi_true,
        "fail/0": bi_fail,
        "false/0": bi_fail,
        "!/0": bi_bare_cut,
        "$cut/2": bi_cut_marker,
        "$frame/0": bi_frame,
        ";/2": bi_semicolon,
        "->/2": bi_if_then,
        "\\+/1": bi_not_provable,
        "catch/3": bi_catch,
        "throw/1": bi_throw,
        "halt/0": bi_halt,
        "halt/1": bi_halt,
        "=/2": bi_unify,
        "\\=/2": bi_not_unify,
        "unify_with_occurs_check/2": bi_unify_oc,
        "var/1": bi_var,
        "nonvar/1": bi_nonvar,
        "atom/1": bi_atom,
        "number/1": bi_number,
        "integer/1": bi_integer,
        "float/1": bi_float,
        "compound/1": bi_compound,
        "atomic/1": bi_atomic,
        "callable/1": bi_callable,
        "is_list/1": bi_is_list,
        "functor/3": bi_functor,
        "arg/3": bi_arg,
        "=../2": bi_univ,
        "copy_term/2": bi_copy_term,
        "==/2": bi_struct_eq,
        "\\==/2": bi_struct_neq,
        "@</2": bi_term_lt,
        "@>/2": bi_term_gt,
        "@=</2": bi_term_le,
        "@>=/2": bi_term_ge,
        "compare/3": bi_compare,
        "between/3": bi_between,
        "findall/3": bi_findall,
        "bagof/3": bi_bagof,
        "setof/3": bi_setof,
        "assert/1": bi_assertz,
        "assertz/1": bi_assertz,
        "asserta/1": bi_asserta,
        "retract/1": bi_retract,
        "$retract_pick/0": bi_retract_pick,
        "abolish/1": bi_abolish,
        "dynamic/1": bi_dynamic,
        "set_prolog_flag/2": bi_set_prolog_flag,
        "current_prolog_flag/2": bi_current_prolog_flag,
        "op/3": bi_op,
        "current_op/3": bi_current_op,
        "phrase/2": bi_phrase,
        "phrase/3": bi_phrase,
        "write/1": bi_write,
        "writeq/1": bi_writeq,
        "nl/0": bi_nl,
        "use_module/1": bi_use_module,
        "consult/1": bi_consult,
    }
    for n in range(1, 9):
        preds[f"call/{n}"] = bi_call
    preds.update(arith.PREDICATES)
    preds.update(strings.PREDICATES)
    return Module("system", preds, visible=list(preds))
