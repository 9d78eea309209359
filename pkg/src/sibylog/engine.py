"""Sessions, threads and the non-blocking resolution engine.

The engine never blocks the host: searching for an answer happens inside
again(), which runs resolution steps until an answer, failure, error or the
inference budget, and hands control back whenever a native procedure starts
an asynchronous action. Completions (answer handlers, consult callbacks) are
always delivered through the host task queue, never re-entrantly.

A Thread here is a derivation record - goal stack, call queue, counters -
not an OS thread. Exactly one logical executor may drive a session at a
time.
"""

from __future__ import annotations

import random
import time
from collections import deque
from dataclasses import dataclass, field
from heapq import heappop, heappush

from ._core import (
    Atom,
    ChoicePoint,
    Compound,
    Num,
    Var,
    apply_sub,
    compose_sub,
    mark_cuts,
    replace_selected,
    resolve_step,
    restrict_sub,
    select_atom,
    term_vars,
    unify,
    var_names_of,
)
from .errors import (
    BallError,
    Halt,
    PrologError,
    SibylogSyntaxError,
    error_ball,
    existence_error,
    instantiation,
    type_error,
)
from .fs import VirtualFS
from .modules import ClauseList, Module
from .reader import (
    OperatorTable,
    Parser,
    clause_from_term,
    dcg_translate,
    tokenize,
)
from .terms import Substitution

DEFAULT_MAX_INFERENCES = 100_000


# =====================================================================
# Schedulers (the host task queue abstraction)
# =====================================================================


class SimpleScheduler:
    """Deterministic FIFO run loop with real-time timers, for synchronous
    embeddings, the CLI and tests."""

    def __init__(self, time_fn=time.monotonic, sleep_fn=time.sleep):
        self._queue = deque()
        self._timers = []
        self._seq = 0
        self._time = time_fn
        self._sleep = sleep_fn

    def call_soon(self, fn):
        self._queue.append(fn)

    def call_later(self, delay_ms, fn):
        self._seq += 1
        heappush(self._timers, (self._time() + delay_ms / 1000.0, self._seq, fn))

    def _fire_due(self):
        now = self._time()
        fired = False
        while self._timers and self._timers[0][0] <= now:
            _, _, fn = heappop(self._timers)
            fn()
            fired = True
        return fired

    def run_once(self) -> bool:
        """Run one queued task or one due timer; True if anything ran."""
        if self._queue:
            self._queue.popleft()()
            return True
        if self._timers:
            due, _, _ = self._timers[0]
            now = self._time()
            if due > now:
                self._sleep(due - now)
            return self._fire_due()
        return False

    def run_until_idle(self):
        while self.run_once():
            pass

    def run_until(self, predicate, max_seconds=30.0):
        deadline = self._time() + max_seconds
        while not predicate():
            if not self.run_once():
                raise RuntimeError("scheduler idle but condition never became true")
            if self._time() > deadline:
                raise RuntimeError("scheduler run_until timed out")

    @property
    def idle(self) -> bool:
        return not self._queue and not self._timers


class AsyncioScheduler:
    """Adapter over a running asyncio loop (the deferred facade uses this)."""

    def __init__(self, loop):
        self.loop = loop

    def call_soon(self, fn):
        self.loop.call_soon(fn)

    def call_later(self, delay_ms, fn):
        self.loop.call_later(delay_ms / 1000.0, fn)


# =====================================================================
# Answers
# =====================================================================


@dataclass
class Answer:
    """Outcome of one answer request."""

    kind: str  # success | failure | error | limit
    substitution: Substitution | None = None
    var_names: list = field(default_factory=list)
    ball: object = None

    @property
    def is_success(self):
        return self.kind == "success"

    def __repr__(self):
        if self.kind == "success":
            return f"Answer(success, {self.substitution.bindings})"
        if self.kind == "error":
            return f"Answer(error, {self.ball})"
        return f"Answer({self.kind})"


class _CallEntry:
    __slots__ = ("cb", "internal")

    def __init__(self, cb, internal):
        self.cb = cb
        self.internal = internal


# =====================================================================
# Thread
# =====================================================================


class Thread:
    """A derivation: choice-point stack, call queue, budget and counters."""

    def __init__(self, session):
        self.session = session
        self.points: list[ChoicePoint] = []
        self.calls: deque[_CallEntry] = deque()
        self.current_limit = session.max_inferences
        self.total_inferences = 0
        self.query_vars: list[str] = []
        self.goal_text = ""
        self.suspended = False
        self.protected: list[frozenset] = []
        self._keep_base: set = set()
        self._pid = 0
        self.observer = None

    # -- plumbing ---------------------------------------------------------

    def next_pid(self) -> int:
        self._pid += 1
        return self._pid

    def _rebuild_keep(self):
        base = set(self.query_vars)
        for p in self.protected:
            base |= p
        self._keep_base = base

    def push_protected(self, names):
        self.protected.append(frozenset(names))
        self._rebuild_keep()

    def pop_protected(self):
        self.protected.pop()
        self._rebuild_keep()

    def prepend(self, states):
        """Push alternatives so the first of `states` is tried first."""
        if self.observer is not None:
            for st in states:
                self.observer.on_push(st)
        self.points.extend(reversed(states))

    def child(self, point, new_goal, mgu=None, payload=None):
        """Continuation choice point under `point`, with optional bindings."""
        if mgu:
            if new_goal is not None:
                new_goal = apply_sub(new_goal, mgu)
                keep = set(self._keep_base)
                keep.update(var_names_of(new_goal))
            else:
                keep = self._keep_base
            sub = compose_sub(point.sub, mgu, keep)
        else:
            sub = point.sub
        return ChoicePoint(
            new_goal, sub, point, self.next_pid(), point.depth + 1, payload=payload
        )

    def success(self, point, mgu=None):
        """Push the continuation for a successful native (atom removed)."""
        goal = replace_selected(point.goal, None)
        self.prepend([self.child(point, goal, mgu)])

    def replace(self, point, subgoal, mgu=None):
        """Push the continuation with the selected atom replaced by subgoal."""
        goal = replace_selected(point.goal, subgoal)
        self.prepend([self.child(point, goal, mgu)])

    def unify_push(self, point, a, b) -> bool:
        mgu = unify(a, b, self.session.flags["occurs_check"])
        if mgu is None:
            return False
        self.success(point, mgu)
        return True

    def throw_error(self, ball, parent=None):
        st = ChoicePoint(
            None,
            parent.sub if parent is not None else {},
            parent,
            self.next_pid(),
            (parent.depth + 1) if parent is not None else 0,
            ball=ball,
        )
        if self.observer is not None:
            self.observer.on_push(st)
        self.points.append(st)

    # -- the resolution loop ----------------------------------------------

    def step(self):
        """One resolution step; truthy return means an async native took over."""
        point = self.points.pop()
        self.total_inferences += 1
        self.current_limit -= 1
        goal = point.goal
        atom = select_atom(goal)
        ta = type(atom)
        if ta is Var:
            self.throw_error(instantiation("call/1"), point)
            return None
        if ta is not Compound:
            self.throw_error(type_error("callable", atom, "call/1"), point)
            return None
        entry = self.session.resolve(atom.indicator)
        if entry is None:
            pi = Compound("/", (Atom(atom.functor), Num(len(atom.args))))
            self.throw_error(existence_error("procedure", pi, atom.indicator), point)
            return None
        if callable(entry):
            try:
                return entry(self, point, atom)
            except BallError as e:
                self.throw_error(e.ball, point)
                return None
        pairs = resolve_step(
            atom,
            goal,
            point.sub,
            entry.candidates(atom),
            self.session.flags["occurs_check"],
            point.pid,
            point.depth,
            self.session.fresh,
            self._keep_base,
        )
        if pairs:
            pid = self.next_pid
            depth = point.depth + 1
            states = [ChoicePoint(g, s, point, pid(), depth) for g, s in pairs]
            self.prepend(states)
        return None

    def again(self):
        """Drive resolution until every queued handler got an outcome, an
        async native suspended the thread, or the budget ran out.

        self.points is re-read on every check: cut pruning and the
        sub-derivation machinery (catch, findall) replace the stack list.
        """
        self.suspended = False
        while self.calls:
            points = self.points
            while (
                self.current_limit > 0
                and points
                and points[-1].goal is not None
                and points[-1].ball is None
            ):
                if self.step():
                    self.suspended = True
                    return
                points = self.points
            if points and (points[-1].goal is None or points[-1].ball is not None):
                top = points.pop()
                if top.ball is not None:
                    outcome = ("error", top.ball, top)
                else:
                    if self.observer is not None:
                        self.observer.on_answer(top)
                    outcome = ("success", top, None)
            elif not points:
                outcome = ("failure", None, None)
            else:
                outcome = ("limit", None, None)  # stack untouched: resumable
            entry = self.calls.popleft()
            if entry.internal:
                entry.cb(outcome)
                continue
            answer = self._make_answer(outcome)
            self.session.scheduler.call_soon(_Deliver(entry.cb, answer))
            if self.calls:
                self.current_limit = self.session.max_inferences
        return

    def _make_answer(self, outcome) -> Answer:
        kind = outcome[0]
        if kind == "success":
            sub = restrict_sub(outcome[1].sub, set(self.query_vars))
            return Answer("success", Substitution(sub), list(self.query_vars))
        if kind == "error":
            return Answer("error", var_names=list(self.query_vars), ball=outcome[1])
        if kind == "failure":
            return Answer("failure", var_names=list(self.query_vars))
        return Answer("limit", var_names=list(self.query_vars))

    # -- queries and answers ------------------------------------------------

    def query(self, text, on_done=None):
        """Parse and install a goal; completion is delivered asynchronously."""
        if self.calls:
            raise RuntimeError("query on a busy thread (answers still pending)")
        try:
            from .reader import parse_term_text

            goal, names = parse_term_text(
                text,
                self.session.operators,
                self.session.flags["double_quotes"],
                self.session.fresh_names,
            )
        except SibylogSyntaxError as e:
            if on_done is not None:
                self.session.scheduler.call_soon(_Deliver(on_done, e.ball()))
            else:
                raise
            return
        self.query_term(goal, names)
        self.goal_text = text
        if on_done is not None:
            self.session.scheduler.call_soon(_Deliver(on_done, None))

    def query_term(self, goal, var_names):
        """Install a goal term directly; resets the previous derivation."""
        self.points = []
        self.calls.clear()
        self.protected = []
        self.query_vars = list(var_names)
        self.goal_text = None
        self._rebuild_keep()
        self.suspended = False
        root = ChoicePoint(None, {}, None, self.next_pid(), 0)
        root.goal = mark_cuts(goal, root.pid, root.depth)
        if self.observer is not None:
            self.observer.on_root(root)
        self.points = [root]

    def answer(self, cb):
        """Queue an answer handler; search starts if the queue was empty."""
        self.calls.append(_CallEntry(cb, False))
        if len(self.calls) == 1:
            self.current_limit = self.session.max_inferences
            if not self.suspended:
                self.again()

    def answer_internal(self, cb):
        """Front-of-queue handler used by natives running sub-derivations."""
        self.calls.appendleft(_CallEntry(cb, True))


class _Deliver:
    """Scheduled delivery of one completion (picklable-free tiny closure)."""

    __slots__ = ("cb", "value")

    def __init__(self, cb, value):
        self.cb = cb
        self.value = value

    def __call__(self):
        self.cb(self.value)


# =====================================================================
# Session
# =====================================================================


class _FreshNames:
    """Session-wide fresh variable source (shared by reader and renamer so
    `_G<n>` names can never collide inside one session)."""

    __slots__ = ("cell",)

    def __init__(self):
        self.cell = [0]

    def next_name(self) -> str:
        self.cell[0] += 1
        return f"_G{self.cell[0]}"


class Session:
    """Shared knowledge base, flags, operator table and a default thread."""

    def __init__(
        self,
        max_inferences=DEFAULT_MAX_INFERENCES,
        scheduler=None,
        host_bridge=None,
        document=None,
        fs=None,
        seed=None,
        stdout=None,
    ):
        if max_inferences <= 0:
            raise ValueError("max_inferences must be positive")
        self.max_inferences = max_inferences
        self.scheduler = scheduler or SimpleScheduler()
        self.operators = OperatorTable()
        self.flags = {
            "occurs_check": False,
            "double_quotes": "codes",
            "unknown": "error",
            "bounded": "false",
        }
        self.fresh_names = _FreshNames()
        self.fresh = self.fresh_names.cell
        self.rng = random.Random(seed)
        self.fs = fs if fs is not None else VirtualFS()
        self.stdout = stdout or _default_stdout
        self.modules: dict[str, Module] = {}
        self.imports: list[Module] = []
        self._resolve_cache: dict = {}
        self.streams = {}
        self.next_stream = [0]

        from . import builtins as _builtins
        from . import hostbridge as _hostbridge
        from . import dom as _dom
        from .vdom import VirtualDocument

        self.bridge = host_bridge if host_bridge is not None else _hostbridge.FakeHost()
        if getattr(self.bridge, "scheduler", None) is None:
            self.bridge.scheduler = self.scheduler
        self.document = document if document is not None else VirtualDocument()
        self.modules["system"] = _builtins.make_system_module()
        self.modules["user"] = Module("user", {}, [])
        self._library_registry = {
            "lists": _builtins.make_lists_module,
            "random": _builtins.make_random_module,
            "os": _builtins.make_os_module,
            "js": _hostbridge.make_js_module,
            "dom": _dom.make_dom_module,
        }
        self.library_path: list[str] = []
        self.thread = Thread(self)

    # -- module resolution --------------------------------------------------

    def resolve(self, indicator):
        """Defining entry for an indicator: user, then imports, then system."""
        hit = self._resolve_cache.get(indicator, _MISS)
        if hit is not _MISS:
            return hit
        entry = self.modules["user"].predicates.get(indicator)
        if entry is None:
            for mod in self.imports:
                if indicator in mod.predicates and indicator in mod.exports():
                    entry = mod.predicates[indicator]
                    break
        if entry is None:
            entry = self.modules["system"].predicates.get(indicator)
        self._resolve_cache[indicator] = entry
        return entry

    def resolving_module(self, indicator):
        """Name of the module resolve() would take the definition from."""
        if indicator in self.modules["user"].predicates:
            return "user"
        for mod in self.imports:
            if indicator in mod.predicates and indicator in mod.exports():
                return mod.name
        if indicator in self.modules["system"].predicates:
            return "system"
        return None

    def invalidate(self, indicator=None):
        if indicator is None:
            self._resolve_cache.clear()
        else:
            self._resolve_cache.pop(indicator, None)

    def register_module(self, module: Module):
        self.modules[module.name] = module

    def import_module(self, module: Module):
        if module not in self.imports:
            self.imports.append(module)
        self.invalidate()

    def load_package(self, entry_point):
        """Package authoring contract: entry point receives the session and
        registers one or more modules (optionally importing them)."""
        entry_point(self)

    def import_library(self, name: str) -> bool:
        if name in self.modules:
            self.import_module(self.modules[name])
            return True
        factory = self._library_registry.get(name)
        if factory is not None:
            mod = factory()
            self.register_module(mod)
            self.import_module(mod)
            return True
        return False

    # -- system natives defined in user code are forbidden -------------------

    def is_protected(self, indicator) -> bool:
        return indicator in self.modules["system"].predicates

    def user_clauses(self, indicator, create=False):
        preds = self.modules["user"].predicates
        entry = preds.get(indicator)
        if entry is None and create:
            entry = ClauseList(dynamic=True)
            preds[indicator] = entry
            self.invalidate(indicator)
        return entry

    # -- flags ---------------------------------------------------------------

    def set_flag(self, name, value):
        allowed = {
            "occurs_check": (True, False),
            "double_quotes": ("codes", "chars", "atom"),
            "unknown": ("error", "fail"),
        }
        if name not in allowed:
            raise ValueError(f"unknown flag {name}")
        if value not in allowed[name]:
            raise ValueError(f"bad value {value!r} for flag {name}")
        self.flags[name] = value

    def get_flag(self, name):
        return self.flags[name]

    # -- threads -------------------------------------------------------------

    def fork_thread(self) -> Thread:
        return Thread(self)

    # -- top-level API (paper scheme): consult / query / answer ---------------

    def consult(self, source, on_done=None):
        _ConsultJob(self, source, on_done or (lambda err: None)).start()

    def query(self, text, on_done=None):
        self.thread.query(text, on_done)

    def answer(self, cb):
        self.thread.answer(cb)

    def format_answer(self, answer, options=None):
        from .render import format_answer as _fa

        return _fa(self, answer, options)

    # -- synchronous conveniences (SimpleScheduler embeddings only) ----------

    def run(self):
        self.scheduler.run_until_idle()

    def solve(self, goal_text, max_answers=None, thread=None):
        """Blocking helper: consult-free query returning a list of Answers.

        Enumerates answers until failure/error/limit or max_answers.
        """
        th = thread or self.thread
        got: list[Answer] = []
        done = []
        box = []

        def on_ans(ans):
            box.append(ans)

        err = []
        th.query(goal_text, on_done=lambda e: err.append(e))
        self.scheduler.run_until(lambda: err)
        if err[0] is not None:
            return [Answer("error", var_names=[], ball=err[0])]
        while True:
            box.clear()
            th.answer(on_ans)
            self.scheduler.run_until(lambda: box)
            ans = box[0]
            got.append(ans)
            if ans.kind != "success":
                break
            if max_answers is not None and sum(a.is_success for a in got) >= max_answers:
                break
        return got

    def consult_text_sync(self, text):
        """Blocking consult; raises PrologError on failure."""
        out = []
        self.consult(text, on_done=lambda e: out.append(e))
        self.scheduler.run_until(lambda: out)
        if out[0] is not None:
            raise PrologError(out[0])


_MISS = object()


def _default_stdout(text):
    import sys

    sys.stdout.write(text)


def create_session(max_inferences=DEFAULT_MAX_INFERENCES, **kw) -> Session:
    """Paper-scheme constructor: a session with an empty user module."""
    return Session(max_inferences=max_inferences, **kw)


# =====================================================================
# Consult pipeline
# =====================================================================


class Text:
    """Explicit inline-program source."""

    def __init__(self, text):
        self.text = text


class Path:
    def __init__(self, path):
        self.path = path


class Url:
    def __init__(self, url):
        self.url = url


class ScriptRegion:
    """Element id of an embedded text/prolog script region."""

    def __init__(self, element_id):
        self.element_id = element_id


def classify_source(source):
    """Auto-detect untagged string sources (program text, URL or path)."""
    if isinstance(source, (Text, Path, Url, ScriptRegion)):
        return source
    s = str(source)
    if "\n" in s or ":-" in s or s.rstrip().endswith("."):
        return Text(s)
    if s.startswith("http://") or s.startswith("https://"):
        return Url(s)
    return Path(s)


class _ConsultJob:
    """Reads a source term by term; clauses are stored, directives run on a
    dedicated thread before parsing resumes (so op/3 and use_module/1 affect
    the rest of the file). Everything is CPS-shaped because a directive may
    suspend the whole consult."""

    def __init__(self, session, source, on_done):
        self.session = session
        self.source = classify_source(source)
        self.on_done = on_done
        self.thread = session.fork_thread()
        self.parser = None

    def start(self):
        sess = self.session
        src = self.source
        try:
            if isinstance(src, Text):
                text = src.text
            elif isinstance(src, Path):
                try:
                    text = sess.fs.read(src.path)
                except FileNotFoundError:
                    self.finish(
                        existence_error("source_sink", Atom(src.path), "consult/1")
                    )
                    return
            elif isinstance(src, ScriptRegion):
                text = sess.document.script_text(src.element_id)
                if text is None:
                    self.finish(
                        existence_error(
                            "source_sink", Atom(src.element_id), "consult/1"
                        )
                    )
                    return
            else:  # Url
                self._fetch(src.url)
                return
            self._begin(text)
        except SibylogSyntaxError as e:
            self.finish(e.ball())

    def _fetch(self, url):
        result = self.session.bridge.fetch(url)

        def ok(text):
            try:
                self._begin(text)
            except SibylogSyntaxError as e:
                self.finish(e.ball())

        def fail(_reason):
            self.finish(existence_error("source_sink", Atom(url), "consult/1"))

        from .hostbridge import HostDeferred

        if isinstance(result, HostDeferred):
            result.settle(ok, fail)
        elif result is None:
            fail("unreachable")
        else:
            ok(result)

    def _begin(self, text):
        self.parser = Parser(tokenize(text), _SessionView(self.session),
                             self.session.fresh_names)
        self.step()

    def finish(self, err):
        self.session.scheduler.call_soon(_Deliver(self.on_done, err))

    # -- main loop (one iteration per read term; directives re-enter) -------

    def step(self):
        while True:
            try:
                got = self.parser.read_term()
            except SibylogSyntaxError as e:
                self.finish(e.ball())
                return
            if got is None:
                self.finish(None)
                return
            term, _names = got
            if type(term) is Compound and term.indicator == ":-/1":
                self.run_goal(term.args[0], self._after_directive)
                return
            if not self.expand_and_store(term):
                return

    def _after_directive(self, outcome):
        kind = outcome[0]
        if kind == "error":
            self.finish(outcome[1])
        elif kind == "limit":
            self.finish(error_ball(
                Compound("resource_error", (Atom("inferences"),)), "consult/1"))
        else:
            if kind == "failure":
                self.session.stdout("Warning: directive failed\n")
            self.session.scheduler.call_soon(self.step)

    def run_goal(self, goal, done, keep_vars=()):
        """Run a goal for its first answer on the consult thread."""
        th = self.thread
        th.query_term(goal, list(keep_vars))
        th.answer_internal(lambda outcome: done(outcome))
        th.current_limit = self.session.max_inferences
        if not th.suspended:
            th.again()

    # -- expansion and storage ----------------------------------------------

    def expand_and_store(self, term) -> bool:
        """Returns False when the pipeline went asynchronous (or failed)."""
        if type(term) is Compound and term.indicator == "-->/2":
            term = dcg_translate(term, self.session.fresh_names)
        if self.session.resolve("term_expansion/2") is not None:
            self._run_expansion(term)
            return False
        return self.store_clause(term)

    def _run_expansion(self, term):
        v = Var(self.session.fresh_names.next_name())
        goal = Compound("term_expansion", (term, v))

        def done(outcome):
            kind = outcome[0]
            if kind == "error":
                self.finish(outcome[1])
                return
            if kind == "success":
                expanded = apply_sub(v, outcome[1].sub)
                items = _expansion_list(expanded)
            else:
                items = [term]
            ok = True
            for item in items:
                if type(item) is Compound and item.indicator == ":-/1":
                    # expansion produced a directive: run it, then continue
                    self.run_goal(item.args[0], self._after_directive)
                    return
                if not self.store_clause(item, resume=False):
                    ok = False
                    break
            if ok:
                self.session.scheduler.call_soon(self.step)

        self.run_goal(goal, done, [v.name])

    def store_clause(self, term, resume=True) -> bool:
        sess = self.session
        try:
            clause = clause_from_term(term, "consult/1")
        except PrologError as e:
            self.finish(e.ball)
            return False
        if sess.is_protected(clause.indicator):
            from .errors import permission_error

            self.finish(permission_error(
                "modify", "static_procedure",
                Compound("/", (Atom(clause.head.functor), Num(len(clause.head.args)))),
                "consult/1"))
            return False
        if clause.body is not None and sess.resolve("goal_expansion/2") is not None:
            self._expand_body(clause)
            return False
        sess.user_clauses(clause.indicator, create=True).add(clause)
        return True

    def _expand_body(self, clause):
        """Apply goal_expansion/2 once to each body goal, left to right."""
        sess = self.session
        spots = []
        _collect_goal_spots(clause.body, (), spots)
        results = {}

        def run_next(i):
            if i >= len(spots):
                path_map = dict(results)
                new_body = _rebuild_body(clause.body, (), path_map)
                from .reader import Clause

                final = Clause(clause.head, new_body)
                sess.user_clauses(final.indicator, create=True).add(final)
                sess.scheduler.call_soon(self.step)
                return
            path, goal = spots[i]
            v = Var(sess.fresh_names.next_name())

            def done(outcome):
                if outcome[0] == "error":
                    self.finish(outcome[1])
                    return
                if outcome[0] == "success":
                    results[path] = apply_sub(v, outcome[1].sub)
                run_next(i + 1)

            self.run_goal(Compound("goal_expansion", (goal, v)), done, [v.name])

        run_next(0)


def _expansion_list(t):
    from ._core import list_parts, is_proper_list

    if is_proper_list(t):
        items, _ = list_parts(t)
        return items
    return [t]


_TRANSPARENT = (",/2", ";/2", "->/2")


def _collect_goal_spots(body, path, out):
    if type(body) is Compound and body.indicator in _TRANSPARENT:
        _collect_goal_spots(body.args[0], path + (0,), out)
        _collect_goal_spots(body.args[1], path + (1,), out)
    else:
        out.append((path, body))


def _rebuild_body(body, path, results):
    if type(body) is Compound and body.indicator in _TRANSPARENT:
        return Compound(
            body.functor,
            (
                _rebuild_body(body.args[0], path + (0,), results),
                _rebuild_body(body.args[1], path + (1,), results),
            ),
        )
    return results.get(path, body)


class _SessionView:
    """What the parser needs from a session, read live between terms."""

    def __init__(self, session):
        self._s = session

    @property
    def operators(self):
        return self._s.operators

    @property
    def double_quotes(self):
        return self._s.flags["double_quotes"]


# =====================================================================
# Deferred-completion facade (asyncio)
# =====================================================================


def attach_asyncio(session) -> Session:
    """Point the session's task queue at the running asyncio loop."""
    import asyncio

    loop = asyncio.get_running_loop()
    sched = session.scheduler
    if isinstance(sched, AsyncioScheduler):
        if sched.loop is not loop:
            raise RuntimeError("session is attached to a different event loop")
        return session
    if isinstance(sched, SimpleScheduler) and not sched.idle:
        raise RuntimeError("cannot switch schedulers while tasks are pending")
    session.scheduler = AsyncioScheduler(loop)
    return session


async def consult_async(session, source):
    """Resolves when the program loaded; raises PrologError otherwise."""
    import asyncio

    attach_asyncio(session)
    fut = asyncio.get_running_loop().create_future()

    def done(err):
        if fut.cancelled():
            return
        if err is None:
            fut.set_result(None)
        else:
            fut.set_exception(PrologError(err))

    session.consult(source, done)
    await fut


async def query_async(session, goal_text, thread=None):
    import asyncio

    attach_asyncio(session)
    fut = asyncio.get_running_loop().create_future()
    th = thread or session.thread

    def done(err):
        if fut.cancelled():
            return
        if err is None:
            fut.set_result(None)
        else:
            fut.set_exception(PrologError(err))

    th.query(goal_text, done)
    await fut


async def answer_async(session, thread=None) -> Answer:
    """Next answer as an awaitable; success and failure resolve, uncaught
    errors raise PrologError and an exhausted budget raises LimitExceeded."""
    import asyncio

    from .errors import LimitExceeded

    attach_asyncio(session)
    fut = asyncio.get_running_loop().create_future()
    th = thread or session.thread
    th.answer(lambda ans: fut.cancelled() or fut.set_result(ans))
    ans = await fut
    if ans.kind == "error":
        raise PrologError(ans.ball, session.format_answer(ans))
    if ans.kind == "limit":
        raise LimitExceeded()
    return ans


async def answer_stream(session, thread=None):
    """Async generator over success answers; ends at failure, raises on
    error/limit like answer_async."""
    while True:
        ans = await answer_async(session, thread)
        if ans.kind != "success":
            return
        yield ans
