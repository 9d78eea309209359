"""JSON-message embedding boundary.

Everything a remote front end needs crosses here as JSON: session control,
consult/query/answer, flags, derivation trees, document state and event
dispatch. Live handles (sessions, nodes, host objects) never leave this
side; they live in the dispatcher's tables and messages reference them by
id. The dispatcher is transport-agnostic: the bundled HTTP server and the
in-process tests both feed it plain dicts.

Request:  {"id": 7, "method": "answer", "params": {"session": 1}}
Response: {"id": 7, "result": {...}} or {"id": 7, "error": {...}}
"""

from __future__ import annotations

import asyncio

from .engine import (
    Answer,
    AsyncioScheduler,
    Path,
    ScriptRegion,
    Session,
    Text,
    Url,
)
from .errors import PrologError
from .render import WriteOptions, format_answer, render_term
from .tree import export_tree, record_tree
from .vdom import VirtualDocument

PROTOCOL_VERSION = 1


def _serialize_answer(session, ans: Answer, options) -> dict:
    payload = {
        "kind": ans.kind,
        "text": format_answer(session, ans, options),
        "var_names": list(ans.var_names),
        "bindings": {},
    }
    if ans.kind == "success":
        table = session.operators
        payload["bindings"] = {
            name: render_term(term, options, table)
            for name, term in ans.substitution.items()
        }
    if ans.kind == "error":
        payload["ball"] = render_term(
            ans.ball, WriteOptions(quoted=True), session.operators
        )
    return payload


class _BoundSession:
    def __init__(self, session: Session):
        self.session = session
        self.options = WriteOptions()


class Boundary:
    """Dispatcher over a table of sessions. Drive with `await handle(msg)`."""

    def __init__(self):
        self.sessions: dict[int, _BoundSession] = {}
        self._next = 0

    # -- plumbing -----------------------------------------------------------

    async def handle(self, msg: dict) -> dict:
        mid = msg.get("id")
        method = msg.get("method")
        params = msg.get("params") or {}
        handler = getattr(self, f"do_{method}", None)
        if handler is None:
            return {"id": mid, "error": {"kind": "usage",
                                         "message": f"unknown method {method!r}"}}
        try:
            result = handler(params)
            if asyncio.iscoroutine(result):
                result = await result
            return {"id": mid, "result": result}
        except PrologError as e:
            bound = self._get(params) if "session" in params else None
            rendered = (
                render_term(e.ball, WriteOptions(quoted=True),
                            bound.session.operators if bound else None)
            )
            return {"id": mid, "error": {"kind": "prolog", "message": rendered}}
        except (KeyError, ValueError, TypeError) as e:
            return {"id": mid, "error": {"kind": "usage", "message": str(e)}}

    def _get(self, params) -> _BoundSession:
        sid = params["session"]
        if sid not in self.sessions:
            raise KeyError(f"no session {sid}")
        return self.sessions[sid]

    @staticmethod
    def _attach(session: Session):
        loop = asyncio.get_running_loop()
        sched = session.scheduler
        if not (isinstance(sched, AsyncioScheduler) and sched.loop is loop):
            session.scheduler = AsyncioScheduler(loop)
            if getattr(session.bridge, "scheduler", None) is not None:
                session.bridge.scheduler = session.scheduler

    # -- session lifecycle ----------------------------------------------------

    def do_create_session(self, params) -> dict:
        self._next += 1
        sid = self._next
        session = Session(
            max_inferences=int(params.get("max_inferences", 100_000)),
            seed=params.get("seed"),
            document=VirtualDocument(params.get("markup") or None),
            stdout=_StdoutLog(),
        )
        self._attach(session)
        self.sessions[sid] = _BoundSession(session)
        return {"session": sid, "protocol": PROTOCOL_VERSION}

    def do_release_session(self, params) -> dict:
        self.sessions.pop(params["session"], None)
        return {}

    def do_set_flag(self, params) -> dict:
        bound = self._get(params)
        bound.session.set_flag(params["flag"], params["value"])
        return {}

    def do_set_options(self, params) -> dict:
        bound = self._get(params)
        bound.options = WriteOptions(
            quoted=bool(params.get("quoted", False)),
            ignore_ops=bool(params.get("ignore_ops", False)),
            numbervars=bool(params.get("numbervars", True)),
            max_depth=int(params.get("max_depth", 0)),
        )
        return {}

    def do_set_limit(self, params) -> dict:
        bound = self._get(params)
        limit = int(params["limit"])
        if limit <= 0:
            raise ValueError("limit must be positive")
        bound.session.max_inferences = limit
        return {}

    # -- program loading and querying -----------------------------------------

    async def do_consult(self, params) -> dict:
        bound = self._get(params)
        self._attach(bound.session)
        src = params["source"]
        kind = src.get("type", "text")
        value = src["value"]
        source = {
            "text": Text, "path": Path, "url": Url, "script": ScriptRegion,
        }[kind](value)
        fut = asyncio.get_running_loop().create_future()
        bound.session.consult(source, lambda err: fut.set_result(err))
        err = await fut
        if err is not None:
            raise PrologError(err)
        return {}

    async def do_query(self, params) -> dict:
        bound = self._get(params)
        self._attach(bound.session)
        fut = asyncio.get_running_loop().create_future()
        bound.session.query(params["goal"], lambda err: fut.set_result(err))
        err = await fut
        if err is not None:
            raise PrologError(err)
        return {}

    async def do_answer(self, params) -> dict:
        bound = self._get(params)
        self._attach(bound.session)
        fut = asyncio.get_running_loop().create_future()
        bound.session.answer(lambda ans: fut.set_result(ans))
        ans = await fut
        return {"answer": _serialize_answer(bound.session, ans, bound.options)}

    def do_record_tree(self, params) -> dict:
        import json

        bound = self._get(params)
        self._attach(bound.session)
        # record_tree pumps the scheduler itself only for SimpleScheduler;
        # under asyncio we drive the same loop through answer futures.
        return self._record_tree_async(bound, int(params.get("max_answers", 10)))

    async def _record_tree_async(self, bound, cap) -> dict:
        import json

        from .tree import DerivationTree, _Recorder

        th = bound.session.thread
        tree = DerivationTree(
            goal_text=th.goal_text or "", answer_cap=cap,
            var_names=list(th.query_vars), session=bound.session,
        )
        rec = _Recorder(tree)
        th.observer = rec
        for cp in th.points:
            rec.on_push(cp)
        try:
            while True:
                fut = asyncio.get_running_loop().create_future()
                th.answer(lambda a: fut.set_result(a))
                ans = await fut
                tree.answers.append(ans)
                if ans.kind != "success":
                    break
                if sum(a.is_success for a in tree.answers) >= cap:
                    break
        finally:
            th.observer = None
        return {
            "tree": json.loads(export_tree(tree, "json")),
            "answers": [
                _serialize_answer(bound.session, a, bound.options)
                for a in tree.answers
            ],
        }

    # -- document mirror --------------------------------------------------------

    def do_set_document(self, params) -> dict:
        bound = self._get(params)
        doc = VirtualDocument(params.get("markup") or None)
        bound.session.document = doc
        bound.session._dom_subscriptions = []
        return {}

    def do_get_document(self, params) -> dict:
        bound = self._get(params)
        doc = bound.session.document
        subs = getattr(bound.session, "_dom_subscriptions", [])
        canvases = {}
        for node in doc.iter_nodes():
            ctx = node._members.get("context2d")
            if ctx is not None and ctx.ops:
                key = node.attrs.get("id") or f"canvas-{id(node)}"
                canvases[key] = [list(op) for op in ctx.ops]
        log = bound.session.stdout
        return {
            "html": doc.body.inner_html(),
            "events": sorted({s.event_type for s in subs}),
            "canvas": canvases,
            "output": log.drain() if isinstance(log, _StdoutLog) else "",
        }

    async def do_dispatch_event(self, params) -> dict:
        bound = self._get(params)
        self._attach(bound.session)
        doc = bound.session.document
        props = dict(params.get("properties") or {})
        doc.dispatch(params["target"], params["type"], props)
        # listener goals were queued on the loop; let them run to completion
        for _ in range(4):
            await asyncio.sleep(0)
        return {}


class _StdoutLog:
    """Captures write/1 output per session so the boundary can ship it."""

    def __init__(self):
        self.chunks: list[str] = []

    def __call__(self, text):
        self.chunks.append(text)

    def drain(self) -> str:
        out = "".join(self.chunks)
        self.chunks.clear()
        return out
