"""Foreign function interface between Prolog and the embedding host.

A HostBridge resolves the global scope, property reads, member invocation
and value conversion. The conversion table is fixed: host numbers <-> Num,
booleans <-> true/false, strings <-> atoms, arrays <-> proper lists,
null/undefined <-> the atom `undefined`; anything else crosses the boundary
as an opaque HostValue whose identity is stable for the session.

FakeHost is a scriptable in-memory implementation used by the test suite
and the default for headless sessions; a real embedding (the browser
sandbox) implements the same contract against live objects.
"""

from __future__ import annotations

from ._core import (
    Atom,
    Compound,
    HostValue,
    Num,
    Var,
    is_atom,
    is_proper_list,
    list_parts,
    make_list,
)
from .errors import (
    BallError,
    existence_error,
    instantiation,
    system_error,
    type_error,
)
from .modules import Module

_MISSING = object()


class HostDeferred:
    """Eventual host value; natives that receive one suspend the thread."""

    def __init__(self):
        self._state = "pending"
        self._value = None
        self._waiters = []

    def settle(self, on_value, on_error):
        if self._state == "pending":
            self._waiters.append((on_value, on_error))
        elif self._state == "ok":
            on_value(self._value)
        else:
            on_error(self._value)

    def resolve(self, value):
        if self._state != "pending":
            return
        self._state = "ok"
        self._value = value
        for ok, _ in self._waiters:
            ok(value)
        self._waiters.clear()

    def reject(self, reason):
        if self._state != "pending":
            return
        self._state = "error"
        self._value = reason
        for _, err in self._waiters:
            err(reason)
        self._waiters.clear()


class HostError(Exception):
    """Raised by host members; surfaces to Prolog as system_error."""


class FakeHost:
    """In-memory host: a global scope of plain Python values.

    Records are dicts, arrays are lists, functions are callables. Arrays,
    strings and numbers carry a small set of built-in members mirroring
    what the FFI examples rely on (concat, slice, join, ...). Configure via
    the constructor or from_config (a JSON object graph where the marker
    {"$function": name} splices in a scripted callable).
    """

    def __init__(self, global_scope=None, urls=None, scheduler=None):
        self.global_scope = global_scope if global_scope is not None else {}
        self.urls = dict(urls) if urls else {}
        self.scheduler = scheduler
        self._retained: dict[int, object] = {}

    @classmethod
    def from_config(cls, config, functions=None):
        functions = functions or {}

        def build(node):
            if isinstance(node, dict):
                if set(node.keys()) == {"$function"}:
                    return functions[node["$function"]]
                return {k: build(v) for k, v in node.items()}
            if isinstance(node, list):
                return [build(v) for v in node]
            return node

        return cls(
            global_scope=build(config.get("globals", {})),
            urls={k: str(v) for k, v in config.get("urls", {}).items()},
        )

    # -- HostBridge contract ------------------------------------------------

    def get_global(self):
        return self.global_scope

    def classify(self, value) -> str:
        if callable(value):
            return "function"
        if isinstance(value, dict):
            return "object"
        if isinstance(value, list):
            return "array"
        if isinstance(value, bool):
            return "boolean"
        if isinstance(value, (int, float)):
            return "number"
        if isinstance(value, str):
            return "string"
        if value is None:
            return "undefined"
        kind = getattr(value, "host_kind", None)
        return kind if kind is not None else "object"

    def has_property(self, value, name) -> bool:
        return self._member(value, name) is not _MISSING

    def get_property(self, value, name):
        got = self._member(value, name)
        return None if got is _MISSING else got

    def invoke(self, context, member, args):
        """Call member (a name or a host function) in `context`."""
        if callable(member):
            fn = member
        else:
            fn = self._member(context, member)
            if fn is _MISSING or not callable(fn):
                raise LookupError(member)
        return fn(*args)

    def make_record(self):
        return {}

    def make_array(self, items):
        return list(items)

    def set_property(self, record, name, value):
        record[name] = value

    def fetch(self, url):
        """Program source retrieval for consult-by-URL."""
        return self.urls.get(url)

    def retain(self, value):
        self._retained[id(value)] = value

    def release(self, value):
        self._retained.pop(id(value), None)

    def defer(self, compute, delay_ms=0):
        """Scripted async helper: resolve compute() after a delay."""
        d = HostDeferred()

        def run():
            try:
                d.resolve(compute())
            except Exception as exc:  # scripted rejection
                d.reject(str(exc))

        if self.scheduler is None:
            raise RuntimeError("FakeHost.defer needs a scheduler attached")
        self.scheduler.call_later(delay_ms, run)
        return d

    # -- member resolution ----------------------------------------------------

    def _member(self, ctx, name):
        host_member = getattr(ctx, "host_member", None)
        if host_member is not None:
            return host_member(name)
        if isinstance(ctx, dict):
            return ctx.get(name, _MISSING)
        if isinstance(ctx, list):
            return _ARRAY_MEMBERS.get(name, _missing_fn)(ctx)
        if isinstance(ctx, str):
            return _STRING_MEMBERS.get(name, _missing_fn)(ctx)
        if isinstance(ctx, (int, float)) and not isinstance(ctx, bool):
            return _NUMBER_MEMBERS.get(name, _missing_fn)(ctx)
        return _MISSING

    # -- conversion table -------------------------------------------------------

    def to_term(self, value):
        if isinstance(value, bool):
            return Atom("true") if value else Atom("false")
        if isinstance(value, (int, float)):
            return Num(value, isinstance(value, float))
        if isinstance(value, str):
            return Atom(value)
        if isinstance(value, list):
            return make_list([self.to_term(v) for v in value])
        if value is None:
            return Atom("undefined")
        wrapped = HostValue(value, self)
        self.retain(value)
        return wrapped

    def to_host(self, t, context="apply/4"):
        tt = type(t)
        if tt is Var:
            raise BallError(instantiation(context))
        if tt is Num:
            return t.value
        if tt is HostValue:
            return t.value
        if is_atom(t):
            name = t.functor
            if name == "true":
                return True
            if name == "false":
                return False
            if name == "undefined":
                return None
            if name == "[]":
                return []
            return name
        if is_proper_list(t):
            items, _ = list_parts(t)
            return [self.to_host(x, context) for x in items]
        raise BallError(type_error("host_value", t, context))


def _missing_fn(_ctx):
    return _MISSING


def _array_concat(ctx):
    def concat(*args):
        out = list(ctx)
        for a in args:
            out.extend(a) if isinstance(a, list) else out.append(a)
        return out

    return concat


_ARRAY_MEMBERS = {
    "concat": _array_concat,
    "slice": lambda ctx: lambda start=0, end=None: ctx[int(start): None if end is None else int(end)],
    "indexOf": lambda ctx: lambda x: ctx.index(x) if x in ctx else -1,
    "join": lambda ctx: lambda sep=",": sep.join(str(x) for x in ctx),
    "reverse": lambda ctx: lambda: list(reversed(ctx)),
    "length": lambda ctx: len(ctx),
}

_STRING_MEMBERS = {
    "concat": lambda ctx: lambda *args: ctx + "".join(str(a) for a in args),
    "toUpperCase": lambda ctx: lambda: ctx.upper(),
    "toLowerCase": lambda ctx: lambda: ctx.lower(),
    "charAt": lambda ctx: lambda i=0: ctx[int(i)] if 0 <= int(i) < len(ctx) else "",
    "split": lambda ctx: lambda sep=None: ctx.split(sep),
    "length": lambda ctx: len(ctx),
}

_NUMBER_MEMBERS = {
    "toFixed": lambda ctx: lambda digits=0: f"{ctx:.{int(digits)}f}",
}


# =====================================================================
# The `js` module predicates
# =====================================================================


def _resolve_context(bridge, t, context):
    if type(t) is HostValue:
        return t.value
    return bridge.to_host(t, context)


def bi_apply(thread, point, atom):
    bridge = thread.session.bridge
    if len(atom.args) == 4:
        ctx_t, method_t, args_t, value_t = atom.args
        context = "apply/4"
        ctx = _resolve_context(bridge, ctx_t, context)
    else:
        method_t, args_t, value_t = atom.args
        context = "apply/3"
        ctx = bridge.get_global()
    if type(method_t) is Var:
        raise BallError(instantiation(context))
    if type(method_t) is HostValue:
        member = method_t.value
        if not callable(member):
            raise BallError(existence_error("procedure", method_t, context))
    elif is_atom(method_t):
        member = method_t.functor
    else:
        raise BallError(type_error("atom", method_t, context))
    if not is_proper_list(args_t):
        raise BallError(
            instantiation(context) if type(args_t) is Var
            else type_error("list", args_t, context)
        )
    arg_terms, _ = list_parts(args_t)
    args = [bridge.to_host(a, context) for a in arg_terms]
    try:
        result = bridge.invoke(ctx, member, args)
    except LookupError:
        raise BallError(existence_error("procedure", method_t, context))
    except HostError as exc:
        raise BallError(system_error(str(exc), context))
    except BallError:
        raise
    except Exception as exc:
        raise BallError(system_error(f"{type(exc).__name__}: {exc}", context))
    if isinstance(result, HostDeferred):
        def on_value(value):
            thread.unify_push(point, value_t, bridge.to_term(value))
            thread.again()

        def on_error(reason):
            thread.throw_error(system_error(str(reason), context), point)
            thread.again()

        result.settle(on_value, on_error)
        return True
    thread.unify_push(point, value_t, bridge.to_term(result))


def bi_get_prop(thread, point, atom):
    bridge = thread.session.bridge
    if len(atom.args) == 3:
        ctx_t, prop_t, value_t = atom.args
        context = "get_prop/3"
        obj = _resolve_context(bridge, ctx_t, context)
    else:
        prop_t, value_t = atom.args
        context = "get_prop/2"
        obj = bridge.get_global()
    if type(prop_t) is Var:
        raise BallError(instantiation(context))
    if not is_atom(prop_t):
        raise BallError(type_error("atom", prop_t, context))
    name = prop_t.functor
    if not bridge.has_property(obj, name):
        return  # fail silently
    thread.unify_push(point, value_t, bridge.to_term(bridge.get_property(obj, name)))


def bi_global(thread, point, atom):
    bridge = thread.session.bridge
    thread.unify_push(point, atom.args[0], HostValue(bridge.get_global(), bridge))


def bi_host_release(thread, point, atom):
    h = atom.args[0]
    if type(h) is Var:
        raise BallError(instantiation("host_release/1"))
    if type(h) is HostValue:
        thread.session.bridge.release(h.value)
    thread.success(point)


# -- json_prolog/2 -----------------------------------------------------------


def _json_from_term(t, bridge, context):
    tt = type(t)
    if tt is Var:
        raise BallError(instantiation(context))
    if tt is Num:
        return t.value
    if tt is HostValue:
        return t.value
    if is_atom(t):
        name = t.functor
        if name == "true":
            return True
        if name == "false":
            return False
        if name == "undefined":
            return None
        if name == "{}":
            return bridge.make_record()
        if name == "[]":
            return bridge.make_array([])
        return name
    if t.indicator == "{}/1":
        record = bridge.make_record()
        ptr = t.args[0]
        pairs = []
        while type(ptr) is Compound and ptr.indicator == ",/2":
            pairs.append(ptr.args[0])
            ptr = ptr.args[1]
        pairs.append(ptr)
        for p in pairs:
            if type(p) is not Compound or p.indicator != ":/2" or not is_atom(p.args[0]):
                raise BallError(type_error("json_term", t, context))
            bridge.set_property(
                record, p.args[0].functor, _json_from_term(p.args[1], bridge, context)
            )
        return record
    if is_proper_list(t):
        items, _ = list_parts(t)
        return bridge.make_array([_json_from_term(x, bridge, context) for x in items])
    raise BallError(type_error("json_term", t, context))


def _term_from_json(value, bridge, context):
    if isinstance(value, bool):
        return Atom("true") if value else Atom("false")
    if isinstance(value, (int, float)):
        return Num(value, isinstance(value, float))
    if isinstance(value, str):
        return Atom(value)
    if value is None:
        return Atom("undefined")
    if isinstance(value, list):
        return make_list([_term_from_json(v, bridge, context) for v in value])
    if isinstance(value, dict):
        if not value:
            return Atom("{}")
        pairs = [
            Compound(":", (Atom(str(k)), _term_from_json(v, bridge, context)))
            for k, v in value.items()
        ]
        chain = pairs[-1]
        for p in reversed(pairs[:-1]):
            chain = Compound(",", (p, chain))
        return Compound("{}", (chain,))
    raise BallError(type_error("json_term", HostValue(value, bridge), context))


def bi_json_prolog(thread, point, atom):
    bridge = thread.session.bridge
    t, h = atom.args
    context = "json_prolog/2"
    if type(t) is Var and type(h) is Var:
        raise BallError(instantiation(context))
    if type(t) is not Var:
        value = _json_from_term(t, bridge, context)
        if isinstance(value, (dict, list)):
            bridge.retain(value)
            thread.unify_push(point, h, HostValue(value, bridge))
        else:
            thread.unify_push(point, h, bridge.to_term(value))
        return
    raw = h.value if type(h) is HostValue else bridge.to_host(h, context)
    thread.unify_push(point, t, _term_from_json(raw, bridge, context))


def make_js_module() -> Module:
    preds = {
        "apply/3": bi_apply,
        "apply/4": bi_apply,
        "get_prop/2": bi_get_prop,
        "get_prop/3": bi_get_prop,
        "global/1": bi_global,
        "json_prolog/2": bi_json_prolog,
        "host_release/1": bi_host_release,
    }
    return Module("js", preds, visible=list(preds))
