"""The `dom` module: document predicates over an abstract DocumentHost.

Nodes travel through Prolog as opaque HostValues. Selector predicates
enumerate matches in document order on backtracking and fail silently when
nothing matches. Event subscriptions run their goal on a forked thread (one
answer only) whenever the host fires the event; dispatches are marshalled
onto the engine's executor in arrival order.
"""

from __future__ import annotations

from ._core import (
    Atom,
    Compound,
    HostValue,
    Var,
    apply_sub,
    is_atom,
    is_callable,
    replace_selected,
    struct_eq,
)
from .errors import BallError, instantiation, type_error
from .modules import Module


def _doc(thread):
    return thread.session.document


def _is_node(thread, v):
    doc = _doc(thread)
    checker = getattr(doc, "is_node", None)
    if checker is not None:
        return checker(v)
    from .vdom import VirtualNode

    return isinstance(v, VirtualNode)


def _node_arg(thread, t, ctx):
    if type(t) is Var:
        raise BallError(instantiation(ctx))
    if type(t) is not HostValue or not _is_node(thread, t.value):
        raise BallError(type_error("dom_object", t, ctx))
    return t.value


def _wrap(thread, node):
    return HostValue(node, thread.session.bridge)


def _atom_arg(t, ctx):
    if type(t) is Var:
        raise BallError(instantiation(ctx))
    if not is_atom(t):
        raise BallError(type_error("atom", t, ctx))
    return t.functor


def _push_choices(thread, point, pattern_var, values):
    states = [
        thread.child(
            point,
            replace_selected(point.goal, Compound("=", (pattern_var, v))),
        )
        for v in values
    ]
    thread.prepend(states)


# -- selectors ----------------------------------------------------------


def _selector(kind):
    def native(thread, point, atom):
        key_t, node_t = atom.args
        key = _atom_arg(key_t, f"get_by_{kind}/2")
        matches = _doc(thread).query_by(kind, key)
        if not matches:
            return  # fail silently
        _push_choices(thread, point, node_t, [_wrap(thread, n) for n in matches])

    return native


bi_get_by_id = _selector("id")
bi_get_by_class = _selector("class")
bi_get_by_tag = _selector("tag")


# -- traversal ----------------------------------------------------------


def bi_parent_of(thread, point, atom):
    child_t, parent_t = atom.args
    ctx = "parent_of/2"
    doc = _doc(thread)
    if type(child_t) is not Var:
        node = _node_arg(thread, child_t, ctx)
        parent = doc.parent_of(node)
        if parent is None:
            return
        thread.unify_push(point, parent_t, _wrap(thread, parent))
        return
    parent = _node_arg(thread, parent_t, ctx)
    kids = doc.children_of(parent)
    if not kids:
        return
    _push_choices(thread, point, child_t, [_wrap(thread, k) for k in kids])


def bi_sibling(thread, point, atom):
    a_t, b_t = atom.args
    ctx = "sibling/2"
    doc = _doc(thread)
    if type(a_t) is not Var:
        node = _node_arg(thread, a_t, ctx)
        out_t = b_t
    else:
        node = _node_arg(thread, b_t, ctx)
        out_t = a_t
    parent = doc.parent_of(node)
    if parent is None:
        return
    kids = doc.children_of(parent)
    i = kids.index(node)
    adjacent = []
    if i > 0:
        adjacent.append(kids[i - 1])
    if i + 1 < len(kids):
        adjacent.append(kids[i + 1])
    if not adjacent:
        return
    _push_choices(thread, point, out_t, [_wrap(thread, n) for n in adjacent])


# -- construction -------------------------------------------------------


def bi_create(thread, point, atom):
    tag_t, node_t = atom.args
    tag = _atom_arg(tag_t, "create/2")
    node = _doc(thread).create_element(tag)
    thread.unify_push(point, node_t, _wrap(thread, node))


def _inserter(position, anchor_first):
    def native(thread, point, atom):
        ctx = f"{'append_child' if position == 'append' else 'insert_' + position}/2"
        if anchor_first:
            anchor_t, new_t = atom.args
        else:
            new_t, anchor_t = atom.args
        anchor = _node_arg(thread, anchor_t, ctx)
        new = _node_arg(thread, new_t, ctx)
        if _doc(thread).insert(new, anchor, position):
            thread.success(point)

    return native


bi_append_child = _inserter("append", anchor_first=True)
bi_insert_before = _inserter("before", anchor_first=False)
bi_insert_after = _inserter("after", anchor_first=False)


# -- content, attributes, styles, classes --------------------------------


def bi_get_attr(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "get_attr/3")
    name = _atom_arg(atom.args[1], "get_attr/3")
    value = _doc(thread).get_attr(node, name)
    if value is None:
        return
    thread.unify_push(point, atom.args[2], thread.session.bridge.to_term(value))


def bi_set_attr(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "set_attr/3")
    name = _atom_arg(atom.args[1], "set_attr/3")
    value = thread.session.bridge.to_host(atom.args[2], "set_attr/3")
    _doc(thread).set_attr(node, name, value)
    thread.success(point)


def bi_get_style(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "get_style/3")
    name = _atom_arg(atom.args[1], "get_style/3")
    value = _doc(thread).get_style(node, name)
    if value is None:
        return
    thread.unify_push(point, atom.args[2], thread.session.bridge.to_term(value))


def bi_set_style(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "set_style/3")
    name = _atom_arg(atom.args[1], "set_style/3")
    value = thread.session.bridge.to_host(atom.args[2], "set_style/3")
    _doc(thread).set_style(node, name, value)
    thread.success(point)


def bi_get_html(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "get_html/2")
    thread.unify_push(point, atom.args[1], Atom(_doc(thread).get_html(node)))


def bi_set_html(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "set_html/2")
    markup = atom.args[1]
    if type(markup) is Var:
        raise BallError(instantiation("set_html/2"))
    text = markup.functor if is_atom(markup) else None
    if text is None:
        from .render import WriteOptions, render_term

        text = render_term(markup, WriteOptions(), thread.session.operators)
    _doc(thread).set_html(node, text)
    thread.success(point)


def bi_add_class(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "add_class/2")
    _doc(thread).add_class(node, _atom_arg(atom.args[1], "add_class/2"))
    thread.success(point)


def bi_remove_class(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "remove_class/2")
    _doc(thread).remove_class(node, _atom_arg(atom.args[1], "remove_class/2"))
    thread.success(point)


def bi_has_class(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "has_class/2")
    if _doc(thread).has_class(node, _atom_arg(atom.args[1], "has_class/2")):
        thread.success(point)


# -- visibility -----------------------------------------------------------


def bi_hide(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "hide/1")
    _doc(thread).set_visible(node, False)
    thread.success(point)


def bi_show(thread, point, atom):
    node = _node_arg(thread, atom.args[0], "show/1")
    _doc(thread).set_visible(node, True)
    thread.success(point)


def bi_toggle(thread, point, atom):
    doc = _doc(thread)
    node = _node_arg(thread, atom.args[0], "toggle/1")
    doc.set_visible(node, not doc.is_visible(node))
    thread.success(point)


# -- events ---------------------------------------------------------------


class _Subscription:
    __slots__ = ("node", "event_type", "event_var", "goal", "token")

    def __init__(self, node, event_type, event_var, goal, token):
        self.node = node
        self.event_type = event_type
        self.event_var = event_var
        self.goal = goal
        self.token = token


def _subscriptions(session):
    subs = getattr(session, "_dom_subscriptions", None)
    if subs is None:
        subs = []
        session._dom_subscriptions = subs
    return subs


def bi_bind(thread, point, atom):
    node_t, type_t, event_t, goal_t = atom.args
    node = _node_arg(thread, node_t, "bind/4")
    event_type = _atom_arg(type_t, "bind/4")
    if type(event_t) is not Var:
        raise BallError(type_error("variable", event_t, "bind/4"))
    if type(goal_t) is Var:
        raise BallError(instantiation("bind/4"))
    if not is_callable(goal_t):
        raise BallError(type_error("callable", goal_t, "bind/4"))
    session = thread.session
    event_var_name = event_t.name
    goal = goal_t

    def on_event(event):
        # Marshal onto the engine executor; the goal runs on a forked
        # thread (shared knowledge base) for its first answer only.
        def run():
            forked = session.fork_thread()
            bound = apply_sub(
                goal, {event_var_name: HostValue(event, session.bridge)}
            )
            forked.query_term(bound, [])

            def done(ans):
                if ans.kind == "error":
                    session.stdout(
                        "Warning: event goal raised: "
                        + session.format_answer(ans) + "\n"
                    )

            forked.answer(done)

        session.scheduler.call_soon(run)

    token = _doc(thread).add_listener(node, event_type, on_event)
    _subscriptions(session).append(
        _Subscription(node, event_type, event_t, goal, token)
    )
    thread.success(point)


def bi_unbind(thread, point, atom):
    node = _node_arg(thread, atom.args[0], f"unbind/{len(atom.args)}")
    event_type = _atom_arg(atom.args[1], f"unbind/{len(atom.args)}")
    goal = atom.args[2] if len(atom.args) == 3 else None
    session = thread.session
    doc = _doc(thread)
    keep = []
    for sub in _subscriptions(session):
        matches = sub.node is node and sub.event_type == event_type
        if matches and goal is not None:
            matches = struct_eq(sub.goal, goal)
        if matches:
            doc.remove_listener(sub.node, sub.token)
        else:
            keep.append(sub)
    session._dom_subscriptions = keep
    thread.success(point)


def bi_event_property(thread, point, atom):
    event_t, name_t, value_t = atom.args
    if type(event_t) is Var:
        return  # outside an event goal the placeholder holds nothing
    if type(event_t) is not HostValue:
        raise BallError(type_error("dom_event", event_t, "event_property/3"))
    name = _atom_arg(name_t, "event_property/3")
    value = _doc(thread).event_property(event_t.value, name)
    if value is None:
        return
    thread.unify_push(point, value_t, thread.session.bridge.to_term(value))


def bi_prevent_default(thread, point, atom):
    event_t = atom.args[0]
    if type(event_t) is Var:
        return
    if type(event_t) is not HostValue:
        raise BallError(type_error("dom_event", event_t, "prevent_default/1"))
    _doc(thread).prevent_default(event_t.value)
    thread.success(point)


def make_dom_module() -> Module:
    preds = {
        "get_by_id/2": bi_get_by_id,
        "get_by_class/2": bi_get_by_class,
        "get_by_tag/2": bi_get_by_tag,
        "parent_of/2": bi_parent_of,
        "sibling/2": bi_sibling,
        "create/2": bi_create,
        "append_child/2": bi_append_child,
        "insert_before/2": bi_insert_before,
        "insert_after/2": bi_insert_after,
        "get_attr/3": bi_get_attr,
        "set_attr/3": bi_set_attr,
        "get_style/3": bi_get_style,
        "set_style/3": bi_set_style,
        "get_html/2": bi_get_html,
        "set_html/2": bi_set_html,
        "add_class/2": bi_add_class,
        "remove_class/2": bi_remove_class,
        "has_class/2": bi_has_class,
        "hide/1": bi_hide,
        "show/1": bi_show,
        "toggle/1": bi_toggle,
        "bind/4": bi_bind,
        "unbind/2": bi_unbind,
        "unbind/3": bi_unbind,
        "event_property/3": bi_event_property,
        "prevent_default/1": bi_prevent_default,
    }
    return Module("dom", preds, visible=list(preds))
