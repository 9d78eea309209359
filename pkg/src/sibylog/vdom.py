"""In-memory virtual document implementing the DocumentHost contract.

Headless stand-in for a live page: a tree of element nodes with attributes,
inline styles, class lists, text content and event listeners. Markup
fixtures load through a minimal HTML reader (tags, attributes, text - a
documented subset, no entities or script parsing beyond text capture).
"""

from __future__ import annotations

from html.parser import HTMLParser

_VOID_TAGS = {"br", "hr", "img", "input", "meta", "link"}


class VirtualNode:
    host_kind = "node"

    def __init__(self, tag, doc):
        self.tag = tag
        self.doc = doc
        self.attrs: dict[str, str] = {}
        self.styles: dict[str, str] = {}
        self.classes: list[str] = []
        self.children: list[VirtualNode] = []
        self.parent: VirtualNode | None = None
        self.text = ""  # own text content (before any element children)
        self.listeners: list[dict] = []
        self._members: dict[str, object] = {}

    # -- FFI surface (properties visible to get_prop/unification) ----------

    def host_member(self, name):
        from .hostbridge import _MISSING

        if name in self._members:
            return self._members[name]
        if name == "tagName":
            return self.tag.upper()
        if name == "id":
            return self.attrs.get("id", "")
        if name in self.attrs:
            return self.attrs[name]
        return _MISSING

    def add_member(self, name, value):
        self._members[name] = value

    # -- structure ----------------------------------------------------------

    @property
    def attached(self):
        node = self
        while node.parent is not None:
            node = node.parent
        return node is self.doc.root

    def inner_html(self) -> str:
        out = [_escape_text(self.text)]
        for c in self.children:
            out.append(c.outer_html())
        return "".join(out)

    def outer_html(self) -> str:
        attrs = []
        a = dict(self.attrs)
        if self.classes:
            a["class"] = " ".join(self.classes)
        if self.styles:
            a["style"] = ";".join(f"{k}:{v}" for k, v in self.styles.items())
        for k, v in a.items():
            attrs.append(f' {k}="{v}"')
        inner = self.inner_html()
        return f"<{self.tag}{''.join(attrs)}>{inner}</{self.tag}>"

    def __repr__(self):
        ident = self.attrs.get("id")
        return f"<node {self.tag}{'#' + ident if ident else ''}>"


def _escape_text(s):
    return s


class Canvas2D:
    """Recording 2D context: drawing calls append to an op log that a real
    embedding can replay onto an actual canvas."""

    host_kind = "object"
    _OPS = ("clearRect", "beginPath", "arc", "stroke", "fill", "moveTo",
            "lineTo", "rect", "closePath")

    def __init__(self):
        self.ops: list[list] = []

    def host_member(self, name):
        from .hostbridge import _MISSING

        if name in self._OPS:
            return lambda *args: self.ops.append([name, *args]) or None
        if name == "ops":
            return [list(op) for op in self.ops]
        return _MISSING


def _attach_canvas(node):
    ctx = Canvas2D()
    node.add_member("getContext", lambda _kind="2d": ctx)
    node.add_member("context2d", ctx)


class VirtualDocument:
    """DocumentHost over VirtualNodes; loadable from a markup fixture."""

    def __init__(self, markup: str | None = None):
        self.root = VirtualNode("html", self)
        self.body = VirtualNode("body", self)
        self.body.parent = self.root
        self.root.children.append(self.body)
        self.scripts: dict[str, str] = {}
        if markup:
            self.load_markup(markup)

    # -- fixture loading ------------------------------------------------------

    def load_markup(self, markup: str, into=None):
        parser = _MarkupReader(self, into or self.body)
        parser.feed(markup)
        parser.close()

    def script_text(self, element_id):
        """Text of a <script type="text/prolog" id=...> region."""
        if element_id in self.scripts:
            return self.scripts[element_id]
        node = self.first_by_id(element_id)
        return node.text if node is not None else None

    # -- DocumentHost contract -----------------------------------------------

    def create_element(self, tag) -> VirtualNode:
        node = VirtualNode(tag, self)
        if tag == "canvas":
            _attach_canvas(node)
        return node

    def iter_nodes(self, start=None):
        stack = [start or self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def query_by(self, kind, key):
        out = []
        for node in self.iter_nodes():
            if kind == "id" and node.attrs.get("id") == key:
                out.append(node)
            elif kind == "class" and key in node.classes:
                out.append(node)
            elif kind == "tag" and node.tag == key:
                out.append(node)
        return out

    def first_by_id(self, key):
        got = self.query_by("id", key)
        return got[0] if got else None

    def parent_of(self, node):
        return node.parent

    def children_of(self, node):
        return list(node.children)

    def insert(self, child, anchor, position) -> bool:
        """position: 'append' (anchor = parent), 'before' or 'after'
        (anchor = sibling). Fails without mutation if child is attached."""
        if child.attached or child is self.root:
            return False
        if position == "append":
            parent = anchor
            parent.children.append(child)
        else:
            parent = anchor.parent
            if parent is None:
                return False
            i = parent.children.index(anchor)
            parent.children.insert(i if position == "before" else i + 1, child)
        child.parent = parent
        return True

    def get_attr(self, node, name):
        return node.attrs.get(name)

    def set_attr(self, node, name, value):
        node.attrs[name] = value

    def get_style(self, node, name):
        return node.styles.get(name)

    def set_style(self, node, name, value):
        node.styles[name] = value

    def get_html(self, node):
        return node.inner_html()

    def set_html(self, node, markup):
        node.children.clear()
        node.text = ""
        self.load_markup(markup, into=node)

    def add_class(self, node, name):
        if name not in node.classes:
            node.classes.append(name)

    def remove_class(self, node, name):
        if name in node.classes:
            node.classes.remove(name)

    def has_class(self, node, name):
        return name in node.classes

    def set_visible(self, node, visible):
        if visible:
            node.styles.pop("display", None)
        else:
            node.styles["display"] = "none"

    def is_visible(self, node):
        return node.styles.get("display") != "none"

    def add_listener(self, node, event_type, callback):
        token = {"type": event_type, "callback": callback}
        node.listeners.append(token)
        return token

    def remove_listener(self, node, token):
        if token in node.listeners:
            node.listeners.remove(token)

    def event_property(self, event, name):
        return event.get(name) if isinstance(event, dict) else None

    def prevent_default(self, event):
        if isinstance(event, dict):
            event["defaultPrevented"] = True

    # -- event dispatch (tests and demos) --------------------------------------

    def dispatch(self, target, event_type, properties=None):
        """Fire an event at target (a node or an element id), bubbling to
        ancestors. Returns the event record."""
        if isinstance(target, str):
            node = self.first_by_id(target)
            if node is None:
                raise KeyError(f"no element with id {target}")
        else:
            node = target
        event = {"type": event_type, "target": node, "defaultPrevented": False}
        if properties:
            event.update(properties)
        holder = node
        while holder is not None:
            for token in list(holder.listeners):
                if token["type"] == event_type:
                    token["callback"](event)
            holder = holder.parent
        return event

    # -- invariants (structural audit used by the tests) ------------------------

    def audit(self):
        """Raise AssertionError if the tree is cyclic or parent-inconsistent."""
        seen = set()
        stack = [(self.root, None)]
        while stack:
            node, parent = stack.pop()
            assert id(node) not in seen, "cycle in document tree"
            seen.add(id(node))
            assert node.parent is parent or (node is self.root and parent is None), (
                "parent pointer inconsistent"
            )
            for c in node.children:
                stack.append((c, node))


class _MarkupReader(HTMLParser):
    def __init__(self, doc, mount):
        super().__init__(convert_charrefs=True)
        self.doc = doc
        self.stack = [mount]
        self._script_id = None

    def handle_starttag(self, tag, attrs):
        node = VirtualNode(tag, self.doc)
        if tag == "canvas":
            _attach_canvas(node)
        attr_map = dict(attrs)
        for k, v in attr_map.items():
            if k == "class" and v:
                node.classes = v.split()
            elif k == "style" and v:
                for piece in v.split(";"):
                    if ":" in piece:
                        sk, sv = piece.split(":", 1)
                        node.styles[sk.strip()] = sv.strip()
            else:
                node.attrs[k] = v or ""
        parent = self.stack[-1]
        node.parent = parent
        parent.children.append(node)
        if tag == "script" and attr_map.get("type") == "text/prolog":
            self._script_id = attr_map.get("id")
        if tag not in _VOID_TAGS:
            self.stack.append(node)

    def handle_endtag(self, tag):
        if len(self.stack) > 1 and self.stack[-1].tag == tag:
            node = self.stack.pop()
            if node.tag == "script" and self._script_id:
                self.doc.scripts[self._script_id] = node.text
                self._script_id = None

    def handle_data(self, data):
        node = self.stack[-1]
        if not node.children:
            node.text += data
