"""Derivation-tree recording and export.

record_tree drives a freshly queried goal, capturing every pushed choice
point as a node linked to its parent, until the answer cap, stack
exhaustion or the inference limit. Answer leaves render as the empty goal
(a box); substitutions are restricted to the original goal's variables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ._core import restrict_sub
from .render import WriteOptions, format_bindings, render_term

EMPTY_GOAL = "□"  # white square


@dataclass
class TreeNode:
    id: int
    parent: int | None
    cp: object
    kind: str  # interior | answer | error | cut-pruned


@dataclass
class DerivationTree:
    goal_text: str
    answer_cap: int
    var_names: list
    nodes: list = field(default_factory=list)
    answers: list = field(default_factory=list)
    session: object = None

    def answer_leaves(self):
        return [n for n in self.nodes if n.kind == "answer"]

    def leaf_substitutions(self):
        keep = set(self.var_names)
        return [restrict_sub(n.cp.sub, keep) for n in self.answer_leaves()]


class _Recorder:
    def __init__(self, tree):
        self.tree = tree
        self.by_pid = {}

    def _add(self, cp, kind):
        parent = self.by_pid.get(cp.parent.pid) if cp.parent is not None else None
        node = TreeNode(len(self.tree.nodes), parent, cp, kind)
        self.by_pid[cp.pid] = node.id
        self.tree.nodes.append(node)

    def on_root(self, cp):
        self.on_push(cp)

    def on_push(self, cp):
        if cp.ball is not None:
            kind = "error"
        elif cp.goal is None:
            kind = "answer"
        else:
            kind = "interior"
        self._add(cp, kind)

    def on_answer(self, cp):
        pass  # answers were classified at push time

    def on_prune(self, cps):
        for cp in cps:
            node_id = self.by_pid.get(cp.pid)
            if node_id is not None:
                self.tree.nodes[node_id].kind = "cut-pruned"


def record_tree(session, max_answers, thread=None) -> DerivationTree:
    """Drive the queried goal to at most max_answers answers, recording the
    tree. Must be called after query(); the thread ends up exhausted (or
    stopped at the cap)."""
    if max_answers <= 0:
        raise ValueError("max_answers must be positive")
    th = thread or session.thread
    tree = DerivationTree(
        goal_text=th.goal_text or "", answer_cap=max_answers,
        var_names=list(th.query_vars), session=session,
    )
    rec = _Recorder(tree)
    th.observer = rec
    for cp in th.points:  # the root was pushed by query() before we attached
        rec.on_push(cp)
    try:
        while True:
            box = []
            th.answer(box.append)
            session.scheduler.run_until(lambda: box)
            ans = box[0]
            tree.answers.append(ans)
            if ans.kind != "success":
                break
            if sum(a.is_success for a in tree.answers) >= max_answers:
                break
    finally:
        th.observer = None
    return tree


# ---------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------

TREE_JSON_VERSION = 1

TREE_JSON_SCHEMA = {
    "type": "object",
    "required": ["version", "goal_text", "nodes", "answer_cap"],
    "properties": {
        "version": {"type": "integer"},
        "goal_text": {"type": "string"},
        "answer_cap": {"type": "integer", "minimum": 1},
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "parent", "goal", "subst", "kind"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "parent": {"type": ["integer", "null"]},
                    "goal": {"type": "string"},
                    "subst": {"type": "string"},
                    "kind": {
                        "enum": ["interior", "answer", "error", "cut-pruned"]
                    },
                },
            },
        },
    },
}

_DOT_COLORS = {
    "interior": "white",
    "answer": "palegreen",
    "error": "lightcoral",
    "cut-pruned": "lightgray",
}


def _node_payload(tree, node, options, table):
    cp = node.cp
    if cp.ball is not None:
        goal_text = render_term(cp.ball, options, table)
    elif cp.goal is None:
        goal_text = EMPTY_GOAL
    else:
        goal_text = render_term(cp.goal, options, table)
    keep = set(tree.var_names)
    subst_text = format_bindings(
        tree.var_names, restrict_sub(cp.sub, keep), options, table
    )
    return goal_text, subst_text


def export_tree(tree: DerivationTree, fmt: str = "json", options=None) -> str:
    options = options or WriteOptions(quoted=True)
    table = tree.session.operators if tree.session is not None else None
    if fmt == "json":
        nodes = []
        for n in tree.nodes:
            goal_text, subst_text = _node_payload(tree, n, options, table)
            nodes.append(
                {
                    "id": n.id,
                    "parent": n.parent,
                    "goal": goal_text,
                    "subst": subst_text,
                    "kind": n.kind,
                }
            )
        return json.dumps(
            {
                "version": TREE_JSON_VERSION,
                "goal_text": tree.goal_text,
                "answer_cap": tree.answer_cap,
                "nodes": nodes,
            },
            indent=2,
        )
    if fmt == "dot":
        lines = ["digraph derivation {", "  node [shape=box, style=filled];"]
        for n in tree.nodes:
            goal_text, subst_text = _node_payload(tree, n, options, table)
            label = goal_text if not subst_text else f"{goal_text}\\n{subst_text}"
            label = label.replace('"', '\\"')
            lines.append(
                f'  n{n.id} [label="{label}", fillcolor={_DOT_COLORS[n.kind]}];'
            )
        for n in tree.nodes:
            if n.parent is not None:
                lines.append(f"  n{n.parent} -> n{n.id};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unsupported tree format: {fmt}")
