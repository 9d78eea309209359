"""Interactive REPL and batch command line.

Batch mode (`--goal`) prints each answer on its own line and exits 0 on
success or failure, 1 on an uncaught Prolog error, 2 on usage or syntax
errors. The REPL reads `goal.` lines, prints the first answer, and offers
more on `;` (a line of `;;;` asks for that many). Asynchronous builtins keep
the scheduler pumping while the prompt waits, so sleeps never wedge queued
host tasks.
"""

from __future__ import annotations

import argparse
import sys

from .engine import Session, SimpleScheduler
from .errors import Halt
from .fs import RealFS, VirtualFS
from .render import WriteOptions
from .tree import export_tree, record_tree

USAGE_EXIT = 2
ERROR_EXIT = 1


def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sibylog",
        description="Embeddable Prolog interpreter with a non-blocking engine.",
    )
    p.add_argument("--consult", action="append", default=[], metavar="FILE",
                   help="consult a program file before the goal/REPL (repeatable)")
    p.add_argument("--goal", metavar="TEXT", help="run one goal in batch mode")
    p.add_argument("--answers", type=int, default=None, metavar="N",
                   help="stop after N answers in batch mode (default: all)")
    p.add_argument("--limit", type=int, default=100_000, metavar="N",
                   help="inference budget per answer request")
    p.add_argument("--seed", type=int, default=None, metavar="N",
                   help="seed the random library's generator")
    p.add_argument("--tree", metavar="OUT", default=None,
                   help="record a derivation tree for --goal into OUT (.json or .dot)")
    p.add_argument("--tree-answers", type=int, default=10, metavar="N",
                   help="answer cap while recording the tree (default 10)")
    p.add_argument("--quoted", action="store_true",
                   help="print answers with quoted atoms")
    p.add_argument("--vfs", metavar="FIXTURE", default=None,
                   help="use a virtual file system loaded from a JSON fixture")
    return p


def make_session(args) -> Session:
    fs = VirtualFS.from_fixture(args.vfs) if args.vfs else RealFS()
    session = Session(max_inferences=args.limit, fs=fs, seed=args.seed)
    return session


def _pump_until(session, box):
    session.scheduler.run_until(lambda: box, max_seconds=3600.0)


def _consult_all(session, files, out) -> int:
    for path in files:
        box = []
        session.consult(path, on_done=box.append)
        _pump_until(session, box)
        err = box[0]
        if err is not None:
            text = session.format_answer(_err_answer(session, err))
            out(f"consult {path}: {text}\n")
            return USAGE_EXIT if _is_syntax(err) else ERROR_EXIT
    return 0


def _err_answer(session, ball):
    from .engine import Answer

    return Answer("error", var_names=[], ball=ball)


def _is_syntax(ball) -> bool:
    from ._core import Compound

    return (
        type(ball) is Compound
        and ball.indicator == "error/2"
        and type(ball.args[0]) is Compound
        and ball.args[0].indicator == "syntax_error/1"
    )


def run_batch(session, args, out) -> int:
    options = WriteOptions(quoted=args.quoted)
    box = []
    session.query(args.goal, on_done=box.append)
    _pump_until(session, box)
    if box[0] is not None:
        out(session.format_answer(_err_answer(session, box[0]), options) + "\n")
        return USAGE_EXIT
    if args.tree:
        tree = record_tree(session, args.tree_answers)
        fmt = "dot" if args.tree.endswith(".dot") else "json"
        text = export_tree(tree, fmt, options)
        with open(args.tree, "w", encoding="utf-8") as fh:
            fh.write(text)
        for ans in tree.answers:
            out(session.format_answer(ans, options) + "\n")
        return ERROR_EXIT if any(a.kind == "error" for a in tree.answers) else 0
    wanted = args.answers
    shown = 0
    status = 0
    while True:
        abox = []
        session.answer(abox.append)
        _pump_until(session, abox)
        ans = abox[0]
        out(session.format_answer(ans, options) + "\n")
        if ans.kind == "error":
            status = ERROR_EXIT
            break
        if ans.kind != "success":
            break
        shown += 1
        if wanted is not None and shown >= wanted:
            break
    return status


def run_repl(session, args, out, input_fn=input) -> int:
    options = WriteOptions(quoted=args.quoted)
    out("sibylog interactive interpreter. Type a goal ending in '.', "
        "';' for more answers, halt. to leave.\n")
    while True:
        try:
            line = input_fn("?- ")
        except EOFError:
            out("\n")
            return 0
        except KeyboardInterrupt:
            out("\n")
            continue
        text = line.strip()
        while text and not text.endswith("."):
            try:
                text += "\n" + input_fn("|  ")
                text = text.strip()
            except EOFError:
                break
        if not text:
            continue
        try:
            code = _repl_goal(session, text, options, out, input_fn)
        except Halt as h:
            return h.code
        if code is not None:
            return code


def _repl_goal(session, text, options, out, input_fn):
    box = []
    session.query(text, on_done=box.append)
    _pump_until(session, box)
    if box[0] is not None:
        out(session.format_answer(_err_answer(session, box[0]), options) + "\n")
        return None
    pending = 1
    while pending:
        pending -= 1
        abox = []
        session.answer(abox.append)
        _pump_until(session, abox)
        ans = abox[0]
        out(session.format_answer(ans, options) + "\n")
        if ans.kind != "success":
            return None
        if pending == 0:
            try:
                more = input_fn("")
            except EOFError:
                return 0
            pending = sum(1 for c in more if c == ";")
            if pending == 0:
                return None
    return None


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    out = sys.stdout.write
    try:
        session = make_session(args)
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"sibylog: {exc}\n")
        return USAGE_EXIT
    try:
        code = _consult_all(session, args.consult, out)
        if code:
            return code
        if args.goal:
            return run_batch(session, args, out)
        return run_repl(session, args, out)
    except Halt as h:
        return h.code


if __name__ == "__main__":
    sys.exit(main())
