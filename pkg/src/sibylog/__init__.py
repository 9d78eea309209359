"""sibylog: an embeddable Prolog interpreter with a non-blocking engine.

Quick start (callback style, mirroring the embedding contract)::

    import sibylog

    session = sibylog.create_session()
    session.consult("append([],X,X).\\nappend([H|T],X,[H|S]) :- append(T,X,S).")
    session.query("append(X, Y, [a,b,c]).")
    session.answer(lambda a: print(session.format_answer(a)))
    session.run()

or with asyncio::

    await sibylog.consult_async(session, program)
    await sibylog.query_async(session, goal)
    async for answer in sibylog.answer_stream(session):
        print(session.format_answer(answer))
"""

import sys as _sys

# Recursive descent over user terms (rendering, conversion) can legitimately
# nest deeply; list spines are handled iteratively but other shapes are not.
if _sys.getrecursionlimit() < 100_000:
    _sys.setrecursionlimit(100_000)

from ._core import KERNEL_COMPILED
from .engine import (
    Answer,
    AsyncioScheduler,
    Path,
    ScriptRegion,
    Session,
    SimpleScheduler,
    Text,
    Thread,
    Url,
    answer_async,
    answer_stream,
    attach_asyncio,
    consult_async,
    create_session,
    query_async,
)
from .errors import Halt, LimitExceeded, PrologError, SibylogSyntaxError
from .fs import RealFS, VirtualFS
from .hostbridge import FakeHost, HostDeferred, HostError
from .render import WriteOptions, format_answer, render_term
from .terms import (
    Atom,
    Compound,
    HostValue,
    Num,
    PredicateIndicator,
    Substitution,
    Term,
    Var,
    unify,
)
from .tree import DerivationTree, export_tree, record_tree
from .vdom import VirtualDocument

__version__ = "0.1.0"

__all__ = [
    "Answer", "AsyncioScheduler", "Atom", "Compound", "DerivationTree",
    "FakeHost", "Halt", "HostDeferred", "HostError", "HostValue",
    "KERNEL_COMPILED", "LimitExceeded", "Num", "Path", "PredicateIndicator",
    "PrologError", "RealFS", "ScriptRegion", "Session", "SibylogSyntaxError",
    "SimpleScheduler", "Substitution", "Term", "Text", "Thread", "Url", "Var",
    "VirtualDocument", "VirtualFS", "WriteOptions", "answer_async",
    "answer_stream", "attach_asyncio", "consult_async", "create_session",
    "export_tree", "format_answer", "query_async", "record_tree",
    "render_term", "unify",
]
