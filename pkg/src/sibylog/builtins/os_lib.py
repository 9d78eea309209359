"""The `os` library: sleep/1 and file predicates over the session store.

sleep/1 is the canonical asynchronous native: it schedules the continuation
and returns the async marker, so the engine hands control back to the host
until the timer re-enters the resolution loop.

The file predicates work against session.fs, which is the in-memory virtual
store by default and the real file system in the CLI.
"""

from __future__ import annotations

from .._core import Atom, Compound, Num, Var, is_atom, make_list
from ..errors import (
    BallError,
    domain_error,
    existence_error,
    instantiation,
    permission_error,
    type_error,
)
from ..modules import Module


def bi_sleep(thread, point, atom):
    t = atom.args[0]
    if type(t) is Var:
        raise BallError(instantiation("sleep/1"))
    if type(t) is not Num or t.is_float:
        raise BallError(type_error("integer", t, "sleep/1"))

    def resume():
        thread.success(point)
        thread.again()

    thread.session.scheduler.call_later(t.value, resume)
    return True


# -- streams over the virtual/real file system ---------------------------


def _stream_term(n):
    return Compound("$stream", (Num(n),))


def _get_stream(thread, t, ctx):
    if type(t) is Var:
        raise BallError(instantiation(ctx))
    if not (type(t) is Compound and t.indicator == "$stream/1"
            and type(t.args[0]) is Num):
        raise BallError(domain_error("stream", t, ctx))
    stream = thread.session.streams.get(t.args[0].value)
    if stream is None:
        raise BallError(existence_error("stream", t, ctx))
    return stream


def bi_open(thread, point, atom):
    if len(atom.args) == 4:
        path_t, mode_t, stream_t, _opts = atom.args
    else:
        path_t, mode_t, stream_t = atom.args
    ctx = f"open/{len(atom.args)}"
    if type(path_t) is Var or type(mode_t) is Var:
        raise BallError(instantiation(ctx))
    if not is_atom(path_t):
        raise BallError(domain_error("source_sink", path_t, ctx))
    if not is_atom(mode_t):
        raise BallError(type_error("atom", mode_t, ctx))
    mode = mode_t.functor
    if mode not in ("read", "write", "append"):
        raise BallError(domain_error("io_mode", mode_t, ctx))
    if type(stream_t) is not Var:
        raise BallError(type_error("variable", stream_t, ctx))
    session = thread.session
    path = path_t.functor
    if mode == "read":
        try:
            text = session.fs.read(path)
        except FileNotFoundError:
            raise BallError(existence_error("source_sink", path_t, ctx))
        state = _ReadStream(session, path, text)
    else:
        state = _WriteStream(session, path, append=(mode == "append"))
    session.next_stream[0] += 1
    handle = session.next_stream[0]
    session.streams[handle] = state
    thread.unify_push(point, stream_t, _stream_term(handle))


class _ReadStream:
    mode = "read"

    def __init__(self, session, path, text):
        from ..engine import _SessionView
        from ..reader import Parser, tokenize

        self.path = path
        self.parser = Parser(tokenize(text), _SessionView(session),
                             session.fresh_names)

    def close(self, session):
        pass


class _WriteStream:
    mode = "write"

    def __init__(self, session, path, append):
        self.path = path
        self.append = append
        self.chunks = []

    def close(self, session):
        session.fs.write(self.path, "".join(self.chunks), append=self.append)


def bi_close(thread, point, atom):
    stream = _get_stream(thread, atom.args[0], "close/1")
    stream.close(thread.session)
    handle = atom.args[0].args[0].value
    del thread.session.streams[handle]
    thread.success(point)


def bi_read_term(thread, point, atom):
    stream_t, term_t, _opts = atom.args
    stream = _get_stream(thread, stream_t, "read_term/3")
    if stream.mode != "read":
        raise BallError(
            permission_error("input", "stream", stream_t, "read_term/3"))
    from ..errors import SibylogSyntaxError

    try:
        got = stream.parser.read_term()
    except SibylogSyntaxError as e:
        raise BallError(e.ball())
    if got is None:
        thread.unify_push(point, term_t, Atom("end_of_file"))
        return
    thread.unify_push(point, term_t, got[0])


def bi_write_stream(thread, point, atom):
    stream_t, term_t = atom.args
    stream = _get_stream(thread, stream_t, "write/2")
    if stream.mode != "write":
        raise BallError(permission_error("output", "stream", stream_t, "write/2"))
    from ..render import WriteOptions, render_term

    stream.chunks.append(
        render_term(term_t, WriteOptions(quoted=True), thread.session.operators))
    thread.success(point)


def bi_nl_stream(thread, point, atom):
    stream = _get_stream(thread, atom.args[0], "nl/1")
    if stream.mode != "write":
        raise BallError(permission_error("output", "stream", atom.args[0], "nl/1"))
    stream.chunks.append("\n")
    thread.success(point)


def bi_directory_files(thread, point, atom):
    path_t, files_t = atom.args
    if type(path_t) is Var:
        raise BallError(instantiation("directory_files/2"))
    if not is_atom(path_t):
        raise BallError(type_error("atom", path_t, "directory_files/2"))
    names = thread.session.fs.listdir(path_t.functor)
    thread.unify_push(point, files_t, make_list([Atom(n) for n in names]))


def bi_exists_file(thread, point, atom):
    path_t = atom.args[0]
    if type(path_t) is Var:
        raise BallError(instantiation("exists_file/1"))
    if not is_atom(path_t):
        raise BallError(type_error("atom", path_t, "exists_file/1"))
    if thread.session.fs.exists(path_t.functor):
        thread.success(point)


def make_os_module() -> Module:
    preds = {
        "sleep/1": bi_sleep,
        "open/3": bi_open,
        "open/4": bi_open,
        "close/1": bi_close,
        "read_term/3": bi_read_term,
        "write/2": bi_write_stream,
        "nl/1": bi_nl_stream,
        "directory_files/2": bi_directory_files,
        "exists_file/1": bi_exists_file,
    }
    return Module("os", preds, visible=list(preds))
