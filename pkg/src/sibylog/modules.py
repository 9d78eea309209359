"""Predicate modules and the clause store with first-argument indexing."""

from __future__ import annotations

from ._core import first_arg_key


class ClauseList:
    """Ordered clause store for one predicate indicator.

    Candidate lookup buckets clauses by the principal functor of the head's
    first argument; clauses with a variable first argument appear in every
    bucket so source order is preserved. The index is rebuilt lazily after
    any assert/retract.
    """

    __slots__ = ("clauses", "_index", "_var_bucket", "dynamic")

    def __init__(self, clauses=None, dynamic=False):
        self.clauses = list(clauses) if clauses else []
        self.dynamic = dynamic
        self._index = None
        self._var_bucket = None

    def add(self, clause, front=False):
        if front:
            self.clauses.insert(0, clause)
        else:
            self.clauses.append(clause)
        self._index = None

    def remove(self, clause) -> bool:
        try:
            self.clauses.remove(clause)
        except ValueError:
            return False
        self._index = None
        return True

    def candidates(self, atom):
        clauses = self.clauses
        if not atom.args or len(clauses) <= 1:
            return clauses
        key = first_arg_key(atom.args[0])
        if key is None:
            return clauses
        if self._index is None:
            self._build_index()
        return self._index.get(key, self._var_bucket)

    def _build_index(self):
        buckets: dict = {}
        var_bucket = []
        keys = []
        for c in self.clauses:
            k = first_arg_key(c.head.args[0]) if c.head.args else None
            keys.append(k)
            if k is not None and k not in buckets:
                buckets[k] = []
        for c, k in zip(self.clauses, keys):
            if k is None:
                var_bucket.append(c)
                for b in buckets.values():
                    b.append(c)
            else:
                buckets[k].append(c)
        self._index = buckets
        self._var_bucket = var_bucket

    def __len__(self):
        return len(self.clauses)


class Module:
    """A named predicate registry with an export list.

    predicates maps "name/arity" to either a ClauseList or a native
    procedure (a callable taking (thread, point, atom)). A single indicator
    never carries both.
    """

    __slots__ = ("name", "predicates", "visible")

    def __init__(self, name, predicates=None, visible=None):
        self.name = name
        self.predicates = dict(predicates) if predicates else {}
        self.visible = list(visible) if visible is not None else list(self.predicates)

    def exports(self):
        return set(self.visible)

    def __repr__(self):
        return f"Module({self.name!r}, {len(self.predicates)} predicates)"
