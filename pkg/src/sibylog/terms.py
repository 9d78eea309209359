"""Public term-level API: terms, substitutions, unification.

Thin veneer over the selected kernel. The engine works with raw binding
dicts internally; Substitution is the value embedders and answers see.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._core import (
    Atom,
    Compound,
    HostValue,
    Num,
    Term,
    Var,
    apply_sub,
    compare_terms,
    is_atom,
    is_callable,
    is_proper_list,
    list_parts,
    make_list,
    rename_term,
    struct_eq,
    term_vars,
    unify as _unify,
    unify_seqs,
)

__all__ = [
    "Term", "Var", "Num", "Compound", "HostValue", "Atom",
    "Substitution", "PredicateIndicator",
    "unify", "unify_seqs", "apply", "rename",
    "is_atom", "is_callable", "is_proper_list", "list_parts", "make_list",
    "struct_eq", "compare_terms", "term_vars",
]


@dataclass(frozen=True)
class PredicateIndicator:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be >= 0")

    def __str__(self):
        return f"{self.name}/{self.arity}"

    def to_term(self) -> Compound:
        return Compound("/", (Atom(self.name), Num(self.arity)))


class Substitution:
    """Idempotent map from variable names to terms."""

    __slots__ = ("bindings",)

    def __init__(self, bindings=None):
        self.bindings = dict(bindings) if bindings else {}

    def apply(self, t: Term) -> Term:
        return apply_sub(t, self.bindings)

    def lookup(self, name: str):
        return self.bindings.get(name)

    def restrict(self, names) -> "Substitution":
        keep = set(names)
        return Substitution({v: t for v, t in self.bindings.items() if v in keep})

    def items(self):
        return self.bindings.items()

    def __len__(self):
        return len(self.bindings)

    def __bool__(self):
        return bool(self.bindings)

    def __eq__(self, other):
        if not isinstance(other, Substitution):
            return NotImplemented
        if self.bindings.keys() != other.bindings.keys():
            return False
        return all(struct_eq(t, other.bindings[v]) for v, t in self.bindings.items())

    def __repr__(self):
        return f"Substitution({self.bindings!r})"


def unify(a: Term, b: Term, occurs_check: bool = False):
    """MGU of a and b as a Substitution, or None when there is no unifier."""
    s = _unify(a, b, occurs_check)
    return None if s is None else Substitution(s)


def apply(t: Term, s: Substitution) -> Term:
    return apply_sub(t, s.bindings if isinstance(s, Substitution) else s)


def rename(t: Term, counter, mapping=None) -> Term:
    """Fresh-variable copy of t; counter is a mutable [int] cell."""
    return rename_term(t, {} if mapping is None else mapping, counter)
