"""Shared helpers: session drivers and random term generators."""

from __future__ import annotations

import random

import pytest

from sibylog import Session, create_session
from sibylog._core import Atom, Compound, Num, Var


def answers(session, goal, max_answers=None):
    """All answers for a goal, driving the scheduler synchronously."""
    return session.solve(goal, max_answers)


def answer_texts(session, goal, max_answers=None):
    return [session.format_answer(a) for a in session.solve(goal, max_answers)]


def success_texts(session, goal, max_answers=None):
    return [
        session.format_answer(a)
        for a in session.solve(goal, max_answers)
        if a.kind == "success"
    ]


@pytest.fixture
def session():
    return create_session()


@pytest.fixture
def lists_session():
    s = create_session()
    s.consult_text_sync(":- use_module(library(lists)).")
    return s


# ---------------------------------------------------------------------
# Random term generation (seeded, used by the property suites)
# ---------------------------------------------------------------------

ATOMS = ["a", "b", "c", "foo", "bar", "hello world", "[]", "+", "-", "*"]
FUNCTORS = ["f", "g", "h", "foo", "+", "-", "is", "."]
VARS = ["X", "Y", "Z", "W", "V0", "Long_name"]


def random_term(rng: random.Random, depth=4, vars_allowed=True):
    roll = rng.random()
    if depth <= 0 or roll < 0.25:
        kind = rng.randrange(4 if vars_allowed else 3)
        if kind == 0:
            return Atom(rng.choice(ATOMS))
        if kind == 1:
            return Num(rng.randint(-1000, 1000))
        if kind == 2:
            return Num(round(rng.uniform(-10, 10), 3), True)
        return Var(rng.choice(VARS))
    functor = rng.choice(FUNCTORS)
    arity = 2 if functor in ("+", "-", "is", ".") else rng.randint(1, 3)
    args = tuple(random_term(rng, depth - 1, vars_allowed) for _ in range(arity))
    return Compound(functor, args)


def random_ground_term(rng, depth=3):
    return random_term(rng, depth, vars_allowed=False)
