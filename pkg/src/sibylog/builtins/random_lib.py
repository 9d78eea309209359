"""The `random` library.

random/3 follows the reference semantics exactly: guard order is
instantiation of the bounds, then their types, then the output type; a
non-ascending range fails silently; the result is a float iff either bound
is a float, otherwise the uniform draw is floored to an integer. The source
is the session's seedable PRNG so runs are reproducible.
"""

from __future__ import annotations

import math

from .._core import Compound, Num, Var
from ..errors import BallError, instantiation, type_error
from ..modules import Module


def bi_random(thread, point, atom):
    lower, upper, rand = atom.args
    if type(lower) is Var or type(upper) is Var:
        raise BallError(instantiation("random/3"))
    if type(lower) is not Num:
        raise BallError(type_error("number", lower, "random/3"))
    if type(upper) is not Num:
        raise BallError(type_error("number", upper, "random/3"))
    if type(rand) is not Var and type(rand) is not Num:
        raise BallError(type_error("number", rand, "random/3"))
    if lower.value < upper.value:
        is_float = lower.is_float or upper.is_float
        gen = lower.value + thread.session.rng.random() * (upper.value - lower.value)
        if not is_float:
            gen = math.floor(gen)
        unif = Compound("=", (rand, Num(gen, is_float)))
        thread.replace(point, unif)


def bi_set_random_seed(thread, point, atom):
    seed = atom.args[0]
    if type(seed) is Var:
        raise BallError(instantiation("set_random_seed/1"))
    if type(seed) is not Num or seed.is_float:
        raise BallError(type_error("integer", seed, "set_random_seed/1"))
    thread.session.rng.seed(seed.value)
    thread.success(point)


def make_random_module() -> Module:
    preds = {
        "random/3": bi_random,
        "set_random_seed/1": bi_set_random_seed,
    }
    return Module("random", preds, visible=list(preds))
