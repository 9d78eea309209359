"""Shipped predicate libraries: system (ISO core), lists, random, os."""

from .system import make_system_module
from .lists import make_lists_module
from .random_lib import make_random_module
from .os_lib import make_os_module

__all__ = [
    "make_system_module",
    "make_lists_module",
    "make_random_module",
    "make_os_module",
]
