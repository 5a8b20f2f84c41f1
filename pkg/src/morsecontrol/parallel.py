"""Deterministic helpers for spreading pure computations over threads.

Every item is computed by an identical, self-contained call, so results do
not depend on the worker count; only wall time does. numpy releases the GIL
inside the heavy kernels, which is where the speedup comes from.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV_VAR = "MORSECONTROL_WORKERS"


def resolve_workers(requested: int | None) -> int:
    """Worker count, with the environment variable taking precedence."""
    env = os.environ.get(WORKERS_ENV_VAR)
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV_VAR} must be an integer, got {env!r}")
        if value < 1:
            raise ValueError(f"{WORKERS_ENV_VAR} must be >= 1, got {value}")
        return value
    if requested is None:
        return 1
    if requested < 1:
        raise ValueError(f"worker count must be >= 1, got {requested}")
    return requested


def ordered_map(fn: Callable[[T], R], items: Sequence[T] | Iterable[T], workers: int = 1) -> list[R]:
    """Map ``fn`` over ``items`` preserving order; bit-identical for any worker count."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
