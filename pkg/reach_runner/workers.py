"""
--jobs 并行: 有序 map, jobs <= 1 时直接串行执行。
"""

from __future__ import annotations

from multiprocessing import Pool
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    todo: Sequence[T] = list(items)
    if jobs <= 1 or len(todo) <= 1:
        return [fn(x) for x in todo]
    with Pool(processes=min(jobs, len(todo))) as pool:
        return pool.map(fn, todo)


def first_success(
    fn: Callable[[T], Optional[R]],
    items: Iterable[T],
    jobs: int = 1,
) -> Optional[R]:
    """First non-None result in item order; evaluates `jobs` items per batch."""
    todo = list(items)
    step = max(1, jobs)
    for k in range(0, len(todo), step):
        for result in parallel_map(fn, todo[k:k + step], jobs):
            if result is not None:
                return result
    return None
