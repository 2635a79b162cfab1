"""Ordered parallel mapping over records.

Stages fan out per-record work across threads (backend calls block on I/O)
but always assemble results in input order, independent of completion order,
and capture per-record failures instead of aborting the batch.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

__all__ = ["run_ordered"]


def run_ordered(
    items: Iterable[T],
    fn: Callable[[T], R],
    parallelism: int = 1,
) -> list[tuple[T, R | None, Exception | None]]:
    """Apply fn to each item, returning (item, result, error) in input order."""
    items = list(items)
    if parallelism <= 1 or len(items) <= 1:
        out: list[tuple[T, R | None, Exception | None]] = []
        for item in items:
            try:
                out.append((item, fn(item), None))
            except Exception as exc:  # noqa: BLE001 - per-record isolation
                out.append((item, None, exc))
        return out
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [(item, pool.submit(fn, item)) for item in items]
        out = []
        for item, fut in futures:
            try:
                out.append((item, fut.result(), None))
            except Exception as exc:  # noqa: BLE001
                out.append((item, None, exc))
        return out
