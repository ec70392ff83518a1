"""Opt-in counters for transfer-function evaluations.

    with count_evaluations() as counts:
        straika(...)
    assert counts["derivative"] == 0

Counting is scoped with a context variable, so concurrent threads that did
not enter the context are not affected.
"""

from collections import Counter
from contextlib import contextmanager
from contextvars import ContextVar

_active = ContextVar("strmor_eval_counts", default=None)


def record(event, n=1):
    counts = _active.get()
    if counts is not None:
        counts[event] += n


@contextmanager
def count_evaluations():
    counts = Counter()
    token = _active.set(counts)
    try:
        yield counts
    finally:
        _active.reset(token)
