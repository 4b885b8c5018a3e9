"""Numerical tolerances, scalable as a group.

All modules read tolerances through :func:`current`, so a convergence study
can loosen or tighten everything at once::

    with scaled(10.0):
        ...
"""

from __future__ import annotations

import contextvars
import dataclasses
from contextlib import contextmanager


@dataclasses.dataclass(frozen=True)
class Tolerances:
    # isotropy / unitarity, absolute after column normalization
    isotropy: float = 1e-8
    # relative singular-value threshold for rank decisions
    rank: float = 1e-10
    # absolute singular-value threshold for deciding X∩Y directions
    intersection: float = 1e-7
    # |eigenvalue| < degenerate * max|eigenvalue| means DegenerateForm
    degenerate: float = 1e-8
    # largest principal angle allowed between first and last loop sample
    closure: float = 1e-6
    # distance of the total winding from an integer, in turns
    winding: float = 1e-6
    # smallest singular value of a Procrustes Gram matrix
    procrustes: float = 1e-8
    # smallest principal angle required between a chosen Z and X(t), Y(t)
    transversal_margin: float = 1e-2
    # LH verdict threshold per unit of total generator length
    lh: float = 1e-4

    def scaled(self, factor: float) -> "Tolerances":
        if not factor > 0:
            raise ValueError(f"tolerance scale must be positive, got {factor}")
        return Tolerances(**{f.name: getattr(self, f.name) * factor
                             for f in dataclasses.fields(self)})


DEFAULT = Tolerances()
_current: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "maslovkit_tolerances", default=DEFAULT)


def current() -> Tolerances:
    return _current.get()


@contextmanager
def scaled(factor: float):
    token = _current.set(DEFAULT.scaled(factor))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
