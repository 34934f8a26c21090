"""The two-dimensional comb graph.

The comb is the spanning tree of the integer grid that keeps every vertical
edge but only the horizontal edges along the x-axis.  Sites on the x-axis
("backbone") have degree 4; all other sites ("teeth") have degree 2.  The
graph is infinite, so it is never materialized: everything is expressed
through the neighbor function below.

The neighbor enumeration order is frozen (and relied on by the random-walk
kernels for bit-reproducibility):

    backbone (y == 0):  index 0 -> (x+1, 0), 1 -> (x-1, 0),
                        index 2 -> (x, +1),  3 -> (x, -1)
    tooth    (y != 0):  index 0 -> (x, y+1), 1 -> (x, y-1)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Axis(enum.Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


@dataclass(frozen=True, slots=True)
class Site:
    """An integer lattice point (x, y) of the comb."""

    x: int
    y: int

    @property
    def on_backbone(self) -> bool:
        return self.y == 0


@dataclass(frozen=True, slots=True)
class StepKind:
    """Axis and direction (+1 or -1) of a single move."""

    axis: Axis
    direction: int


ORIGIN = Site(0, 0)


def degree(s: Site) -> int:
    """Number of comb edges incident to ``s``: 4 on the backbone, else 2."""
    return 4 if s.y == 0 else 2


def neighbors(s: Site) -> list[Site]:
    """Neighbors of ``s`` in the frozen enumeration order."""
    if s.y == 0:
        return [
            Site(s.x + 1, 0),
            Site(s.x - 1, 0),
            Site(s.x, 1),
            Site(s.x, -1),
        ]
    return [Site(s.x, s.y + 1), Site(s.x, s.y - 1)]


def step(s: Site, choice: int) -> tuple[Site, StepKind]:
    """Move from ``s`` to the neighbor at enumeration index ``choice``.

    ``choice`` must lie in [0, degree(s)); anything else is a programming
    error on the caller's side.
    """
    if s.y == 0:
        if choice == 0:
            return Site(s.x + 1, 0), StepKind(Axis.HORIZONTAL, 1)
        if choice == 1:
            return Site(s.x - 1, 0), StepKind(Axis.HORIZONTAL, -1)
        if choice == 2:
            return Site(s.x, 1), StepKind(Axis.VERTICAL, 1)
        if choice == 3:
            return Site(s.x, -1), StepKind(Axis.VERTICAL, -1)
    else:
        if choice == 0:
            return Site(s.x, s.y + 1), StepKind(Axis.VERTICAL, 1)
        if choice == 1:
            return Site(s.x, s.y - 1), StepKind(Axis.VERTICAL, -1)
    raise ValueError(f"choice {choice} out of range for site of degree {degree(s)}")
