"""Window motion paths that drive event generation.

A trajectory is an ordered sequence of (x, y) crop-window origins on the
padded canvas. Every component stays on the {0, 1, 2} offset lattice, so
a frame-sized window always fits a canvas that is two pixels larger per
axis. A trajectory with T + 1 positions yields T difference frames.

Three kinds are provided:

* ``odg``     -- a fixed nine-position pattern whose eight moves all point
                 in distinct directions, with no move repeated or reversed.
* ``rcls``    -- the repeated closed-loop square walk used by earlier
                 screen-recorded conversions (four directions, cycling).
* ``saccade`` -- a seeded random walk over the eight unit directions,
                 imitating rapid eye movement.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

ODG_X_TRACE = (1, 0, 2, 1, 0, 2, 1, 1, 2)
ODG_Y_TRACE = (0, 2, 1, 0, 1, 2, 0, 1, 1)

RCLS_LOOP = ((1, 1), (2, 1), (2, 2), (1, 2))

# Eight unit moves, counter-clockwise from east.
SACCADE_DIRECTIONS = (
    (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1),
)

KINDS = ("odg", "rcls", "saccade")


@dataclass(frozen=True)
class Trajectory:
    """Ordered (x, y) window origins plus the generating recipe."""

    offsets: tuple[tuple[int, int], ...]
    kind: str
    seed: int | None = None

    def __post_init__(self):
        if len(self.offsets) < 1:
            raise ValueError("trajectory needs at least one position")
        for ox, oy in self.offsets:
            if ox not in (0, 1, 2) or oy not in (0, 1, 2):
                raise ValueError(f"offset ({ox}, {oy}) outside the {{0, 1, 2}} lattice")

    @property
    def steps(self) -> int:
        """Number of difference frames this trajectory produces."""
        return len(self.offsets) - 1


def odg_trajectory(steps: int = 8) -> Trajectory:
    """The fixed omnidirectional pattern, optionally truncated to `steps` moves."""
    if not 1 <= steps <= 8:
        raise ValueError(f"steps must be in 1..8, got {steps}")
    offsets = tuple(zip(ODG_X_TRACE, ODG_Y_TRACE))[: steps + 1]
    return Trajectory(offsets, "odg")


def rcls_trajectory(steps: int) -> Trajectory:
    """Cycle the closed loop (1,1) -> (2,1) -> (2,2) -> (1,2) -> (1,1) ..."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    offsets = tuple(RCLS_LOOP[t % 4] for t in range(steps + 1))
    return Trajectory(offsets, "rcls")


def saccade_trajectory(steps: int, seed: int) -> Trajectory:
    """Seeded random walk from (1, 1), uniform over the feasible unit moves.

    A move is feasible when both components of the new position stay on
    the {0, 1, 2} lattice. The same seed always yields the same path.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    rng = random.Random(seed)
    x, y = 1, 1
    offsets = [(x, y)]
    for _ in range(steps):
        feasible = [
            (dx, dy)
            for dx, dy in SACCADE_DIRECTIONS
            if 0 <= x + dx <= 2 and 0 <= y + dy <= 2
        ]
        dx, dy = feasible[rng.randrange(len(feasible))]
        x, y = x + dx, y + dy
        offsets.append((x, y))
    return Trajectory(tuple(offsets), "saccade", seed=seed)


def make_trajectory(kind: str, steps: int, seed: int = 0) -> Trajectory:
    """Build a trajectory by kind name ('odg', 'rcls' or 'saccade')."""
    if kind == "odg":
        return odg_trajectory(steps)
    if kind == "rcls":
        return rcls_trajectory(steps)
    if kind == "saccade":
        return saccade_trajectory(steps, seed)
    raise ValueError(f"unknown trajectory kind {kind!r} (expected one of {KINDS})")


def displacement(traj: Trajectory, t: int) -> tuple[int, int]:
    """Window move (dx, dy) taken at step t, for t in 1..steps."""
    if not 1 <= t <= traj.steps:
        raise ValueError(f"step index {t} outside 1..{traj.steps}")
    (x0, y0), (x1, y1) = traj.offsets[t - 1], traj.offsets[t]
    return x1 - x0, y1 - y0
