"""4x4 grid: walk from the top-left corner to the bottom-right one.

The observation is constant, so the agent has to localise itself from its
own action history.  Entering the goal pays 1 and teleports back to start.
"""

from __future__ import annotations

from ..codec import SpaceSpec
from .base import MOVES, Environment, solve_average_reward

SIZE = 4
START = (0, 0)
GOAL = (SIZE - 1, SIZE - 1)

SPEC = SpaceSpec(action_count=4, obs_count=1, reward_min=0, reward_max=1,
                 action_bits=2, obs_bits=1, reward_bits=1, reward_offset=0)


def grid_move(pos, action):
    dr, dc = MOVES[action]
    r, c = pos[0] + dr, pos[1] + dc
    if 0 <= r < SIZE and 0 <= c < SIZE:
        return r, c
    return pos


class Grid(Environment):
    name = "grid"

    def __init__(self, seed=None):
        super().__init__(SPEC, seed)
        self.pos = START

    def _step(self, action):
        self.pos = grid_move(self.pos, action)
        if self.pos == GOAL:
            self.pos = START
            return 0, 1
        return 0, 0


def optimum() -> float:
    cells = [(r, c) for r in range(SIZE) for c in range(SIZE) if (r, c) != GOAL]
    index = {p: i for i, p in enumerate(cells)}
    trans = []
    for p in cells:
        acts = []
        for a in range(4):
            q = grid_move(p, a)
            acts.append([(1.0, index[START], 1.0)] if q == GOAL else [(1.0, index[q], 0.0)])
        trans.append(acts)
    return solve_average_reward(trans)
