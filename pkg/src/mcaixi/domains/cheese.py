"""Cheese maze: an 11-cell maze with heavily aliased wall observations.

The observation is the wall pattern around the mouse.  Moving costs 1,
bumping into a wall costs 10, and reaching the cheese pays 10, after which
the mouse reappears on a uniformly random free cell.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..codec import SpaceSpec
from .base import MOVES, Environment, parse_maze, solve_average_reward, wall_bits

MAZE = parse_maze("""
#######
#.....#
#.#.#.#
#.#C#.#
#######
""")

MOVE, BUMP, CHEESE = -1, -10, 10

SPEC = SpaceSpec(action_count=4, obs_count=16, reward_min=-10, reward_max=10,
                 action_bits=2, obs_bits=4, reward_bits=5, reward_offset=10)

CELLS = [(r, c) for r, row in enumerate(MAZE) for c, ch in enumerate(row) if ch != "#"]
CHEESE_CELL = next((r, c) for r, c in CELLS if MAZE[r][c] == "C")
START_CELLS = [p for p in CELLS if p != CHEESE_CELL]
OBS = {p: wall_bits(MAZE, *p) for p in CELLS}


def maze_move(pos, action):
    """Return (new position, reward) before any respawn."""
    dr, dc = MOVES[action]
    r, c = pos[0] + dr, pos[1] + dc
    if MAZE[r][c] == "#":
        return pos, BUMP
    if (r, c) == CHEESE_CELL:
        return (r, c), CHEESE
    return (r, c), MOVE


class CheeseMaze(Environment):
    name = "cheese"

    def __init__(self, seed=None):
        super().__init__(SPEC, seed)
        self.pos = self._respawn()

    def _respawn(self):
        return START_CELLS[int(self.rng.random() * len(START_CELLS))]

    def _step(self, action):
        self.pos, reward = maze_move(self.pos, action)
        if reward == CHEESE:
            self.pos = self._respawn()
        return OBS[self.pos], reward


def _canonical(weights):
    g = 0
    for w in weights:
        g = gcd(g, w)
    return tuple(w // g for w in weights)


def optimum() -> float:
    """Average-reward optimum of the belief MDP.

    A belief is a vector of integer weights over cells (the mouse's position
    distribution up to scale).  Moves are deterministic, so weights only
    merge or get filtered by the percept, and the reachable set is finite.
    """
    n = len(CELLS)
    idx = {p: i for i, p in enumerate(CELLS)}

    def respawn_beliefs():
        out = {}
        for p in START_CELLS:
            w = out.setdefault(OBS[p], [0] * n)
            w[idx[p]] += 1
        return {o: _canonical(w) for o, w in out.items()}

    after_cheese = respawn_beliefs()
    total_start = len(START_CELLS)

    def successors(belief, action):
        groups: dict[tuple[int, int], list[int]] = {}
        mass = sum(belief)
        cheese_mass = 0
        for i, w in enumerate(belief):
            if not w:
                continue
            q, reward = maze_move(CELLS[i], action)
            if reward == CHEESE:
                cheese_mass += w
                continue
            g = groups.setdefault((OBS[q], reward), [0] * n)
            g[idx[q]] += w
        out = []
        for (obs, reward), w in groups.items():
            out.append((Fraction(sum(w), mass), _canonical(w), reward))
        if cheese_mass:
            for obs, w in after_cheese.items():
                share = Fraction(sum(w), total_start)
                out.append((Fraction(cheese_mass, mass) * share, w, CHEESE))
        return out

    start = _canonical([1 if CELLS[i] != CHEESE_CELL else 0 for i in range(n)])
    index = {start: 0}
    order = [start]
    table = []
    k = 0
    while k < len(order):
        b = order[k]
        acts = []
        for a in range(4):
            outs = []
            for p, b2, r in successors(b, a):
                if b2 not in index:
                    index[b2] = len(order)
                    order.append(b2)
                outs.append((float(p), index[b2], float(r)))
            acts.append(outs)
        table.append(acts)
        k += 1
    return solve_average_reward(table)
