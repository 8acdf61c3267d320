"""Partially observable Pacman on a fixed 17x17 maze.

The agent sees only local features, packed into 16 bits (most significant
first): walls N E S W, a ghost in line of sight N E S W, food in line of
sight N E S W, food within Manhattan distance 2 / 3 / 4, and whether a power
pill is active.

Rewards: -1 per move, -10 for running into a wall (no move), +10 for eating
food, -50 for being caught (replaces the step's other rewards and restarts
the level), +100 for clearing the level (which also restarts it).  Every
food cell is filled independently with probability 1/2 at the start of a
level.  Ghosts chase the agent when within distance 5 and wander randomly
otherwise; under a power pill they flee and a caught ghost is sent home.
"""

from __future__ import annotations

from ..codec import SpaceSpec
from .base import MOVES, Environment, parse_maze, wall_bits

_LEFT_HALF = """
#########
#o......#
#.##.##.#
#........
#.##.#.##
#....#...
####.###.
#.....GGG
####.#.##
#........
#.##.###.
#..#.....
##.#.#.##
#....#...
#.######.
#o......P
#########
"""

MAZE = parse_maze("\n".join(row + row[:-1][::-1] for row in _LEFT_HALF.split()))

N_GHOSTS = 4
CHASE_RANGE = 5
POWER_STEPS = 20
FOOD_PROB = 0.5
MOVE, WALL, FOOD, CAUGHT, CLEAR = -1, -10, 10, -50, 100

SPEC = SpaceSpec(action_count=4, obs_count=1 << 16, reward_min=-50, reward_max=109,
                 action_bits=2, obs_bits=16, reward_bits=8, reward_offset=50)

FREE = {(r, c) for r, row in enumerate(MAZE) for c, ch in enumerate(row) if ch != "#"}
FOOD_CELLS = sorted((r, c) for r, c in FREE if MAZE[r][c] == ".")
PILL_CELLS = sorted((r, c) for r, c in FREE if MAZE[r][c] == "o")
GHOST_HOME = sorted((r, c) for r, c in FREE if MAZE[r][c] == "G")[:N_GHOSTS]
START = next((r, c) for r, c in FREE if MAZE[r][c] == "P")


def _neighbours(pos):
    out = []
    for dr, dc in MOVES:
        q = (pos[0] + dr, pos[1] + dc)
        if q in FREE:
            out.append(q)
    return out


NEIGHBOURS = {p: _neighbours(p) for p in FREE}


def manhattan(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


class Pacman(Environment):
    name = "pacman"

    def __init__(self, seed=None):
        super().__init__(SPEC, seed)
        self._new_level()

    def _new_level(self):
        self.pos = START
        self.ghosts = list(GHOST_HOME)
        self.food = {p for p in FOOD_CELLS if self.rng.random() < FOOD_PROB}
        self.pills = set(PILL_CELLS)
        self.power = 0

    # -- observation -------------------------------------------------------
    def observe(self) -> int:
        r, c = self.pos
        obs = wall_bits(MAZE, r, c)
        ghost_los = food_los = 0
        ghosts = set(self.ghosts)
        for dr, dc in MOVES:
            seen_ghost = seen_food = 0
            q = (r + dr, c + dc)
            while q in FREE:
                seen_ghost |= q in ghosts
                seen_food |= q in self.food
                q = (q[0] + dr, q[1] + dc)
            ghost_los = (ghost_los << 1) | seen_ghost
            food_los = (food_los << 1) | seen_food
        nearest = min((manhattan(self.pos, f) for f in self.food), default=99)
        smell = (int(nearest <= 2) << 2) | (int(nearest <= 3) << 1) | int(nearest <= 4)
        return (obs << 12) | (ghost_los << 8) | (food_los << 4) | (smell << 1) | int(self.power > 0)

    # -- dynamics ----------------------------------------------------------
    def _ghost_step(self, g):
        options = NEIGHBOURS[g]
        if manhattan(g, self.pos) <= CHASE_RANGE:
            dists = [manhattan(q, self.pos) for q in options]
            target = max(dists) if self.power else min(dists)
            options = [q for q, d in zip(options, dists) if d == target]
        return options[int(self.rng.random() * len(options))]

    def _collide(self, i) -> bool:
        """Resolve ghost i meeting the agent; True when the agent is caught."""
        if self.power:
            self.ghosts[i] = GHOST_HOME[i]
            return False
        return True

    def _step(self, action):
        dr, dc = MOVES[action]
        old = self.pos
        nxt = (old[0] + dr, old[1] + dc)
        if nxt not in FREE:
            reward = WALL
        else:
            reward = MOVE
            self.pos = nxt
            if nxt in self.food:
                self.food.discard(nxt)
                reward += FOOD
            if nxt in self.pills:
                self.pills.discard(nxt)
                self.power = POWER_STEPS + 1
        if not self.food:
            self._new_level()
            return self.observe(), reward + CLEAR
        for i, g in enumerate(self.ghosts):
            if g == self.pos and self._collide(i):
                self._new_level()
                return self.observe(), CAUGHT
        for i, g in enumerate(self.ghosts):
            ng = self._ghost_step(g)
            self.ghosts[i] = ng
            # meeting on a cell or swapping cells both count
            if (ng == self.pos or (ng == old and g == self.pos)) and self._collide(i):
                self._new_level()
                return self.observe(), CAUGHT
        if self.power:
            self.power -= 1
        return self.observe(), reward
