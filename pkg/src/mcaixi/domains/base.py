"""Environment base class, maze parsing and an average-reward MDP solver."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..codec import SpaceSpec

# compass moves in action order N, E, S, W as (drow, dcol)
MOVES = ((-1, 0), (0, 1), (1, 0), (0, -1))


class UnknownDomain(KeyError):
    pass


class NoKnownOptimum(LookupError):
    pass


class Environment:
    """Interactive simulator for one domain.

    Subclasses implement ``_step(action) -> (obs, reward)``.  All randomness
    comes from ``self.rng`` so a seed and an action sequence fix the percept
    stream.
    """

    name = "base"

    def __init__(self, spec: SpaceSpec, seed=None):
        self.spec = spec
        self.rng = np.random.default_rng(seed)
        self.steps = 0

    def step(self, action: int) -> tuple[int, int]:
        action = int(action)
        if not 0 <= action < self.spec.action_count:
            raise ValueError(f"{self.name}: action {action} outside [0, {self.spec.action_count})")
        obs, reward = self._step(action)
        self.steps += 1
        return int(obs), int(reward)

    def _step(self, action: int) -> tuple[int, int]:
        raise NotImplementedError


def parse_maze(text: str) -> list[str]:
    rows = [line.strip() for line in text.strip().splitlines()]
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("maze rows must have equal width")
    return rows


def wall_bits(rows: list[str], r: int, c: int, wall: str = "#") -> int:
    """4-bit wall adjacency, N E S W from most to least significant bit."""
    code = 0
    for dr, dc in MOVES:
        rr, cc = r + dr, c + dc
        blocked = not (0 <= rr < len(rows) and 0 <= cc < len(rows[0])) or rows[rr][cc] == wall
        code = (code << 1) | int(blocked)
    return code


def solve_average_reward(transitions, tol: float = 1e-11, tau: float = 0.5,
                         max_iter: int = 1_000_000) -> float:
    """Optimal gain of a finite average-reward MDP by relative value iteration.

    ``transitions[s]`` is a list over actions of lists of (prob, next, reward).
    The chain is made aperiodic by mixing each transition with a self loop of
    weight 1 - tau; the gain is unchanged up to the factor tau.  Iteration stops
    when the upper and lower gain bounds are within ``tol``.
    """
    rows, cols, probs, rew, owner = [], [], [], [], []
    row = 0
    for s, actions in enumerate(transitions):
        if not actions:
            raise ValueError(f"state {s} has no actions")
        for outcomes in actions:
            total = 0.0
            for p, s2, r in outcomes:
                rows.append(row)
                cols.append(s2)
                probs.append(p)
                total += p
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"state {s}: outcome probabilities sum to {total}")
            rew.append(sum(p * r for p, _, r in outcomes))
            owner.append(s)
            row += 1
    n = len(transitions)
    P = sp.csr_matrix((probs, (rows, cols)), shape=(row, n))
    r = np.asarray(rew, dtype=float)
    owner = np.asarray(owner)
    starts = np.flatnonzero(np.r_[True, owner[1:] != owner[:-1]])
    h = np.zeros(n)
    for _ in range(max_iter):
        q = tau * (r + P @ h) + (1.0 - tau) * h[owner]
        th = np.maximum.reduceat(q, starts)
        diff = th - h
        lo, hi = diff.min(), diff.max()
        if hi - lo < tol * tau:
            return float((lo + hi) / 2 / tau)
        h = th - th[0]
    raise RuntimeError("relative value iteration did not converge")
