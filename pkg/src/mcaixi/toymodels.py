"""Small exact environment models for planner tests.

A ``TabularModel`` gives the percept distribution as a function of the
previous percept symbol and the current action.  It is frozen (it never
learns) and supports the same update/revert protocol as ``CtwModel``.
"""

from __future__ import annotations

import math
from typing import Callable

from .codec import SpaceSpec

Dist = dict[int, float]


class TabularModel:
    def __init__(self, spec: SpaceSpec, dist: Callable[[int, int], Dist], initial: int = 0):
        self.spec = spec
        self._dist = dist
        self.initial = initial
        self._events: list[tuple] = []
        self._last = initial
        self._action: int | None = None
        self._logp = 0.0

    def distribution(self) -> Dist:
        if self._action is None:
            raise ValueError("condition on an action before predicting a percept")
        return self._dist(self._last, self._action)

    def condition_action(self, action: int) -> None:
        if not 0 <= action < self.spec.action_count:
            raise ValueError(f"bad action {action}")
        self._events.append(("a", self._action))
        self._action = action

    def update_percept_symbol(self, symbol: int) -> None:
        p = self.distribution().get(symbol, 0.0)
        self._events.append(("x", self._last, self._action, self._logp))
        self._logp += math.log(p) if p > 0 else -math.inf
        self._last = symbol
        self._action = None

    def sample_percept_symbol(self, rng) -> int:
        u = rng.random()
        acc = 0.0
        dist = self.distribution()
        symbol = None
        for symbol, p in sorted(dist.items()):
            acc += p
            if u < acc:
                break
        self.update_percept_symbol(symbol)
        return symbol

    def percept_symbols(self):
        return range(1 << self.spec.percept_bits)

    def block_logprob(self) -> float:
        return self._logp

    @property
    def journal_depth(self) -> int:
        return len(self._events)

    def revert(self, k: int = 1) -> None:
        for _ in range(k):
            ev = self._events.pop()
            if ev[0] == "a":
                self._action = ev[1]
            else:
                _, self._last, self._action, self._logp = ev

    def revert_to(self, depth: int) -> None:
        self.revert(len(self._events) - depth)

    def commit(self) -> None:
        self._events.clear()


# reward-only percept space: one constant observation bit, reward in {0, 1}
BINARY_REWARD = SpaceSpec(action_count=2, obs_count=1, reward_min=0, reward_max=1,
                          action_bits=1, obs_bits=1, reward_bits=1, reward_offset=0)


def bandit_model(rewards=(1, 0)) -> TabularModel:
    """Deterministic bandit: action a always yields rewards[a]."""
    return TabularModel(BINARY_REWARD, lambda last, a: {rewards[a]: 1.0})


def coin_guess_model() -> TabularModel:
    """Guess a fair coin: observation = coin, reward 1 when the guess matches."""
    def dist(last, a):
        # symbol = obs << 1 | reward
        return {(coin << 1) | int(coin == a): 0.5 for coin in (0, 1)}
    return TabularModel(BINARY_REWARD, dist)


def constant_reward_model(reward: int = 1) -> TabularModel:
    return TabularModel(BINARY_REWARD, lambda last, a: {reward: 1.0})


def sticky_reward_model(p_safe=0.5, p_after_loss=0.1, p_after_win=0.9) -> TabularModel:
    """Two actions, two percepts; action 1 pays off mostly after a rewarded cycle."""
    def dist(last, a):
        p = p_safe if a == 0 else (p_after_win if last & 1 else p_after_loss)
        return {1: p, 0: 1.0 - p}
    return TabularModel(BINARY_REWARD, dist)
