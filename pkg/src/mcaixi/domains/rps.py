"""Rock-paper-scissors against an exploitable opponent.

The opponent repeats rock after winning a round with rock and otherwise
plays uniformly at random.  The observation is the opponent's move.
"""

from __future__ import annotations

from ..codec import SpaceSpec
from .base import Environment, solve_average_reward

ROCK, PAPER, SCISSORS = 0, 1, 2

SPEC = SpaceSpec(action_count=3, obs_count=3, reward_min=-1, reward_max=1,
                 action_bits=2, obs_bits=2, reward_bits=2, reward_offset=1)


def payoff(mine: int, theirs: int) -> int:
    """+1 win, 0 draw, -1 loss for the player choosing ``mine``."""
    if mine == theirs:
        return 0
    return 1 if (mine - theirs) % 3 == 1 else -1


class BiasedRps(Environment):
    name = "rps"

    def __init__(self, seed=None):
        super().__init__(SPEC, seed)
        self.won_with_rock = False

    def opponent_move(self) -> int:
        if self.won_with_rock:
            return ROCK
        return int(self.rng.random() * 3)

    def _step(self, action):
        opp = self.opponent_move()
        reward = payoff(action, opp)
        self.won_with_rock = opp == ROCK and reward == -1
        return opp, reward


def optimum() -> float:
    # state 0: opponent plays uniformly, state 1: opponent will play rock
    trans = []
    for state in (0, 1):
        acts = []
        for a in range(3):
            if state == 1:
                acts.append([(1.0, 0, float(payoff(a, ROCK)))])
            else:
                acts.append([
                    (1 / 3, int(o == ROCK and payoff(a, o) == -1), float(payoff(a, o)))
                    for o in range(3)
                ])
        trans.append(acts)
    return solve_average_reward(trans)
