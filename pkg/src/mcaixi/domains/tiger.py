"""Extended tiger: listen while seated, stand up, then open a door.

Hidden state is the tiger's door and whether the agent is standing.
Listening reports the tiger's door correctly with probability 0.85.
Opening a door ends the episode: the tiger is re-hidden and the agent sits
down again.  Actions that are invalid in the current posture cost 10 and
change nothing.
"""

from __future__ import annotations

from ..codec import SpaceSpec
from .base import Environment, solve_average_reward

LISTEN, STAND, OPEN_LEFT, OPEN_RIGHT = range(4)
NOTHING, HEAR_LEFT, HEAR_RIGHT = range(3)
ACCURACY = 0.85
GOLD, TIGER, COST, INVALID = 10, -100, -1, -10

SPEC = SpaceSpec(action_count=4, obs_count=3, reward_min=-100, reward_max=10,
                 action_bits=2, obs_bits=2, reward_bits=7, reward_offset=100)


class Tiger(Environment):
    name = "tiger"

    def __init__(self, seed=None):
        super().__init__(SPEC, seed)
        self._reset()

    def _reset(self):
        self.tiger_left = bool(self.rng.random() < 0.5)
        self.standing = False

    def _step(self, action):
        if action == LISTEN:
            if self.standing:
                return NOTHING, INVALID
            correct = self.rng.random() < ACCURACY
            return (HEAR_LEFT if correct == self.tiger_left else HEAR_RIGHT), COST
        if action == STAND:
            if self.standing:
                return NOTHING, INVALID
            self.standing = True
            return NOTHING, COST
        if not self.standing:
            return NOTHING, INVALID
        tiger_behind = self.tiger_left == (action == OPEN_LEFT)
        self._reset()
        return NOTHING, TIGER if tiger_behind else GOLD


def optimum(max_evidence: int = 20) -> float:
    """Belief MDP over (listening evidence, posture).

    Evidence k = (#left reports - #right reports) gives
    Pr(tiger left) = 0.85^k / (0.85^k + 0.15^k).  |k| is capped at
    ``max_evidence`` where the posterior is certain to ~1e-15.
    """
    ks = range(-max_evidence, max_evidence + 1)
    index = {}
    for k in ks:
        for standing in (0, 1):
            index[k, standing] = len(index)
    home = index[0, 0]
    trans = [None] * len(index)
    for (k, standing), s in index.items():
        p_left = ACCURACY**k / (ACCURACY**k + (1 - ACCURACY) ** k) if k >= 0 else \
            (1 - ACCURACY) ** -k / ((1 - ACCURACY) ** -k + ACCURACY**-k)
        stay = [(1.0, s, float(INVALID))]
        if standing:
            acts = [
                stay,
                stay,
                [(p_left, home, float(TIGER)), (1 - p_left, home, float(GOLD))],
                [(1 - p_left, home, float(TIGER)), (p_left, home, float(GOLD))],
            ]
        else:
            hear_left = p_left * ACCURACY + (1 - p_left) * (1 - ACCURACY)
            up = index[min(k + 1, max_evidence), 0]
            down = index[max(k - 1, -max_evidence), 0]
            acts = [
                [(hear_left, up, float(COST)), (1 - hear_left, down, float(COST))],
                [(1.0, index[k, 1], float(COST))],
                stay,
                stay,
            ]
        trans[s] = acts
    return solve_average_reward(trans)
