"""Kuhn poker, agent as second player against a fixed equilibrium opponent.

Deck J < Q < K, ante 1 each, one betting round with bets of 1.  The
opponent plays the equilibrium family with bluff parameter 1/3: it bets a
jack with probability 1/3 and otherwise checks and folds to a bet, always
checks a queen and then calls a bet with probability 2/3, and always bets a
king.

One cycle is one hand.  The observation shows the agent's card for the
coming hand and the opponent's opening action (card * 2 + action).  The
action answers it: after a check 0 checks and 1 bets; after a bet 0 folds
and 1 calls.  The reward is the agent's net chip gain for the hand.  The
very first cycle only deals the opening hand and pays nothing.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from ..codec import SpaceSpec
from .base import Environment

JACK, QUEEN, KING = 0, 1, 2
CHECK, BET = 0, 1
ALPHA = Fraction(1, 3)

SPEC = SpaceSpec(action_count=2, obs_count=6, reward_min=-2, reward_max=2,
                 action_bits=1, obs_bits=4, reward_bits=3, reward_offset=2)

# opponent policy: opening bet probability and call probability by card
OPEN_BET = {JACK: ALPHA, QUEEN: Fraction(0), KING: 3 * ALPHA}
CALL = {JACK: Fraction(0), QUEEN: ALPHA + Fraction(1, 3), KING: Fraction(1)}


def hand_payoff(mine: int, theirs: int, opp_open: int, action: int, opp_calls: bool) -> int:
    """Net chips for the second player."""
    sign = 1 if mine > theirs else -1
    if opp_open == BET:
        return 2 * sign if action == BET else -1
    if action == CHECK:
        return sign
    return 2 * sign if opp_calls else 1


class KuhnPoker(Environment):
    name = "kuhn"

    def __init__(self, seed=None):
        super().__init__(SPEC, seed)
        self.hand = None

    def _deal(self):
        order = self.rng.permutation(3)
        theirs, mine = int(order[0]), int(order[1])
        opp_open = BET if self.rng.random() < float(OPEN_BET[theirs]) else CHECK
        self.hand = (mine, theirs, opp_open)
        return mine * 2 + opp_open

    def _step(self, action):
        reward = 0
        if self.hand is not None:
            mine, theirs, opp_open = self.hand
            calls = False
            if opp_open == CHECK and action == BET:
                calls = bool(self.rng.random() < float(CALL[theirs]))
            reward = hand_payoff(mine, theirs, opp_open, action, calls)
        return self._deal(), reward


def best_response_value() -> Fraction:
    """Expected chips per hand of the best reply, by exhaustive enumeration."""
    value = Fraction(0)
    for mine in range(3):
        for opp_open in (CHECK, BET):
            best = None
            for action in (CHECK, BET):
                ev = Fraction(0)
                for theirs, m in permutations(range(3), 2):
                    if m != mine:
                        continue
                    p_open = OPEN_BET[theirs] if opp_open == BET else 1 - OPEN_BET[theirs]
                    w = Fraction(1, 6) * p_open
                    if opp_open == CHECK and action == BET:
                        c = CALL[theirs]
                        ev += w * (c * hand_payoff(mine, theirs, CHECK, BET, True)
                                   + (1 - c) * hand_payoff(mine, theirs, CHECK, BET, False))
                    else:
                        ev += w * hand_payoff(mine, theirs, opp_open, action, False)
                best = ev if best is None else max(best, ev)
            value += best
    return value


def optimum() -> float:
    return float(best_response_value())
