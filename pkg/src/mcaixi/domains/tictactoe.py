"""TicTacToe against a uniformly random opponent; the agent moves first.

Observation: the board, two bits per square (0 empty, 1 agent, 2 opponent),
square i occupying bits 2i..2i+1.  Only 3^9 of the 2^18 codes can occur.
A game ends on a win (+2), draw (+1), loss (-2) or an illegal move onto an
occupied square (-3); the next observation is then the empty board.
"""

from __future__ import annotations

from functools import lru_cache

from ..codec import SpaceSpec
from .base import Environment, solve_average_reward

EMPTY, AGENT, OPPONENT = 0, 1, 2
WIN, DRAW, LOSS, ILLEGAL = 2, 1, -2, -3
LINES = ((0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6))

SPEC = SpaceSpec(action_count=9, obs_count=3**9, reward_min=-3, reward_max=2,
                 action_bits=4, obs_bits=18, reward_bits=3, reward_offset=3)


def encode_board(board) -> int:
    code = 0
    for i, v in enumerate(board):
        code |= v << (2 * i)
    return code


def decode_board(code: int) -> tuple[int, ...]:
    return tuple((code >> (2 * i)) & 3 for i in range(9))


def winner(board) -> int:
    for a, b, c in LINES:
        if board[a] != EMPTY and board[a] == board[b] == board[c]:
            return board[a]
    return EMPTY


class TicTacToe(Environment):
    name = "tictactoe"

    def __init__(self, seed=None):
        super().__init__(SPEC, seed)
        self.board = [EMPTY] * 9

    def _end(self, reward):
        self.board = [EMPTY] * 9
        return 0, reward

    def _step(self, action):
        if self.board[action] != EMPTY:
            return self._end(ILLEGAL)
        self.board[action] = AGENT
        if winner(self.board) == AGENT:
            return self._end(WIN)
        empty = [i for i, v in enumerate(self.board) if v == EMPTY]
        if not empty:
            return self._end(DRAW)
        self.board[empty[int(self.rng.random() * len(empty))]] = OPPONENT
        if winner(self.board) == OPPONENT:
            return self._end(LOSS)
        return encode_board(self.board), 0


@lru_cache(maxsize=1)
def _agent_turn_boards():
    """All boards the agent can face, with the transition table."""
    start = (EMPTY,) * 9
    index = {start: 0}
    order = [start]
    table = []
    k = 0
    while k < len(order):
        board = order[k]
        acts = []
        for a in range(9):
            if board[a] != EMPTY:
                acts.append([(1.0, 0, float(ILLEGAL))])
                continue
            b = list(board)
            b[a] = AGENT
            if winner(b) == AGENT:
                acts.append([(1.0, 0, float(WIN))])
                continue
            empty = [i for i, v in enumerate(b) if v == EMPTY]
            if not empty:
                acts.append([(1.0, 0, float(DRAW))])
                continue
            outs = []
            for i in empty:
                nb = list(b)
                nb[i] = OPPONENT
                nb = tuple(nb)
                if winner(nb) == OPPONENT:
                    outs.append((1.0 / len(empty), 0, float(LOSS)))
                    continue
                if nb not in index:
                    index[nb] = len(order)
                    order.append(nb)
                outs.append((1.0 / len(empty), index[nb], 0.0))
            acts.append(outs)
        table.append(acts)
        k += 1
    return order, table


def optimum() -> float:
    return solve_average_reward(_agent_turn_boards()[1])
