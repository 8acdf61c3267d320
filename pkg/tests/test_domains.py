from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from mcaixi.codec import decode_percept, encode_percept
from mcaixi.domains import (
    CATALOG, NoKnownOptimum, UnknownDomain, domain_info, env_step, make_env,
    optimal_average_reward, solve_average_reward,
)
from mcaixi.domains import cheese, grid, kuhn, pacman, rps, tictactoe, tiger

TABLE = {
    # name: (|A|, |O|, l_A, l_O, l_R, D, m)
    "cheese": (4, 16, 2, 4, 5, 96, 8),
    "tiger": (4, 3, 2, 2, 7, 96, 5),  # 4 actions: listen, stand, open-left, open-right
    "grid": (4, 1, 2, 1, 1, 96, 12),
    "tictactoe": (9, 19683, 4, 18, 3, 64, 9),
    "rps": (3, 3, 2, 2, 2, 32, 4),
    "kuhn": (2, 6, 1, 4, 3, 42, 2),
    "pacman": (4, 65536, 2, 16, 8, 64, 8),
}


@pytest.mark.parametrize("name", sorted(TABLE))
def test_catalog_rows(name):
    d = CATALOG[name]
    assert (d.action_count, d.obs_count, *d.widths, d.depth, d.horizon) == TABLE[name]


def test_unknown_domain():
    with pytest.raises(UnknownDomain):
        make_env("chess", 0)
    assert domain_info("Cheese-Maze").name == "cheese"


def _random_run(name, seed, n):
    env = make_env(name, seed)
    rng = np.random.default_rng(seed + 1000)
    actions = rng.integers(0, env.spec.action_count, n)
    return env, actions, [env_step(env, int(a)) for a in actions]


@pytest.mark.parametrize("name", sorted(TABLE))
def test_deterministic_under_seed(name):
    _, _, a = _random_run(name, 3, 500)
    _, _, b = _random_run(name, 3, 500)
    assert a == b


@pytest.mark.parametrize("name", sorted(TABLE))
def test_rewards_in_range_and_percepts_round_trip(name):
    n = 30_000 if name == "pacman" else 100_000
    env, _, out = _random_run(name, 0, n)
    spec = env.spec
    rewards = {r for _, r in out}
    assert min(rewards) >= spec.reward_min and max(rewards) <= spec.reward_max
    for obs, r in set(out):
        assert decode_percept(spec, encode_percept(spec, obs, r)) == (obs, r)


def test_invalid_action_index_rejected():
    with pytest.raises(ValueError):
        make_env("tictactoe", 0).step(9)


# -- grid -----------------------------------------------------------------------

def test_grid_wall_is_noop():
    env = grid.Grid(0)
    assert env.step(0) == (0, 0)  # north from the top-left corner
    assert env.pos == grid.START


def test_grid_shortest_route_pays_once_and_teleports():
    env = grid.Grid(0)
    out = [env.step(a) for a in (1, 1, 1, 2, 2, 2)]
    assert [r for _, r in out] == [0, 0, 0, 0, 0, 1]
    assert env.pos == grid.START


def test_grid_optimum_is_one_sixth():
    assert optimal_average_reward("grid") == pytest.approx(1 / 6, abs=1e-10)


# -- cheese maze ------------------------------------------------------------------

def test_cheese_maze_layout():
    assert len(cheese.CELLS) == 11
    assert cheese.CHEESE_CELL == (3, 3)
    assert cheese.OBS[(1, 1)] == 0b1001  # walls north and west
    assert cheese.OBS[(1, 3)] == 0b1000
    assert cheese.OBS[(3, 3)] == cheese.OBS[(3, 1)] == 0b0111  # aliased dead ends


def test_cheese_rewards():
    env = cheese.CheeseMaze(0)
    env.pos = (1, 1)
    assert env.step(0) == (0b1001, -10)
    assert env.step(1) == (0b1010, -1)
    env.pos = (2, 3)
    obs, r = env.step(2)
    assert r == 10 and env.pos in cheese.START_CELLS and obs == cheese.OBS[env.pos]


def test_cheese_respawn_uniform():
    env = cheese.CheeseMaze(1)
    counts = Counter()
    for _ in range(20_000):
        env.pos = (2, 3)
        env.step(2)
        counts[env.pos] += 1
    assert set(counts) == set(cheese.START_CELLS)
    assert chisquare([counts[p] for p in cheese.START_CELLS]).pvalue > 1e-3


def test_cheese_optimum():
    opt = optimal_average_reward("cheese")
    assert opt == pytest.approx(67 / 43, abs=1e-9)
    # fully observed bound: mean over start cells of (11 - d) / d style renewal
    assert opt < Fraction(71, 39)


# -- tiger ----------------------------------------------------------------------------

def test_tiger_listen_accuracy():
    env = tiger.Tiger(0)
    right = 0
    n = 20_000
    for _ in range(n):
        obs, r = env.step(tiger.LISTEN)
        assert r == -1
        right += obs == (tiger.HEAR_LEFT if env.tiger_left else tiger.HEAR_RIGHT)
    assert abs(right / n - 0.85) < 0.01


def test_tiger_posture_rules():
    env = tiger.Tiger(0)
    assert env.step(tiger.OPEN_LEFT) == (0, -10)  # cannot open while seated
    assert env.step(tiger.STAND) == (0, -1)
    assert env.step(tiger.STAND) == (0, -10)
    assert env.step(tiger.LISTEN) == (0, -10)
    left = env.tiger_left
    obs, r = env.step(tiger.OPEN_RIGHT)
    assert r == (-100 if not left else 10)
    assert env.standing is False


def test_tiger_optimum_beats_simple_policy():
    # listen twice, open only on agreement else keep listening: simulate
    env = tiger.Tiger(5)
    total, steps = 0, 0
    for _ in range(20_000):
        a, b = env.step(0), env.step(0)
        total += a[1] + b[1]
        steps += 2
        if a[0] == b[0]:
            total += env.step(1)[1]
            total += env.step(tiger.OPEN_RIGHT if a[0] == tiger.HEAR_LEFT else tiger.OPEN_LEFT)[1]
            steps += 2
    opt = optimal_average_reward("tiger")
    assert total / steps < opt < 10
    assert opt == pytest.approx(tiger.optimum(max_evidence=12), abs=1e-9)


# -- tictactoe -----------------------------------------------------------------------

def test_tictactoe_first_percept_shows_reply():
    env = tictactoe.TicTacToe(0)
    assert env.board == [0] * 9
    obs, r = env.step(4)
    board = tictactoe.decode_board(obs)
    assert r == 0 and board[4] == tictactoe.AGENT
    assert sum(v == tictactoe.OPPONENT for v in board) == 1


def test_tictactoe_illegal_move_ends_game():
    env = tictactoe.TicTacToe(0)
    env.step(4)
    assert env.step(4) == (0, -3)
    assert env.board == [0] * 9


def test_tictactoe_opponent_uniform():
    env = tictactoe.TicTacToe(2)
    counts = Counter()
    for _ in range(10_000):
        obs, _ = env.step(0)
        reply = [i for i, v in enumerate(tictactoe.decode_board(obs)) if v == tictactoe.OPPONENT]
        counts[reply[0]] += 1
        env.step(0)  # illegal: resets the board
    assert chisquare([counts[i] for i in range(1, 9)]).pvalue > 1e-3


def test_tictactoe_outcomes():
    env = tictactoe.TicTacToe(0)
    env.board = [1, 1, 0, 2, 2, 0, 0, 0, 0]
    assert env.step(2) == (0, 2)
    env.board = [1, 2, 1, 1, 2, 2, 2, 1, 0]
    assert env.step(8) == (0, 1)
    env.board = [1, 1, 2, 2, 2, 0, 1, 0, 0]
    env.rng = np.random.default_rng(0)
    # agent blocks nothing; the opponent wins if it picks square 5
    results = set()
    for seed in range(30):
        env.board = [1, 0, 2, 0, 2, 0, 0, 0, 1]
        env.rng = np.random.default_rng(seed)
        results.add(env.step(1)[1])
    assert -2 in results


def test_tictactoe_optimum_is_plausible():
    opt = optimal_average_reward("tictactoe")
    assert 0.5 < opt < 2 / 3  # a win takes at least three moves


# -- rps --------------------------------------------------------------------------------

def test_rps_payoffs():
    assert rps.payoff(rps.PAPER, rps.ROCK) == 1
    assert rps.payoff(rps.ROCK, rps.PAPER) == -1
    assert rps.payoff(rps.SCISSORS, rps.SCISSORS) == 0


def test_rps_opponent_rule():
    env = rps.BiasedRps(0)
    after_rock_win, otherwise = Counter(), Counter()
    rng = np.random.default_rng(1)
    for _ in range(30_000):
        bias = env.won_with_rock
        obs, _ = env.step(int(rng.integers(0, 3)))
        (after_rock_win if bias else otherwise)[obs] += 1
    assert set(after_rock_win) == {rps.ROCK}
    assert chisquare([otherwise[i] for i in range(3)]).pvalue > 1e-3


def test_rps_optimum_is_quarter():
    assert optimal_average_reward("rps") == pytest.approx(0.25, abs=1e-9)


# -- kuhn --------------------------------------------------------------------------------

def test_kuhn_deals_uniformly():
    env = kuhn.KuhnPoker(0)
    assert env.step(0)[1] == 0  # dealing cycle
    cards, pairs = Counter(), Counter()
    for _ in range(10_000):
        mine, theirs, _ = env.hand
        cards[mine] += 1
        pairs[mine, theirs] += 1
        env.step(0)
    assert chisquare([cards[c] for c in range(3)]).pvalue > 1e-3
    assert chisquare(list(pairs.values())).pvalue > 1e-3 and len(pairs) == 6


def test_kuhn_opponent_policy():
    env = kuhn.KuhnPoker(3)
    env.step(0)
    bets = Counter()
    seen = Counter()
    for _ in range(30_000):
        _, theirs, opp = env.hand
        seen[theirs] += 1
        bets[theirs] += opp
        env.step(0)
    assert bets[kuhn.QUEEN] == 0
    assert bets[kuhn.KING] == seen[kuhn.KING]
    assert abs(bets[kuhn.JACK] / seen[kuhn.JACK] - 1 / 3) < 0.02


def test_kuhn_payoffs():
    assert kuhn.hand_payoff(2, 0, kuhn.BET, 1, False) == 2
    assert kuhn.hand_payoff(0, 2, kuhn.BET, 0, False) == -1
    assert kuhn.hand_payoff(1, 0, kuhn.CHECK, 0, False) == 1
    assert kuhn.hand_payoff(0, 1, kuhn.CHECK, 1, False) == 1  # bluff succeeds
    assert kuhn.hand_payoff(0, 1, kuhn.CHECK, 1, True) == -2


def test_kuhn_best_response_value():
    assert kuhn.best_response_value() == Fraction(1, 18)
    assert optimal_average_reward("kuhn") == pytest.approx(1 / 18)


def test_kuhn_best_response_simulated():
    # call/bet with K, call a bet with Q? no: the best reply checks Q, folds J to bets,
    # bluffs J after a check, and bets/calls K
    env = kuhn.KuhnPoker(11)
    obs, _ = env.step(0)
    total = 0
    n = 60_000
    for _ in range(n):
        card, opp = divmod(obs, 2)
        if card == kuhn.KING:
            a = 1
        elif card == kuhn.QUEEN:
            a = 1 if opp == kuhn.BET else 0
        else:
            a = 0 if opp == kuhn.BET else 1
        obs, r = env.step(a)
        total += r
    assert abs(total / n - 1 / 18) < 0.02


# -- pacman ----------------------------------------------------------------------------------

def test_pacman_maze_is_connected_and_has_ghosts():
    seen = {pacman.START}
    stack = [pacman.START]
    while stack:
        for q in pacman.NEIGHBOURS[stack.pop()]:
            if q not in seen:
                seen.add(q)
                stack.append(q)
    assert seen == pacman.FREE
    assert len(pacman.GHOST_HOME) == pacman.N_GHOSTS


def test_pacman_has_no_oracle():
    with pytest.raises(NoKnownOptimum):
        optimal_average_reward("pacman")


def test_pacman_observation_bits():
    env = pacman.Pacman(0)
    obs = env.observe()
    assert obs >> 12 == pacman.wall_bits(pacman.MAZE, *pacman.START)
    assert obs & 1 == 0
    env.pos = (15, 8)
    assert env.step(2)[1] == -10  # wall to the south


def test_pacman_power_pill_and_caught():
    env = pacman.Pacman(0)
    env.pos = (15, 2)
    env.ghosts = [(1, 6)] * 4
    env.pills = {(15, 1)}
    obs, r = env.step(3)
    assert obs & 1 == 1 and r in (-1, 9)
    env = pacman.Pacman(0)
    env.ghosts = [(15, 7)] * 4
    env.pos = (15, 8)
    assert env.step(3)[1] == -50
    assert env.pos == pacman.START


# -- solver -------------------------------------------------------------------------------

def test_solver_on_two_state_chain():
    # stay in state 0 earning 1, or move to state 1 (0 reward) where 3 is paid on return
    trans = [
        [[(1.0, 0, 1.0)], [(1.0, 1, 0.0)]],
        [[(1.0, 0, 3.0)]],
    ]
    assert solve_average_reward(trans) == pytest.approx(1.5, abs=1e-9)


def test_solver_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        solve_average_reward([[[(0.5, 0, 1.0)]]])
