import math

import numpy as np
import pytest

from mcaixi.codec import SpaceSpec
from mcaixi.ctw import CtwModel
from mcaixi.toymodels import (
    bandit_model, coin_guess_model, constant_reward_model, sticky_reward_model,
)
from mcaixi.uct import (
    CHANCE, DECISION, PlannerConfig, PlannerError, SearchNode, best_action, expectimax_exact,
    rho_uct_search, rollout, sample_trajectory, select_ucb_action,
)


def cfg(**kw):
    kw.setdefault("horizon", 1)
    return PlannerConfig(**kw)


def test_config_validation():
    with pytest.raises(PlannerError):
        PlannerConfig(horizon=0)
    with pytest.raises(PlannerError):
        PlannerConfig(horizon=1, simulations=0)
    with pytest.raises(PlannerError):
        PlannerConfig(horizon=1, reward_min=1, reward_max=1)


def test_ucb_arithmetic():
    node = SearchNode(DECISION, visits=8)
    node.children = {0: SearchNode(CHANCE, 4, 1.0), 1: SearchNode(CHANCE, 4, 1.6)}
    c = PlannerConfig(horizon=2, exploration=1.0)
    # 1.0/2 + sqrt(ln 8 / 4) = 1.221 versus 1.6/2 + 0.721 = 1.521
    assert 1.0 / 2 + math.sqrt(math.log(8) / 4) == pytest.approx(1.221, abs=1e-3)
    assert select_ucb_action(node, c, 2, np.random.default_rng(0), 2) == 1


def test_ucb_prefers_unexplored():
    node = SearchNode(DECISION, visits=5)
    node.children = {0: SearchNode(CHANCE, 5, 100.0)}
    picks = {select_ucb_action(node, cfg(), 1, np.random.default_rng(s), 3) for s in range(40)}
    assert picks == {1, 2}


def test_ucb_scale_invariance():
    rng_vals = np.random.default_rng(3)
    for _ in range(50):
        vals = rng_vals.random(3)
        visits = rng_vals.integers(1, 20, 3)
        picks = []
        for k in (1.0, 7.5):
            node = SearchNode(DECISION, visits=int(visits.sum()))
            node.children = {a: SearchNode(CHANCE, int(visits[a]), float(k * vals[a])) for a in range(3)}
            c = PlannerConfig(horizon=3, reward_min=0.0, reward_max=k)
            picks.append(select_ucb_action(node, c, 3, np.random.default_rng(0), 3))
        assert picks[0] == picks[1]


def test_backup_arithmetic():
    node = SearchNode(CHANCE, visits=3, value=10.0)
    model = constant_reward_model(2)  # symbol 2: obs 1, reward 0 -> use reward 1 below
    model = constant_reward_model(1)
    node.children = {}
    model.condition_action(0)
    ret = sample_trajectory(node, model, 1, np.random.default_rng(0), cfg())
    assert ret == 1.0
    assert node.visits == 4 and node.value == pytest.approx((1 + 3 * 10) / 4)
    # the rule on its own: T=3, V=10, return 2 -> V=8
    assert (2 + 3 * 10) / 4 == 8


def test_zero_horizon_is_noop():
    model = constant_reward_model(1)
    node = SearchNode(DECISION)
    assert sample_trajectory(node, model, 0, np.random.default_rng(0), cfg()) == 0.0
    assert node.visits == 0 and model.journal_depth == 0


def test_rollout():
    rng = np.random.default_rng(0)
    assert rollout(constant_reward_model(1), 0, rng) == 0
    assert rollout(constant_reward_model(1), 5, rng) == 5
    model = coin_guess_model()
    vals = []
    for _ in range(10_000):
        d = model.journal_depth
        vals.append(rollout(model, 1, rng))
        model.revert_to(d)
    assert abs(np.mean(vals) - 0.5) <= 0.02


def test_best_action():
    root = SearchNode(DECISION)
    root.children = {0: SearchNode(CHANCE, 1, 2.0), 1: SearchNode(CHANCE, 1, 3.5),
                     2: SearchNode(CHANCE, 1, 3.4)}
    assert best_action(root, np.random.default_rng(0)) == 1
    with pytest.raises(PlannerError):
        best_action(SearchNode(DECISION), np.random.default_rng(0))


def test_best_action_ties_are_uniform():
    root = SearchNode(DECISION)
    root.children = {0: SearchNode(CHANCE, 1, 1.0), 1: SearchNode(CHANCE, 1, 1.0)}
    rng = np.random.default_rng(0)
    picks = [best_action(root, rng) for _ in range(10_000)]
    assert abs(np.mean(picks) - 0.5) <= 0.02


def test_single_simulation_returns_its_action():
    model = bandit_model()
    res = rho_uct_search(model, cfg(simulations=1), np.random.default_rng(4))
    assert list(res.root_visits) == [res.action]


def test_bandit_picks_paying_arm():
    res = rho_uct_search(bandit_model((0, 1)), cfg(simulations=100), np.random.default_rng(0))
    assert res.action == 1
    assert expectimax_exact(bandit_model((0, 1)), 1) == (1.0, 1)


def test_coin_guess_values():
    res = rho_uct_search(coin_guess_model(), cfg(simulations=10_000), np.random.default_rng(1))
    for v in res.root_values.values():
        assert abs(v - 0.5) <= 0.1
    assert expectimax_exact(coin_guess_model(), 2)[0] == pytest.approx(1.0)


def test_search_restores_model_and_bounds_tree():
    model = sticky_reward_model()
    c = cfg(horizon=3, simulations=300)
    res = rho_uct_search(model, c, np.random.default_rng(2), keep_tree=True)
    assert model.journal_depth == 0
    assert res.root.node_count() <= 300 * 3 * 2 + 1
    _check_backups(res.root, 3, c)


def _check_backups(node, m, c):
    lo, hi = c.reward_min * m, c.reward_max * m
    assert lo - 1e-9 <= node.value <= hi + 1e-9
    if node.kind == DECISION:
        assert node.visits >= sum(ch.visits for ch in node.children.values())
        for ch in node.children.values():
            _check_backups(ch, m, c)
    else:
        for ch in node.children.values():
            _check_backups(ch, m - 1, c)


def test_search_is_deterministic():
    a = rho_uct_search(sticky_reward_model(), cfg(horizon=3, simulations=500), np.random.default_rng(9))
    b = rho_uct_search(sticky_reward_model(), cfg(horizon=3, simulations=500), np.random.default_rng(9))
    assert a.root_values == b.root_values and a.root_visits == b.root_visits


def test_backup_soundness_with_recorded_returns():
    """V-hat at the root equals the mean of every simulation's return."""
    model = sticky_reward_model()
    c = cfg(horizon=3, simulations=1)
    root = SearchNode(DECISION)
    rng = np.random.default_rng(5)
    returns = []
    for _ in range(200):
        returns.append(sample_trajectory(root, model, 3, rng, c))
        model.revert_to(0)
    assert root.value == pytest.approx(np.mean(returns), abs=1e-12)
    assert root.visits == 200


SPACE = SpaceSpec(3, 4, 0, 3, 2, 2, 2, 0)


def _trained_model(seed, cycles=60, depth=8):
    rng = np.random.default_rng(seed)
    model = CtwModel(SPACE, depth)
    for _ in range(cycles):
        a = int(rng.integers(0, 3))
        model.condition_action(a)
        model.update_percept(int(rng.integers(0, 4)), int((a + rng.integers(0, 2)) % 4))
    model.commit()
    return model


@pytest.mark.parametrize("seed", range(4))
def test_compiled_and_reference_planners_agree(seed):
    c = PlannerConfig.for_space(SPACE, horizon=3, simulations=150)
    m1, m2 = _trained_model(seed), _trained_model(seed)
    r1 = rho_uct_search(m1, c, np.random.default_rng(seed), compiled=True, keep_tree=True)
    r2 = rho_uct_search(m2, c, np.random.default_rng(seed), compiled=False)
    assert r1.action == r2.action
    assert r1.root_visits == r2.root_visits
    assert r1.root_values == pytest.approx(r2.root_values, abs=1e-12)
    assert r1.root.node_count() == r2.root.node_count()
    assert m1.tree.state_equal(_trained_model(seed).tree)


def test_wall_clock_budget():
    model = _trained_model(0)
    c = PlannerConfig.for_space(SPACE, horizon=2, time_limit=0.05)
    res = rho_uct_search(model, c, np.random.default_rng(0))
    assert res.simulations >= 1
    assert model.journal_depth == 0


def test_hook_reports_root_values():
    seen = []
    rho_uct_search(sticky_reward_model(), cfg(horizon=2, simulations=20),
                   np.random.default_rng(0), hook=lambda i, vals: seen.append((i, dict(vals))))
    assert [i for i, _ in seen] == list(range(1, 21))


def test_expectimax_size_guard():
    with pytest.raises(PlannerError):
        expectimax_exact(_trained_model(0), 6)
