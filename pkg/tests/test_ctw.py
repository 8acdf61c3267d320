import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcaixi.codec import SpaceSpec
from mcaixi.ctw import ContextTree, CtwModel, JournalError, SnapshotError
from mcaixi.kt import kt_sequence
from mcaixi.pst import brute_force_mixture_logprob

SPEC2 = SpaceSpec(2, 2, 0, 1, 1, 1, 1, 0)  # 1 action bit, 2 percept bits


def cycles_strategy(max_cycles=12, abits=1, xbits=2):
    bits = st.integers(0, 1)
    cycle = st.tuples(st.tuples(*[bits] * abits), st.tuples(*[bits] * xbits))
    return st.lists(cycle, max_size=max_cycles)


def feed(tree, cycles):
    for a, x in cycles:
        tree.condition_action_bits(a)
        tree.update_percept_bits(x)
    return tree


def test_depth_one_two_ones_is_five_sixteenths():
    tree = ContextTree(1)
    tree.update_percept_bits([1, 1])
    assert math.exp(tree.block_logprob()) == pytest.approx(5 / 16, rel=1e-14)
    assert tree.block_logprob() == pytest.approx(math.log(5 / 16), abs=1e-14)


def test_fresh_tree():
    tree = ContextTree(4)
    assert tree.block_logprob() == 0.0
    assert tree.predict_bit(1) == pytest.approx(0.5, abs=1e-15)


def test_prediction_under_unseen_context_matches_mixture_ratio():
    tree = ContextTree(1)
    tree.update_percept_bit(1)  # seen under context 0; now context is 1
    ratio = math.exp(brute_force_mixture_logprob(1, [((), (1, 1))]) -
                     brute_force_mixture_logprob(1, [((), (1,))]))
    assert tree.predict_bit(1) == pytest.approx(ratio, abs=1e-12)
    # the split model's fresh leaf says 1/2, the single-leaf model has seen a 1
    # and says 3/4; both have equal posterior weight, giving 5/8
    assert tree.predict_bit(1) == pytest.approx(5 / 8, abs=1e-12)


def test_one_journal_record_per_event():
    tree = ContextTree(3)
    tree.update_percept_bit(1)
    assert tree.journal_depth == 1
    tree.condition_action_bits([1, 0])
    assert tree.journal_depth == 2


def test_action_bits_only_shift_context():
    tree = ContextTree(4)
    tree.update_percept_bits([0, 1])
    before = tree.block_logprob()
    counts = tree.counts.copy()
    tree.condition_action_bits([1, 0])
    assert tree.block_logprob() == before
    assert np.array_equal(tree.counts, counts)
    assert tree.context == (0, 1, 1, 0)
    tree.revert(1)
    assert tree.context == (0, 0, 0, 1)


def test_depth_zero_is_plain_kt():
    tree = ContextTree(0)
    bits = [1, 0, 0, 1, 1, 1]
    tree.update_percept_bits(bits)
    assert tree.block_logprob() == pytest.approx(kt_sequence(bits).log_block, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), cycles_strategy())
def test_matches_brute_force_mixture(depth, cycles):
    tree = feed(ContextTree(depth), cycles)
    assert abs(tree.block_logprob() - brute_force_mixture_logprob(depth, cycles)) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), cycles_strategy(20))
def test_chain_rule(depth, cycles):
    tree = ContextTree(depth)
    total = 0.0
    for a, x in cycles:
        tree.condition_action_bits(a)
        for b in x:
            total += math.log(tree.predict_bit(b))
            tree.update_percept_bit(b)
    assert abs(total - tree.block_logprob()) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), cycles_strategy(20))
def test_bit_predictions_normalise(depth, cycles):
    tree = feed(ContextTree(depth), cycles)
    p1, p0 = tree.predict_bit(1), tree.predict_bit(0)
    assert 0 < p1 < 1
    assert abs(p1 + p0 - 1) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), cycles_strategy(20))
def test_node_count_bound(depth, cycles):
    tree = feed(ContextTree(depth), cycles)
    assert tree.node_count <= max(1, tree.percept_bits_seen * (depth + 1))
    assert tree.nodes_touched == tree.percept_bits_seen * (depth + 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), cycles_strategy(10), cycles_strategy(6))
def test_revert_restores_committed_state(depth, real, simulated):
    tree = feed(ContextTree(depth), real)
    tree.commit()
    before = tree.committed_state()
    copy = tree.copy()
    feed(tree, simulated)
    tree.revert_to(0)
    assert tree.state_equal(before)
    assert tree.state_equal(copy)


def test_interleaved_revert_is_lifo():
    rng = np.random.default_rng(5)
    tree = ContextTree(5)
    snaps = [tree.copy()]
    for _ in range(30):
        if rng.random() < 0.4:
            tree.condition_action_bits(rng.integers(0, 2, 2))
        else:
            tree.update_percept_bit(int(rng.integers(0, 2)))
        snaps.append(tree.copy())
    for k in range(30, 0, -1):
        tree.revert(1)
        assert tree.state_equal(snaps[k - 1])


def test_revert_past_journal_raises():
    tree = ContextTree(2)
    tree.update_percept_bit(1)
    with pytest.raises(JournalError):
        tree.revert(2)


def test_sampling_fresh_tree_is_fair():
    tree = ContextTree(3)
    rng = np.random.default_rng(0)
    ones = 0
    n = 100_000
    for _ in range(n):
        ones += tree.sample_percept_bits(rng, 1)[0]
        tree.revert(1)
    assert abs(ones / n - 0.5) <= 0.01


def test_sampling_concentrates_on_deterministic_source():
    model = CtwModel(SPEC2, 8)
    for _ in range(100):
        model.condition_action(0)
        model.update_percept(1, 1)
    model.commit()
    rng = np.random.default_rng(1)
    hits = 0
    for _ in range(2000):
        d = model.journal_depth
        model.condition_action(0)
        hits += model.sample_percept_symbol(rng) == 0b11
        model.revert_to(d)
    assert hits / 2000 >= 0.9


def test_sampling_is_seed_deterministic():
    def draw(seed):
        tree = feed(ContextTree(4), [((1,), (0, 1))] * 5)
        return tree.sample_percept_bits(np.random.default_rng(seed), 12)

    assert draw(7) == draw(7)


def test_fast_planning_sampler_matches_exact_probabilities():
    rng = np.random.default_rng(3)
    model = CtwModel(SPEC2, 6)
    for _ in range(40):
        model.condition_action(int(rng.integers(0, 2)))
        model.update_percept_symbol(int(rng.integers(0, 4)) & 0b11 if rng.random() < .7 else 3)
    model.commit()
    model.condition_action(1)
    exact = {s: model.percept_probability(s) for s in range(4)}
    counts = np.zeros(4)
    for _ in range(40_000):
        d = model.journal_depth
        counts[model.sample_percept_symbol(rng)] += 1
        # the sampled path's log-probability agrees with the exact update
        model.revert_to(d)
    freq = counts / counts.sum()
    for s in range(4):
        assert abs(freq[s] - exact[s]) < 0.01


def test_fast_sampler_logprob_close_to_exact():
    rng = np.random.default_rng(4)
    model = CtwModel(SPEC2, 5)
    for _ in range(30):
        model.condition_action(int(rng.integers(0, 2)))
        model.update_percept_symbol(int(rng.integers(0, 4)))
    model.commit()
    for _ in range(50):
        sym = model.sample_percept_symbol(rng)
        approx = model.block_logprob()
        model.revert(2)
        model.update_percept_symbol(sym)
        assert abs(model.block_logprob() - approx) <= 1e-9
        model.revert(2)


def test_snapshot_round_trip_is_bit_exact():
    rng = np.random.default_rng(9)
    tree = ContextTree(7)
    for _ in range(300):
        tree.condition_action_bits(rng.integers(0, 2, 2))
        tree.update_percept_bits(rng.integers(0, 2, 3))
    tree.commit()
    data = tree.to_bytes()
    loaded = ContextTree.from_bytes(data)
    assert loaded.to_bytes() == data
    assert loaded.block_logprob() == tree.block_logprob()
    assert loaded.state_equal(tree)
    assert loaded.predict_bit(1) == tree.predict_bit(1)


def test_snapshot_errors():
    tree = ContextTree(3)
    tree.update_percept_bit(1)
    with pytest.raises(SnapshotError):
        tree.to_bytes()  # journal not empty
    tree.commit()
    data = tree.to_bytes()
    with pytest.raises(SnapshotError):
        ContextTree.from_bytes(data[:-1])
    with pytest.raises(SnapshotError):
        ContextTree.from_bytes(b"XXXX" + data[4:])
    bad_version = data[:4] + (99).to_bytes(2, "little") + data[6:]
    with pytest.raises(SnapshotError):
        ContextTree.from_bytes(bad_version)
