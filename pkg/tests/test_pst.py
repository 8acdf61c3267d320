from fractions import Fraction

import pytest

from mcaixi.kt import kt_block_probability
from mcaixi.pst import (
    OracleSizeError, PstModel, brute_force_mixture, brute_force_posterior, class_size,
    enumerate_pst_models, figure_one_pst, model_next_bit, posterior_next_bit,
)


def test_class_sizes_follow_recurrence():
    assert [len(enumerate_pst_models(d)) for d in range(5)] == [1, 2, 5, 26, 677]
    assert [class_size(d) for d in range(5)] == [1, 2, 5, 26, 677]


def test_models_are_distinct():
    models = enumerate_pst_models(3)
    assert len({m.leaves for m in models}) == len(models)


def test_code_lengths():
    root = PstModel(("",), 2)
    full = PstModel(("11", "10", "01", "00"), 2)
    assert root.code_length == 1
    assert full.code_length == 7 - 4


@pytest.mark.parametrize("depth", range(5))
def test_prior_sums_to_one(depth):
    assert sum(Fraction(1, 2**m.code_length) for m in enumerate_pst_models(depth)) == 1


def test_enumeration_guard():
    with pytest.raises(OracleSizeError):
        enumerate_pst_models(5)


def test_depth_one_example():
    assert brute_force_mixture(1, [((), (1, 1))]) == Fraction(5, 16)


def test_depth_zero_is_kt():
    cycles = [((0,), (1, 0)), ((1,), (1, 1))]
    assert brute_force_mixture(0, cycles) == kt_block_probability(1, 3)


def test_prior_before_data():
    post = brute_force_posterior(2, [])
    for m, w in post:
        assert w == Fraction(1, 2**m.code_length)


def test_posterior_remixture_equals_ratio():
    cycles = [((1,), (0, 1)), ((0,), (1, 1)), ((1,), (1, 0))]
    nxt = cycles + [((0,), (1,))]
    ratio = brute_force_mixture(2, nxt) / brute_force_mixture(2, cycles + [((0,), ())])
    assert posterior_next_bit(2, cycles, 1, pending_action=(0,)) == ratio


def test_posterior_concentrates_on_deterministic_source():
    # alternating bits: a depth-1 context predicts them perfectly
    cycles = [((), (i % 2,)) for i in range(200)]
    post = brute_force_posterior(2, cycles)
    best, w = max(post, key=lambda mw: mw[1])
    assert model_next_bit(best, cycles, 0) >= Fraction(9, 10)


def test_figure_one_mapping():
    pst = figure_one_pst()
    assert pst.prob_one([1, 1, 1, 0]) == 0.3
    assert pst.model.leaf_for("0111") == "01"
