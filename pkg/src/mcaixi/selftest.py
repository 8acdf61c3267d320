"""Quick enumeration-oracle checks run by ``mcaixi selftest``."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .ctw import ContextTree
from .kt import TABLES, kt_block_probability
from .pst import brute_force_mixture_logprob, class_size, enumerate_pst_models


def random_cycles(rng, n_cycles, action_bits=1, percept_bits=2):
    return [
        (tuple(int(b) for b in rng.integers(0, 2, action_bits)),
         tuple(int(b) for b in rng.integers(0, 2, percept_bits)))
        for _ in range(n_cycles)
    ]


def feed(tree: ContextTree, cycles) -> ContextTree:
    for a, x in cycles:
        tree.condition_action_bits(a)
        tree.update_percept_bits(x)
    return tree


def check_mixture(streams=20, seed=0) -> bool:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for depth in (1, 2, 3):
        for _ in range(streams):
            cycles = random_cycles(rng, int(rng.integers(1, 17)))
            tree = feed(ContextTree(depth), cycles)
            worst = max(worst, abs(tree.block_logprob() - brute_force_mixture_logprob(depth, cycles)))
    return worst <= 1e-9


def check_prior() -> bool:
    for depth in range(5):
        models = enumerate_pst_models(depth)
        total = sum(Fraction(1, 2**m.code_length) for m in models)
        if total != 1 or len(models) != class_size(depth):
            return False
    return True


def check_kt() -> bool:
    TABLES.ensure(16)
    for a in range(9):
        for b in range(9 - a):
            exact = kt_block_probability(a, b)
            if abs(math.exp(TABLES.log_block(a, b)) - float(exact)) > 1e-12:
                return False
    return kt_block_probability(2, 2) == Fraction(3, 128)


def check_chronological(seed=1) -> bool:
    rng = np.random.default_rng(seed)
    tree = feed(ContextTree(3), random_cycles(rng, 16))
    base = tree.block_logprob()
    tree.condition_action_bits((int(rng.integers(0, 2)),))
    total = 0.0
    for sym in range(4):
        d = tree.journal_depth
        tree.update_percept_bits(((sym >> 1) & 1, sym & 1))
        total += math.exp(tree.block_logprob() - base)
        tree.revert_to(d)
    return abs(total - 1.0) <= 1e-9


def check_rollback(seed=2) -> bool:
    rng = np.random.default_rng(seed)
    tree = feed(ContextTree(6), random_cycles(rng, 50))
    tree.commit()
    before = tree.committed_state()
    for _ in range(20):
        tree.condition_action_bits((int(rng.integers(0, 2)),))
        tree.sample_percept_bits(rng, 2)
    tree.revert_to(0)
    return tree.state_equal(before)


CHECKS = (
    ("mixture equals brute-force PST mixture", check_mixture),
    ("PST prior sums to one", check_prior),
    ("KT closed form", check_kt),
    ("chronological condition", check_chronological),
    ("journal rollback", check_rollback),
)


def run_all(report=print) -> bool:
    ok = True
    for name, fn in CHECKS:
        passed = bool(fn())
        ok &= passed
        report(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
