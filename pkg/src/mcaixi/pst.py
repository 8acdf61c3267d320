"""Prediction suffix trees and a brute-force mixture over all of them.

This is the slow, enumerative counterpart of the context tree: it lists every
tree structure of bounded depth, scores each one with per-leaf KT estimators
and mixes them with weight 2^-code_length.  Arithmetic is exact (Fractions),
so it is only usable at toy sizes.

A node is named by the string of context bits leading to it, newest bit
first; the leaf that predicts the next bit after history y_1..y_t is the
unique leaf equal to a prefix of y_t y_{t-1} ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .kt import kt_block_probability

MAX_ENUM_DEPTH = 4


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class PstModel:
    """Structure of a prediction suffix tree: its set of leaves."""

    leaves: tuple[str, ...]
    max_depth: int

    @property
    def node_count(self) -> int:
        # a full binary tree with L leaves has 2L - 1 nodes
        return 2 * len(self.leaves) - 1

    @property
    def depth(self) -> int:
        return max(len(leaf) for leaf in self.leaves)

    @property
    def code_length(self) -> int:
        """Nodes minus leaves sitting at the maximum depth."""
        deep = sum(1 for leaf in self.leaves if len(leaf) == self.max_depth)
        return self.node_count - deep

    def leaf_for(self, context: str) -> str:
        """Leaf selected by ``context`` (newest bit first)."""
        for leaf in self.leaves:
            if context.startswith(leaf):
                return leaf
        raise ValueError(f"context {context!r} shorter than the tree")


@lru_cache(maxsize=None)
def _structures(depth: int) -> tuple[tuple[str, ...], ...]:
    if depth == 0:
        return (("",),)
    sub = _structures(depth - 1)
    out = [("",)]
    for left in sub:  # subtree under edge 1
        for right in sub:  # subtree under edge 0
            out.append(tuple("1" + s for s in left) + tuple("0" + s for s in right))
    return tuple(out)


def enumerate_pst_models(depth: int) -> list[PstModel]:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth > MAX_ENUM_DEPTH:
        raise OracleSizeError(f"refusing to enumerate C_{depth}: too many models")
    return [PstModel(leaves, depth) for leaves in _structures(depth)]


def class_size(depth: int) -> int:
    n = 1
    for _ in range(depth):
        n = n * n + 1
    return n


def _context(bits: list[int], depth: int) -> str:
    return "".join(str(b) for b in reversed(bits[-depth:])) if depth else ""


def _leaf_counts(model: PstModel, cycles, depth: int) -> dict[str, list[int]]:
    """Route every percept bit to the leaf selected by its context."""
    hist = [0] * depth
    counts = {leaf: [0, 0] for leaf in model.leaves}
    for action_bits, percept_bits in cycles:
        hist.extend(action_bits)
        for bit in percept_bits:
            leaf = model.leaf_for(_context(hist, depth))
            counts[leaf][bit] += 1
            hist.append(bit)
    return counts


def model_probability(model: PstModel, cycles, depth: int | None = None) -> Fraction:
    """Pr(x_1:t | M, a_1:t) as a product of per-leaf KT block probabilities."""
    depth = model.max_depth if depth is None else depth
    prob = Fraction(1)
    for a, b in _leaf_counts(model, cycles, depth).values():
        prob *= kt_block_probability(a, b)
    return prob


def _check_size(depth: int, cycles) -> None:
    if depth > 3:
        raise OracleSizeError("brute-force mixture is limited to depth <= 3")
    if sum(len(a) + len(x) for a, x in cycles) > 2000:
        raise OracleSizeError("history too long for the brute-force mixture")


def brute_force_mixture(depth: int, cycles) -> Fraction:
    """Exact sum over C_D of 2^-code_length * Pr(x | M, a).

    ``cycles`` is a sequence of (action_bits, percept_bits) pairs; the
    history is primed with ``depth`` zero bits like the context tree.
    """
    _check_size(depth, cycles)
    total = Fraction(0)
    for model in enumerate_pst_models(depth):
        total += Fraction(1, 2 ** model.code_length) * model_probability(model, cycles)
    return total


def brute_force_mixture_logprob(depth: int, cycles) -> float:
    return _log_fraction(brute_force_mixture(depth, cycles))


def brute_force_posterior(depth: int, cycles) -> list[tuple[PstModel, Fraction]]:
    """Posterior weight of every model after the given history."""
    _check_size(depth, cycles)
    models = enumerate_pst_models(depth)
    joint = [Fraction(1, 2 ** m.code_length) * model_probability(m, cycles) for m in models]
    z = sum(joint)
    return [(m, w / z) for m, w in zip(models, joint)]


def model_next_bit(model: PstModel, cycles, bit: int, pending_action=()) -> Fraction:
    """KT prediction of model M for the next percept bit."""
    depth = model.max_depth
    hist = [0] * depth
    for a, x in cycles:
        hist.extend(a)
        hist.extend(x)
    hist.extend(pending_action)
    counts = _leaf_counts(model, list(cycles) + [(tuple(pending_action), ())], depth)
    zeros, ones = counts[model.leaf_for(_context(hist, depth))]
    num = Fraction(2 * (ones if bit else zeros) + 1, 2)
    return num / (zeros + ones + 1)


def posterior_next_bit(depth: int, cycles, bit: int = 1, pending_action=()) -> Fraction:
    """Mixture prediction as a posterior-weighted sum of model predictions."""
    complete = [c for c in cycles]
    return sum(
        w * model_next_bit(m, complete, bit, pending_action)
        for m, w in brute_force_posterior(depth, complete)
    )


def _log_fraction(f: Fraction) -> float:
    # exact-ish log of a tiny rational without float underflow
    return math.log(f.numerator) - math.log(f.denominator)


@dataclass
class Pst:
    """A prediction suffix tree with fixed leaf parameters theta_l = Pr(next bit = 1)."""

    theta: dict[str, float]
    model: PstModel = field(init=False)

    def __post_init__(self):
        depth = max(len(k) for k in self.theta)
        self.model = PstModel(tuple(self.theta), depth)

    def prob_one(self, history_bits) -> float:
        ctx = "".join(str(b) for b in reversed(list(history_bits)))
        return self.theta[self.model.leaf_for(ctx)]


def figure_one_pst() -> Pst:
    return Pst({"1": 0.1, "01": 0.3, "00": 0.5})
