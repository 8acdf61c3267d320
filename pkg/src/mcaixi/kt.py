"""Krichevsky-Trofimov estimator for a Bernoulli source.

The log block probability is kept as a closed-form function of the counts,

    log Pr_kt(a zeros, b ones) = H[a] + H[b] - F[a + b],

with H[k] = sum_{i<k} log(i + 1/2) and F[n] = log n!.  Evaluating it from
tables makes the value independent of the order the bits arrived in, which
keeps updates exchangeable and lets a tree be rebuilt bit-exactly from its
counts alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

_LGAMMA_HALF = float(gammaln(0.5))


class KtPreconditionError(ValueError):
    pass


class LogTables:
    """Growable tables of H[k] and F[k] shared by every estimator."""

    def __init__(self, size: int = 1024):
        self.half = np.zeros(0)
        self.fact = np.zeros(0)
        self.ensure(size)

    def ensure(self, size: int) -> None:
        old = len(self.half)
        if size <= old:
            return
        new = max(size, 2 * old)
        k = np.arange(old, new, dtype=np.float64)
        half = np.concatenate([self.half, gammaln(k + 0.5) - _LGAMMA_HALF])
        fact = np.concatenate([self.fact, gammaln(k + 1.0)])
        # exact zeros for the empty-string entries
        half[0] = 0.0
        fact[: min(2, new)] = 0.0
        self.half = half
        self.fact = fact

    def log_block(self, zeros: int, ones: int) -> float:
        self.ensure(zeros + ones + 1)
        return float(self.half[zeros] + self.half[ones] - self.fact[zeros + ones])


TABLES = LogTables()


@dataclass(frozen=True)
class KtCounts:
    zeros: int = 0
    ones: int = 0
    log_block: float = 0.0

    @property
    def total(self) -> int:
        return self.zeros + self.ones


def kt_predict(c: KtCounts, bit: int) -> float:
    """Probability that the next bit equals ``bit``."""
    n = c.zeros + c.ones + 1.0
    if bit:
        return (c.ones + 0.5) / n
    return (c.zeros + 0.5) / n


def kt_update(c: KtCounts, bit: int) -> KtCounts:
    if bit:
        return KtCounts(c.zeros, c.ones + 1, TABLES.log_block(c.zeros, c.ones + 1))
    return KtCounts(c.zeros + 1, c.ones, TABLES.log_block(c.zeros + 1, c.ones))


def kt_revert(c: KtCounts, bit: int) -> KtCounts:
    if bit:
        if c.ones < 1:
            raise KtPreconditionError("no 1 bit to revert")
        return KtCounts(c.zeros, c.ones - 1, TABLES.log_block(c.zeros, c.ones - 1))
    if c.zeros < 1:
        raise KtPreconditionError("no 0 bit to revert")
    return KtCounts(c.zeros - 1, c.ones, TABLES.log_block(c.zeros - 1, c.ones))


def kt_sequence(bits, counts: KtCounts | None = None) -> KtCounts:
    c = counts or KtCounts()
    for b in bits:
        c = kt_update(c, b)
    return c


def kt_block_probability(zeros: int, ones: int) -> Fraction:
    """Exact block probability: prod(i+1/2) * prod(j+1/2) / (a+b)!."""
    num = Fraction(1)
    for i in range(zeros):
        num *= Fraction(2 * i + 1, 2)
    for j in range(ones):
        num *= Fraction(2 * j + 1, 2)
    return num / math.factorial(zeros + ones)
