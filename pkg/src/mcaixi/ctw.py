"""Action-conditional context tree weighting.

The tree stores, per node, KT counts, the log KT block probability and the
log weighted probability.  Nodes live in flat numpy arrays and the hot
loops are compiled with numba.  Every mutation is journaled so that
planning can roll the model back bit-exactly; nodes allocated by a
reverted update are released again.

Context bits are read newest-first: the child of a depth-d node on the
current path is selected by the bit d+1 positions back in the history.
"""

from __future__ import annotations

import math
import struct

import numba
import numpy as np

from .codec import SpaceSpec, bits_to_int, encode_action, encode_percept
from .kt import TABLES, KtCounts

LN2 = math.log(2.0)

# meta slots
NN, HL, NR, NE, BS, PB, TOUCH = range(7)
META_SIZE = 8

REC_PERCEPT = 0
REC_ACTION = 1

SNAPSHOT_MAGIC = b"ACTW"
SNAPSHOT_VERSION = 1


class SnapshotError(ValueError):
    pass


class JournalError(ValueError):
    pass


# ---------------------------------------------------------------------------
# compiled kernels; ``st`` is the tuple built by ContextTree._state()


@numba.njit(cache=True, inline="always")
def _lse_half(x, y):
    # log(exp(x)/2 + exp(y)/2)
    if x >= y:
        return x + math.log1p(math.exp(y - x)) - LN2
    return y + math.log1p(math.exp(x - y)) - LN2


@numba.njit(cache=True, nogil=True)
def _find_path(st, depth):
    counts, log_kt, log_pw, child, hist, meta, rec, e_node, e_pw, path, s_kt, s_pw, half, fact = st
    hl = meta[HL]
    node = 0
    path[0] = 0
    for d in range(depth):
        if node >= 0:
            node = child[node, hist[hl - 1 - d]]
        path[d + 1] = node


@numba.njit(cache=True, nogil=True)
def _hypothetical(st, depth, bit):
    """Weighted log-probabilities along the path if ``bit`` were appended."""
    counts, log_kt, log_pw, child, hist, meta, rec, e_node, e_pw, path, s_kt, s_pw, half, fact = st
    hl = meta[HL]
    for d in range(depth, -1, -1):
        n = path[d]
        a = 0
        b = 0
        if n >= 0:
            a = counts[n, 0]
            b = counts[n, 1]
        if bit:
            b += 1
        else:
            a += 1
        lk = half[a] + half[b] - fact[a + b]
        s_kt[d] = lk
        if d == depth:
            s_pw[d] = lk
        else:
            cb = hist[hl - 1 - d]
            other = -1
            if n >= 0:
                other = child[n, 1 - cb]
            so = 0.0
            if other >= 0:
                so = log_pw[other]
            # children are always summed in the order child0 + child1
            if cb == 0:
                s = s_pw[d + 1] + so
            else:
                s = so + s_pw[d + 1]
            s_pw[d] = _lse_half(lk, s)
    return s_pw[0]


@numba.njit(cache=True, nogil=True)
def _commit(st, depth, bit):
    counts, log_kt, log_pw, child, hist, meta, rec, e_node, e_pw, path, s_kt, s_pw, half, fact = st
    hl = meta[HL]
    r = meta[NR]
    rec[r, 0] = REC_PERCEPT
    rec[r, 1] = hl
    rec[r, 2] = meta[NN]
    rec[r, 3] = meta[NE]
    rec[r, 4] = bit
    for d in range(1, depth + 1):
        if path[d] < 0:
            n = meta[NN]
            meta[NN] = n + 1
            counts[n, 0] = 0
            counts[n, 1] = 0
            log_kt[n] = 0.0
            log_pw[n] = 0.0
            child[n, 0] = -1
            child[n, 1] = -1
            child[path[d - 1], hist[hl - d]] = n
            path[d] = n
    e = meta[NE]
    for d in range(depth + 1):
        n = path[d]
        e_node[e] = n
        e_pw[e] = log_pw[n]
        e += 1
        counts[n, bit] += 1
        log_kt[n] = s_kt[d]
        log_pw[n] = s_pw[d]
    meta[NE] = e
    hist[hl] = bit
    meta[HL] = hl + 1
    meta[BS] += 1
    meta[PB] += 1
    meta[NR] = r + 1
    meta[TOUCH] += depth + 1


@numba.njit(cache=True, nogil=True)
def _update_bits(st, depth, bits):
    for i in range(bits.shape[0]):
        _find_path(st, depth)
        _hypothetical(st, depth, bits[i])
        _commit(st, depth, bits[i])


@numba.njit(cache=True, nogil=True)
def _condition_bits(st, bits):
    counts, log_kt, log_pw, child, hist, meta, rec, e_node, e_pw, path, s_kt, s_pw, half, fact = st
    r = meta[NR]
    hl = meta[HL]
    rec[r, 0] = REC_ACTION
    rec[r, 1] = hl
    rec[r, 2] = meta[NN]
    rec[r, 3] = meta[NE]
    rec[r, 4] = 0
    for i in range(bits.shape[0]):
        hist[hl + i] = bits[i]
    meta[HL] = hl + bits.shape[0]
    meta[BS] += bits.shape[0]
    meta[NR] = r + 1


@numba.njit(cache=True, nogil=True)
def _condition_int(st, value, width):
    counts, log_kt, log_pw, child, hist, meta, rec, e_node, e_pw, path, s_kt, s_pw, half, fact = st
    r = meta[NR]
    hl = meta[HL]
    rec[r, 0] = REC_ACTION
    rec[r, 1] = hl
    rec[r, 2] = meta[NN]
    rec[r, 3] = meta[NE]
    rec[r, 4] = 0
    for i in range(width):
        hist[hl + i] = (value >> (width - 1 - i)) & 1
    meta[HL] = hl + width
    meta[BS] += width
    meta[NR] = r + 1


@numba.njit(cache=True, nogil=True)
def _predict(st, depth, bit):
    counts, log_kt, log_pw, child, hist, meta, rec, e_node, e_pw, path, s_kt, s_pw, half, fact = st
    _find_path(st, depth)
    return math.exp(_hypothetical(st, depth, bit) - log_pw[0])


@numba.njit(cache=True, nogil=True)
def _sample_bits(st, depth, nbits, rng):
    """Draw ``nbits`` bits from the mixture, updating as if observed.

    Returns the bits as an integer, most significant first.
    """
    counts, log_kt, log_pw, child, hist, meta, rec, e_node, e_pw, path, s_kt, s_pw, half, fact = st
    value = 0
    for i in range(nbits):
        _find_path(st, depth)
        p1 = math.exp(_hypothetical(st, depth, 1) - log_pw[0])
        if rng.random() < p1:
            bit = 1
        else:
            bit = 0
            _hypothetical(st, depth, 0)
        _commit(st, depth, bit)
        value = (value << 1) | bit
    return value


@numba.njit(cache=True, nogil=True)
def _sample_bits_fast(st, depth, nbits, rng):
    """Planning sampler: one pass per bit using per-node conditionals.

    Each node's conditional is beta*kt + (1-beta)*child with
    beta = P_kt / (2 P_w); the weighted log-probabilities are then advanced
    by log of the realised conditional.  Results agree with the exact update
    to rounding and are meant to be reverted.
    """
    counts, log_kt, log_pw, child, hist, meta, rec, e_node, e_pw, path, s_kt, s_pw, half, fact = st
    value = 0
    for i in range(nbits):
        _find_path(st, depth)
        q1 = 0.5
        q0 = 0.5
        for d in range(depth, -1, -1):
            n = path[d]
            a = 0
            b = 0
            beta = 0.5
            if n >= 0:
                a = counts[n, 0]
                b = counts[n, 1]
                beta = math.exp(log_kt[n] - log_pw[n] - LN2)
            tot = a + b + 1.0
            k1 = (b + 0.5) / tot
            k0 = (a + 0.5) / tot
            if d == depth:
                q1 = k1
                q0 = k0
            else:
                q1 = beta * k1 + (1.0 - beta) * q1
                q0 = beta * k0 + (1.0 - beta) * q0
            s_kt[d] = q0
            s_pw[d] = q1
        if rng.random() < q1:
            bit = 1
        else:
            bit = 0
        hl = meta[HL]
        r = meta[NR]
        rec[r, 0] = REC_PERCEPT
        rec[r, 1] = hl
        rec[r, 2] = meta[NN]
        rec[r, 3] = meta[NE]
        rec[r, 4] = bit
        for d in range(1, depth + 1):
            if path[d] < 0:
                n = meta[NN]
                meta[NN] = n + 1
                counts[n, 0] = 0
                counts[n, 1] = 0
                log_kt[n] = 0.0
                log_pw[n] = 0.0
                child[n, 0] = -1
                child[n, 1] = -1
                child[path[d - 1], hist[hl - d]] = n
                path[d] = n
        e = meta[NE]
        for d in range(depth + 1):
            n = path[d]
            e_node[e] = n
            e_pw[e] = log_pw[n]
            e += 1
            counts[n, bit] += 1
            a = counts[n, 0]
            b = counts[n, 1]
            log_kt[n] = half[a] + half[b] - fact[a + b]
            if bit:
                log_pw[n] += math.log(s_pw[d])
            else:
                log_pw[n] += math.log(s_kt[d])
        meta[NE] = e
        hist[hl] = bit
        meta[HL] = hl + 1
        meta[BS] += 1
        meta[PB] += 1
        meta[NR] = r + 1
        meta[TOUCH] += depth + 1
        value = (value << 1) | bit
    return value


@numba.njit(cache=True, nogil=True)
def _revert(st, k):
    counts, log_kt, log_pw, child, hist, meta, rec, e_node, e_pw, path, s_kt, s_pw, half, fact = st
    for _ in range(k):
        r = meta[NR] - 1
        if rec[r, 0] == REC_PERCEPT:
            bit = rec[r, 4]
            start = rec[r, 3]
            keep = rec[r, 2]
            for e in range(meta[NE] - 1, start - 1, -1):
                n = e_node[e]
                counts[n, bit] -= 1
                a = counts[n, 0]
                b = counts[n, 1]
                log_kt[n] = half[a] + half[b] - fact[a + b]
                log_pw[n] = e_pw[e]
                if child[n, 0] >= keep:
                    child[n, 0] = -1
                if child[n, 1] >= keep:
                    child[n, 1] = -1
            meta[NE] = start
            meta[NN] = keep
            meta[PB] -= 1
        meta[BS] -= meta[HL] - rec[r, 1]
        meta[HL] = rec[r, 1]
        meta[NR] = r


@numba.njit(cache=True, nogil=True)
def _preorder(child, n_nodes):
    order = np.empty(n_nodes, dtype=np.int64)
    stack = np.empty(n_nodes + 1, dtype=np.int64)
    sp = 1
    stack[0] = 0
    k = 0
    while sp > 0:
        sp -= 1
        n = stack[sp]
        order[k] = n
        k += 1
        # child 1 is pushed last so it is visited first (left edge = 1)
        if child[n, 0] >= 0:
            stack[sp] = child[n, 0]
            sp += 1
        if child[n, 1] >= 0:
            stack[sp] = child[n, 1]
            sp += 1
    return order


@numba.njit(cache=True, nogil=True)
def _rebuild(flags, counts, depth, half, fact):
    """Rebuild child links and log values from a preorder node stream."""
    n = flags.shape[0]
    child = np.full((n, 2), -1, dtype=np.int32)
    node_depth = np.zeros(n, dtype=np.int64)
    log_kt = np.zeros(n)
    log_pw = np.zeros(n)
    # stack of (node, next child slot to fill: 1 then 0)
    stack = np.empty(n + 1, dtype=np.int64)
    sp = 0
    for i in range(n):
        if i > 0:
            # attach to the deepest open parent
            while True:
                if sp == 0:
                    return child, log_kt, log_pw, False
                p = stack[sp - 1]
                if (flags[p] & 2) and child[p, 1] < 0:
                    child[p, 1] = i
                    break
                if (flags[p] & 1) and child[p, 0] < 0:
                    child[p, 0] = i
                    break
                sp -= 1
            node_depth[i] = node_depth[stack[sp - 1]] + 1
            if node_depth[i] > depth:
                return child, log_kt, log_pw, False
        stack[sp] = i
        sp += 1
    for i in range(n):
        if (flags[i] & 1) and child[i, 0] < 0:
            return child, log_kt, log_pw, False
        if (flags[i] & 2) and child[i, 1] < 0:
            return child, log_kt, log_pw, False
    for i in range(n - 1, -1, -1):
        a = counts[i, 0]
        b = counts[i, 1]
        lk = half[a] + half[b] - fact[a + b]
        log_kt[i] = lk
        if node_depth[i] == depth:
            log_pw[i] = lk
        else:
            s0 = 0.0
            s1 = 0.0
            if child[i, 0] >= 0:
                s0 = log_pw[child[i, 0]]
            if child[i, 1] >= 0:
                s1 = log_pw[child[i, 1]]
            log_pw[i] = _lse_half(lk, s0 + s1)
    return child, log_kt, log_pw, True


def _grow(arr: np.ndarray, size: int, fill=0) -> np.ndarray:
    if arr.shape[0] >= size:
        return arr
    new_shape = (max(size, 2 * arr.shape[0]),) + arr.shape[1:]
    out = np.full(new_shape, fill, dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


class ContextTree:
    """Depth-D weighted context tree over a binary history.

    Percept bits update the KT counts on their context path; action bits only
    extend the context.  The history is primed with ``depth`` zero bits.
    """

    def __init__(self, depth: int, capacity: int = 1024):
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.depth = depth
        cap = max(capacity, depth + 2)
        self.counts = np.zeros((cap, 2), dtype=np.int64)
        self.log_kt = np.zeros(cap)
        self.log_pw = np.zeros(cap)
        self.child = np.full((cap, 2), -1, dtype=np.int32)
        self.hist = np.zeros(max(1024, 2 * depth + 16), dtype=np.uint8)
        self.meta = np.zeros(META_SIZE, dtype=np.int64)
        self.meta[NN] = 1
        self.meta[HL] = depth
        self.rec = np.zeros((64, 5), dtype=np.int64)
        self.e_node = np.zeros(64 * (depth + 1), dtype=np.int32)
        self.e_pw = np.zeros(64 * (depth + 1))
        self.path = np.zeros(depth + 1, dtype=np.int32)
        self.s_kt = np.zeros(depth + 1)
        self.s_pw = np.zeros(depth + 1)

    # -- capacity management ------------------------------------------------

    def reserve(self, percept_bits: int, action_bits: int = 0, records: int | None = None) -> None:
        """Make room for the given number of upcoming bit events."""
        d1 = self.depth + 1
        m = self.meta
        nodes = int(m[NN]) + percept_bits * self.depth + 1
        if nodes > self.counts.shape[0]:
            self.counts = _grow(self.counts, nodes)
            self.log_kt = _grow(self.log_kt, nodes)
            self.log_pw = _grow(self.log_pw, nodes)
            self.child = _grow(self.child, nodes, -1)
        self.hist = _grow(self.hist, int(m[HL]) + percept_bits + action_bits + 1)
        if records is None:
            records = percept_bits + action_bits
        self.rec = _grow(self.rec, int(m[NR]) + records + 1)
        ents = int(m[NE]) + percept_bits * d1 + 1
        if ents > self.e_node.shape[0]:
            self.e_node = _grow(self.e_node, ents)
            self.e_pw = _grow(self.e_pw, ents)
        TABLES.ensure(int(m[PB]) + percept_bits + 2)

    def _state(self):
        return (
            self.counts, self.log_kt, self.log_pw, self.child, self.hist,
            self.meta, self.rec, self.e_node, self.e_pw,
            self.path, self.s_kt, self.s_pw, TABLES.half, TABLES.fact,
        )

    # -- updates ----------------------------------------------------------------

    def update_percept_bit(self, bit: int) -> None:
        self.update_percept_bits((bit,))

    def update_percept_bits(self, bits) -> None:
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.size == 0:
            return
        if arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        self.reserve(arr.size)
        _update_bits(self._state(), self.depth, arr)

    def condition_action_bits(self, bits) -> None:
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        self.reserve(0, arr.size, records=1)
        _condition_bits(self._state(), arr)

    def predict_bit(self, bit: int = 1) -> float:
        """Probability that the next percept bit equals ``bit``."""
        self.reserve(1)
        return float(_predict(self._state(), self.depth, int(bit)))

    def sample_percept_bits(self, rng: np.random.Generator, nbits: int) -> tuple[int, ...]:
        self.reserve(nbits)
        value = _sample_bits(self._state(), self.depth, nbits, rng)
        return tuple((value >> (nbits - 1 - i)) & 1 for i in range(nbits))

    def revert(self, k: int = 1) -> None:
        if k < 0 or k > self.meta[NR]:
            raise JournalError(f"cannot revert {k} records; journal holds {self.meta[NR]}")
        if k:
            _revert(self._state(), k)

    def revert_to(self, journal_depth: int) -> None:
        self.revert(self.journal_depth - journal_depth)

    def commit(self) -> None:
        """Accept all journaled updates as real experience."""
        self.meta[NR] = 0
        self.meta[NE] = 0

    # -- queries ------------------------------------------------------------------

    def block_logprob(self) -> float:
        return float(self.log_pw[0])

    @property
    def journal_depth(self) -> int:
        return int(self.meta[NR])

    @property
    def node_count(self) -> int:
        return int(self.meta[NN])

    @property
    def bits_seen(self) -> int:
        """Action and percept bits appended since construction."""
        return int(self.meta[BS])

    @property
    def percept_bits_seen(self) -> int:
        return int(self.meta[PB])

    @property
    def nodes_touched(self) -> int:
        return int(self.meta[TOUCH])

    @property
    def context(self) -> tuple[int, ...]:
        """The most recent ``depth`` history bits, oldest first."""
        hl = int(self.meta[HL])
        return tuple(int(b) for b in self.hist[hl - self.depth : hl])

    def node(self, context=()) -> int:
        """Index of the node reached by following ``context`` bits (newest first), or -1."""
        n = 0
        for b in context:
            n = int(self.child[n, b])
            if n < 0:
                return -1
        return n

    def node_counts(self, context=()) -> KtCounts:
        n = self.node(context)
        if n < 0:
            return KtCounts()
        return KtCounts(int(self.counts[n, 0]), int(self.counts[n, 1]), float(self.log_kt[n]))

    def committed_state(self) -> dict:
        """Plain copy of everything that defines the model (for deep compares)."""
        n = self.node_count
        hl = int(self.meta[HL])
        # canonical preorder numbering, so trees built in different orders compare
        order = _preorder(self.child, n)
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)
        ch = self.child[order]
        child = np.where(ch >= 0, rank[np.maximum(ch, 0)], -1)
        return {
            "depth": self.depth,
            "counts": self.counts[order],
            "log_kt": self.log_kt[order],
            "log_pw": self.log_pw[order],
            "child": child,
            "hist": self.hist[hl - self.depth : hl].copy(),
            "meta": self.meta[[NN, NR, NE, BS, PB]].copy(),
        }

    def state_equal(self, other: "ContextTree | dict") -> bool:
        a = self.committed_state()
        b = other.committed_state() if isinstance(other, ContextTree) else other
        if a["depth"] != b["depth"]:
            return False
        for key in ("counts", "log_kt", "log_pw", "child", "hist", "meta"):
            x, y = a[key], b[key]
            if x.shape != y.shape:
                return False
            # log values must agree bit for bit
            if x.dtype.kind == "f":
                if not np.array_equal(x.view(np.int64), y.view(np.int64)):
                    return False
            elif not np.array_equal(x, y):
                return False
        return True

    def copy(self) -> "ContextTree":
        out = ContextTree.__new__(ContextTree)
        out.depth = self.depth
        for name in ("counts", "log_kt", "log_pw", "child", "hist", "meta", "rec",
                     "e_node", "e_pw", "path", "s_kt", "s_pw"):
            setattr(out, name, getattr(self, name).copy())
        return out

    # -- snapshots -------------------------------------------------------------

    def to_bytes(self) -> bytes:
        """Serialize the committed tree.

        Layout (little endian): magic, u16 version, u32 depth, u64 bits_seen,
        u64 percept bits seen, u64 node count, the ``depth`` context bits as
        bytes, then a preorder stream of (u8 flags, u64 zeros, u64 ones).
        """
        if self.journal_depth:
            raise SnapshotError("only committed trees can be saved (journal not empty)")
        n = self.node_count
        order = _preorder(self.child, n)
        ch = self.child[order]
        nodes = np.zeros(n, dtype=[("flags", "u1"), ("a", "<u8"), ("b", "<u8")])
        nodes["flags"] = (ch[:, 0] >= 0).astype(np.uint8) | ((ch[:, 1] >= 0).astype(np.uint8) << 1)
        nodes["a"] = self.counts[order, 0]
        nodes["b"] = self.counts[order, 1]
        header = SNAPSHOT_MAGIC + struct.pack(
            "<HIQQQ", SNAPSHOT_VERSION, self.depth, self.bits_seen, self.percept_bits_seen, n
        )
        return header + bytes(self.context) + nodes.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "ContextTree":
        head = 4 + struct.calcsize("<HIQQQ")
        if len(data) < head or data[:4] != SNAPSHOT_MAGIC:
            raise SnapshotError("not a context tree snapshot")
        version, depth, bits_seen, pbits, n = struct.unpack("<HIQQQ", data[4:head])
        if version != SNAPSHOT_VERSION:
            raise SnapshotError(f"unsupported snapshot version {version}")
        if n < 1:
            raise SnapshotError("snapshot has no root node")
        rec_size = 17
        if len(data) != head + depth + n * rec_size:
            raise SnapshotError("truncated or oversized snapshot")
        ctx = np.frombuffer(data, dtype=np.uint8, count=depth, offset=head)
        if ctx.size and ctx.max() > 1:
            raise SnapshotError("context bytes must be 0 or 1")
        nodes = np.frombuffer(
            data, dtype=[("flags", "u1"), ("a", "<u8"), ("b", "<u8")], count=n, offset=head + depth
        )
        tree = cls(depth, capacity=max(n, 16))
        counts = np.stack([nodes["a"].astype(np.int64), nodes["b"].astype(np.int64)], axis=1)
        TABLES.ensure(int(counts.sum(axis=1).max(initial=0)) + 2)
        child, log_kt, log_pw, ok = _rebuild(
            nodes["flags"].copy(), counts, depth, TABLES.half, TABLES.fact
        )
        if not ok:
            raise SnapshotError("malformed node stream")
        tree.counts[:n] = counts
        tree.log_kt[:n] = log_kt
        tree.log_pw[:n] = log_pw
        tree.child[:n] = child
        tree.hist[:depth] = ctx
        tree.meta[NN] = n
        tree.meta[HL] = depth
        tree.meta[BS] = bits_seen
        tree.meta[PB] = pbits
        return tree


class CtwModel:
    """A context tree viewed as an environment model over a symbol space."""

    def __init__(self, spec: SpaceSpec, depth: int, tree: ContextTree | None = None):
        self.spec = spec
        self.tree = tree if tree is not None else ContextTree(depth)
        self.depth = self.tree.depth

    def condition_action(self, action: int) -> None:
        encode_action(self.spec, action)  # range check
        self.tree.reserve(0, self.spec.action_bits, records=1)
        _condition_int(self.tree._state(), action, self.spec.action_bits)

    def update_percept(self, obs: int, reward: int) -> None:
        self.tree.update_percept_bits(encode_percept(self.spec, obs, reward))

    def observe_percept(self, obs: int, reward: int) -> None:
        """Append a percept to the context without learning from it."""
        self.tree.condition_action_bits(encode_percept(self.spec, obs, reward))

    def update_percept_symbol(self, symbol: int) -> None:
        nb = self.spec.percept_bits
        self.tree.update_percept_bits([(symbol >> (nb - 1 - i)) & 1 for i in range(nb)])

    def sample_percept_symbol(self, rng: np.random.Generator) -> int:
        """Sample a percept for planning (fast sampler; revert it afterwards)."""
        nb = self.spec.percept_bits
        self.tree.reserve(nb)
        return int(_sample_bits_fast(self.tree._state(), self.depth, nb, rng))

    def sample_percept(self, rng: np.random.Generator) -> tuple[int, int]:
        """Sample (observation, reward); out-of-range rewards are clamped."""
        return self.spec.split_symbol(self.sample_percept_symbol(rng))

    def percept_symbols(self):
        return range(1 << self.spec.percept_bits)

    def block_logprob(self) -> float:
        return self.tree.block_logprob()

    @property
    def journal_depth(self) -> int:
        return self.tree.journal_depth

    def revert(self, k: int = 1) -> None:
        self.tree.revert(k)

    def revert_to(self, depth: int) -> None:
        self.tree.revert_to(depth)

    def commit(self) -> None:
        self.tree.commit()

    def copy(self) -> "CtwModel":
        return CtwModel(self.spec, self.depth, self.tree.copy())

    def percept_probability(self, symbol: int) -> float:
        """Conditional probability of a whole percept, by block-probability ratio."""
        before = self.tree.block_logprob()
        self.update_percept_symbol(symbol)
        after = self.tree.block_logprob()
        self.tree.revert(self.spec.percept_bits)
        return math.exp(after - before)


def ctw_block_logprob(tree: ContextTree) -> float:
    return tree.block_logprob()


def percept_bits_of(spec: SpaceSpec, symbol: int) -> tuple[int, ...]:
    nb = spec.percept_bits
    return tuple((symbol >> (nb - 1 - i)) & 1 for i in range(nb))


def symbol_of(bits) -> int:
    return bits_to_int(bits)
