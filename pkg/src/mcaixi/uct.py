"""rho-UCT: Monte Carlo tree search over histories against an environment model.

Two implementations of the same algorithm live here:

* ``sample_trajectory`` / ``select_ucb_action`` / ``rollout`` work with any
  object following the model protocol (``spec``, ``condition_action``,
  ``sample_percept_symbol``, ``journal_depth``, ``revert_to``).
* ``_run_simulations`` is a compiled version specialised to ``CtwModel``.

Both draw random numbers in the same order from a ``numpy`` Generator, so
with equal seeds they build identical search trees.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numba
import numpy as np

from .ctw import NR, CtwModel, _condition_int, _revert, _sample_bits_fast

DECISION = 0
CHANCE = 1


class PlannerError(ValueError):
    pass


@dataclass(frozen=True)
class PlannerConfig:
    horizon: int
    simulations: int = 100
    exploration: float = math.sqrt(2.0)
    reward_min: float = 0.0
    reward_max: float = 1.0
    time_limit: float | None = None  # seconds; used instead of the count when set

    def __post_init__(self):
        if self.horizon < 1:
            raise PlannerError("horizon must be >= 1")
        if self.simulations < 1 and not self.time_limit:
            raise PlannerError("simulation budget must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise PlannerError("time budget must be positive")
        if self.exploration <= 0:
            raise PlannerError("exploration constant must be positive")
        if not self.reward_min < self.reward_max:
            raise PlannerError("reward bounds need reward_min < reward_max")

    @classmethod
    def for_space(cls, spec, **kw) -> "PlannerConfig":
        return cls(reward_min=spec.reward_min, reward_max=spec.reward_max, **kw)


@dataclass
class SearchNode:
    kind: int
    visits: int = 0
    value: float = 0.0
    children: dict = field(default_factory=dict)

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children.values())


@dataclass
class SearchResult:
    action: int
    root_values: dict[int, float]
    root_visits: dict[int, int]
    simulations: int
    elapsed: float
    root_value: float
    root: SearchNode | None = None


def _reward_of(spec, symbol: int) -> float:
    return float(spec.split_symbol(symbol)[1])


# ---------------------------------------------------------------------------
# reference implementation


def select_ucb_action(node: SearchNode, cfg: PlannerConfig, m_remaining: int,
                      rng: np.random.Generator, n_actions: int) -> int:
    unexplored = [a for a in range(n_actions)
                  if a not in node.children or node.children[a].visits == 0]
    if unexplored:
        a = unexplored[int(rng.random() * len(unexplored))]
        node.children.setdefault(a, SearchNode(CHANCE))
        return a
    scale = m_remaining * (cfg.reward_max - cfg.reward_min)
    log_t = math.log(node.visits)
    best = -math.inf
    ties: list[int] = []
    for a in range(n_actions):
        ch = node.children[a]
        score = ch.value / scale + cfg.exploration * math.sqrt(log_t / ch.visits)
        if score > best:
            best = score
            ties = [a]
        elif score == best:
            ties.append(a)
    if len(ties) == 1:
        return ties[0]
    return ties[int(rng.random() * len(ties))]


def rollout(model, m_remaining: int, rng: np.random.Generator) -> float:
    """Uniform random actions to the horizon; returns the summed reward."""
    total = 0.0
    n_actions = model.spec.action_count
    for _ in range(m_remaining):
        model.condition_action(int(rng.random() * n_actions))
        total += _reward_of(model.spec, model.sample_percept_symbol(rng))
    return total


def sample_trajectory(node: SearchNode, model, m_remaining: int,
                      rng: np.random.Generator, cfg: PlannerConfig,
                      is_root: bool = False) -> float:
    """One simulation from ``node``; returns the sampled reward to the horizon.

    A root node always selects an action (it is never rolled out), so one
    simulation is enough to have a candidate action.
    """
    if m_remaining == 0:
        return 0.0
    if node.kind == CHANCE:
        symbol = model.sample_percept_symbol(rng)
        child = node.children.get(symbol)
        if child is None:
            child = node.children[symbol] = SearchNode(DECISION)
        reward = _reward_of(model.spec, symbol) + sample_trajectory(
            child, model, m_remaining - 1, rng, cfg)
    elif node.visits == 0 and not is_root:
        reward = rollout(model, m_remaining, rng)
    else:
        a = select_ucb_action(node, cfg, m_remaining, rng, model.spec.action_count)
        model.condition_action(a)
        reward = sample_trajectory(node.children[a], model, m_remaining, rng, cfg)
    node.value = (reward + node.visits * node.value) / (node.visits + 1)
    node.visits += 1
    return reward


def best_action(root: SearchNode, rng: np.random.Generator) -> int:
    visited = [(a, ch) for a, ch in sorted(root.children.items()) if ch.visits > 0]
    if not visited:
        raise PlannerError("root has no visited child")
    top = max(ch.value for _, ch in visited)
    ties = [a for a, ch in visited if ch.value == top]
    if len(ties) == 1:
        return ties[0]
    return ties[int(rng.random() * len(ties))]


def _search_reference(model, cfg: PlannerConfig, rng, hook=None) -> SearchResult:
    root = SearchNode(DECISION)
    start_depth = model.journal_depth
    t0 = time.perf_counter()
    sims = 0
    while True:
        sample_trajectory(root, model, cfg.horizon, rng, cfg, is_root=True)
        model.revert_to(start_depth)
        sims += 1
        if hook is not None:
            hook(sims, {a: ch.value for a, ch in root.children.items() if ch.visits})
        if cfg.time_limit is not None:
            if time.perf_counter() - t0 >= cfg.time_limit:
                break
        elif sims >= cfg.simulations:
            break
    action = best_action(root, rng)
    return SearchResult(
        action=action,
        root_values={a: ch.value for a, ch in root.children.items() if ch.visits},
        root_visits={a: ch.visits for a, ch in root.children.items() if ch.visits},
        simulations=sims,
        elapsed=time.perf_counter() - t0,
        root_value=root.value,
        root=root,
    )


# ---------------------------------------------------------------------------
# compiled implementation for the context tree model


@numba.njit(cache=True, nogil=True)
def _symbol_reward(sym, space):
    code = sym & ((1 << space[3]) - 1)
    r = code - space[4]
    if r < space[5]:
        r = space[5]
    elif r > space[6]:
        r = space[6]
    return float(r)


@numba.njit(cache=True, nogil=True)
def _new_node(nodes, k):
    kind, visits, value, act, first, nxt, key, smeta = nodes
    n = smeta[0]
    smeta[0] = n + 1
    kind[n] = k
    visits[n] = 0
    value[n] = 0.0
    for a in range(act.shape[1]):
        act[n, a] = -1
    first[n] = -1
    nxt[n] = -1
    key[n] = -1
    return n


@numba.njit(cache=True, nogil=True)
def _rollout_compiled(st, depth, space, m_rem, rng):
    total = 0.0
    for _ in range(m_rem):
        a = int(rng.random() * space[0])
        _condition_int(st, a, space[1])
        sym = _sample_bits_fast(st, depth, space[2], rng)
        total += _symbol_reward(sym, space)
    return total


@numba.njit(cache=True, nogil=True)
def _run_simulations(st, depth, space, nodes, n_sims, horizon, c, rng, stack, stack_r):
    """Run ``n_sims`` simulations from root node 0; the tree is rolled back after each."""
    kind, visits, value, act, first, nxt, key, smeta = nodes
    meta = st[5]
    n_actions = space[0]
    width = float(space[6] - space[5])
    for _ in range(n_sims):
        start = meta[NR]
        node = 0
        m_rem = horizon
        sp = 0
        leaf = 0.0
        while True:
            if m_rem == 0:
                leaf = 0.0
                break
            if kind[node] == CHANCE:
                sym = _sample_bits_fast(st, depth, space[2], rng)
                r = _symbol_reward(sym, space)
                ch = first[node]
                while ch >= 0 and key[ch] != sym:
                    ch = nxt[ch]
                if ch < 0:
                    ch = _new_node(nodes, DECISION)
                    key[ch] = sym
                    nxt[ch] = first[node]
                    first[node] = ch
                stack[sp] = node
                stack_r[sp] = r
                sp += 1
                node = ch
                m_rem -= 1
            elif visits[node] == 0 and node != 0:
                leaf = _rollout_compiled(st, depth, space, m_rem, rng)
                stack[sp] = node
                stack_r[sp] = 0.0
                sp += 1
                break
            else:
                # UCB action selection
                n_unexp = 0
                for a in range(n_actions):
                    ch = act[node, a]
                    if ch < 0 or visits[ch] == 0:
                        n_unexp += 1
                if n_unexp > 0:
                    pick = int(rng.random() * n_unexp)
                    chosen = -1
                    for a in range(n_actions):
                        ch = act[node, a]
                        if ch < 0 or visits[ch] == 0:
                            if pick == 0:
                                chosen = a
                                break
                            pick -= 1
                    if act[node, chosen] < 0:
                        act[node, chosen] = _new_node(nodes, CHANCE)
                else:
                    scale = m_rem * width
                    log_t = math.log(visits[node])
                    best = -np.inf
                    n_ties = 0
                    for a in range(n_actions):
                        ch = act[node, a]
                        score = value[ch] / scale + c * math.sqrt(log_t / visits[ch])
                        if score > best:
                            best = score
                            n_ties = 1
                        elif score == best:
                            n_ties += 1
                    pick = 0
                    if n_ties > 1:
                        pick = int(rng.random() * n_ties)
                    chosen = -1
                    for a in range(n_actions):
                        ch = act[node, a]
                        score = value[ch] / scale + c * math.sqrt(log_t / visits[ch])
                        if score == best:
                            if pick == 0:
                                chosen = a
                                break
                            pick -= 1
                _condition_int(st, chosen, space[1])
                stack[sp] = node
                stack_r[sp] = 0.0
                sp += 1
                node = act[node, chosen]
        acc = leaf
        for i in range(sp - 1, -1, -1):
            n = stack[i]
            acc += stack_r[i]
            value[n] = (acc + visits[n] * value[n]) / (visits[n] + 1)
            visits[n] += 1
        _revert(st, meta[NR] - start)


class CompiledSearch:
    """Search-tree storage for the compiled planner; grows between chunks."""

    def __init__(self, model: CtwModel, cfg: PlannerConfig, capacity: int):
        self.model = model
        self.cfg = cfg
        spec = model.spec
        self.space = np.array(
            [spec.action_count, spec.action_bits, spec.percept_bits, spec.reward_bits,
             spec.reward_offset, int(cfg.reward_min), int(cfg.reward_max)],
            dtype=np.int64,
        )
        if cfg.reward_min != int(cfg.reward_min) or cfg.reward_max != int(cfg.reward_max):
            raise PlannerError("compiled planner needs integer reward bounds")
        self.nodes = self._alloc(max(capacity, 4), spec.action_count)
        self.nodes[7][0] = 0
        _new_node(self.nodes, DECISION)
        self.stack = np.zeros(2 * cfg.horizon + 2, dtype=np.int64)
        self.stack_r = np.zeros(2 * cfg.horizon + 2)

    @staticmethod
    def _alloc(cap, n_actions):
        return (
            np.zeros(cap, dtype=np.int8),
            np.zeros(cap, dtype=np.int64),
            np.zeros(cap),
            np.full((cap, n_actions), -1, dtype=np.int32),
            np.full(cap, -1, dtype=np.int32),
            np.full(cap, -1, dtype=np.int32),
            np.full(cap, -1, dtype=np.int64),
            np.zeros(1, dtype=np.int64),
        )

    def _ensure(self, extra: int) -> None:
        need = int(self.nodes[7][0]) + extra
        cap = self.nodes[0].shape[0]
        if need <= cap:
            return
        new = self._alloc(max(need, 2 * cap), self.nodes[3].shape[1])
        for old, fresh in zip(self.nodes[:7], new[:7]):
            fresh[:cap] = old
        new[7][0] = self.nodes[7][0]
        self.nodes = new

    def run(self, n_sims: int, rng) -> None:
        cfg = self.cfg
        spec = self.model.spec
        self._ensure(2 * n_sims + 2)
        tree = self.model.tree
        h = cfg.horizon
        tree.reserve(h * spec.percept_bits, h * spec.action_bits,
                     records=h * (spec.percept_bits + 1))
        _run_simulations(tree._state(), tree.depth, self.space, self.nodes, n_sims,
                         h, float(cfg.exploration), rng, self.stack, self.stack_r)

    def root_stats(self):
        kind, visits, value, act = self.nodes[:4]
        vals, vis = {}, {}
        for a in range(act.shape[1]):
            ch = act[0, a]
            if ch >= 0 and visits[ch] > 0:
                vals[a] = float(value[ch])
                vis[a] = int(visits[ch])
        return vals, vis

    def to_search_node(self, n: int = 0) -> SearchNode:
        kind, visits, value, act, first, nxt, key, smeta = self.nodes
        out = SearchNode(int(kind[n]), int(visits[n]), float(value[n]))
        if kind[n] == DECISION:
            for a in range(act.shape[1]):
                if act[n, a] >= 0:
                    out.children[a] = self.to_search_node(int(act[n, a]))
        else:
            ch = first[n]
            while ch >= 0:
                out.children[int(key[ch])] = self.to_search_node(int(ch))
                ch = nxt[ch]
        return out


def _search_compiled(model: CtwModel, cfg: PlannerConfig, rng, hook=None,
                     keep_tree: bool = False) -> SearchResult:
    t0 = time.perf_counter()
    if cfg.time_limit is None:
        search = CompiledSearch(model, cfg, 2 * cfg.simulations + 2)
        if hook is None:
            search.run(cfg.simulations, rng)
            sims = cfg.simulations
        else:
            sims = 0
            while sims < cfg.simulations:
                k = min(64, cfg.simulations - sims)
                search.run(k, rng)
                sims += k
                hook(sims, search.root_stats()[0])
    else:
        search = CompiledSearch(model, cfg, 1024)
        sims = 0
        chunk = 8
        while True:
            search.run(chunk, rng)
            sims += chunk
            if hook is not None:
                hook(sims, search.root_stats()[0])
            if time.perf_counter() - t0 >= cfg.time_limit:
                break
            chunk = min(2 * chunk, 256)
    vals, vis = search.root_stats()
    if not vals:
        raise PlannerError("root has no visited child")
    top = max(vals.values())
    ties = [a for a in sorted(vals) if vals[a] == top]
    action = ties[0] if len(ties) == 1 else ties[int(rng.random() * len(ties))]
    return SearchResult(
        action=action,
        root_values=vals,
        root_visits=vis,
        simulations=sims,
        elapsed=time.perf_counter() - t0,
        root_value=float(search.nodes[2][0]),
        root=search.to_search_node() if keep_tree else None,
    )


def rho_uct_search(model, cfg: PlannerConfig, rng: np.random.Generator, *,
                   hook=None, compiled: bool | None = None,
                   keep_tree: bool = False) -> SearchResult:
    """Plan from the model's current (committed) history and return the best action.

    The model is restored to its entry state before returning.  ``compiled``
    defaults to True for context-tree models.
    """
    if compiled is None:
        compiled = isinstance(model, CtwModel)
    if compiled:
        if not isinstance(model, CtwModel):
            raise PlannerError("the compiled planner only supports CtwModel")
        return _search_compiled(model, cfg, rng, hook, keep_tree)
    return _search_reference(model, cfg, rng, hook)


# ---------------------------------------------------------------------------
# exact expectimax (oracle)

EXPECTIMAX_LIMIT = 10**6


def expectimax_exact(model, horizon: int) -> tuple[float, int]:
    """Full-width expectimax value and optimal first action.

    Percept probabilities come from block-probability ratios of the model;
    the model must offer ``percept_symbols()``, ``update_percept_symbol``
    and ``block_logprob`` in addition to the planning protocol.
    """
    spec = model.spec
    symbols = list(model.percept_symbols())
    size = (spec.action_count * len(symbols)) ** horizon
    if size > EXPECTIMAX_LIMIT:
        raise PlannerError(f"expectimax tree of size {size} exceeds {EXPECTIMAX_LIMIT}")

    def value(m: int) -> tuple[float, int]:
        if m == 0:
            return 0.0, -1
        best, best_a = -math.inf, -1
        for a in range(spec.action_count):
            depth0 = model.journal_depth
            model.condition_action(a)
            base = model.block_logprob()
            q = 0.0
            for sym in symbols:
                d1 = model.journal_depth
                model.update_percept_symbol(sym)
                p = math.exp(model.block_logprob() - base)
                if p > 0.0:
                    q += p * (_reward_of(spec, sym) + value(m - 1)[0])
                model.revert_to(d1)
            model.revert_to(depth0)
            if q > best:
                best, best_a = q, a
        return best, best_a

    return value(horizon)
