"""The interaction loop: epsilon-greedy training, greedy evaluation, snapshots."""

from __future__ import annotations

import copy
import io
import json
import math
import struct
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from .codec import History, SpaceSpec
from .ctw import ContextTree, CtwModel, SnapshotError
from .domains import domain_info, make_env
from .uct import PlannerConfig, rho_uct_search

AGENT_MAGIC = b"MCAG"
AGENT_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AgentConfig:
    domain: str
    depth: int
    horizon: int
    simulations: int = 100
    exploration: float = math.sqrt(2.0)
    eps0: float = 1.0
    gamma: float = 0.99999
    eps_min: float = 0.05
    seed: int = 0
    learn_in_eval: bool = True

    def __post_init__(self):
        domain_info(self.domain)
        if self.depth < 1 or self.horizon < 1 or self.simulations < 1:
            raise ConfigError("depth, horizon and simulations must all be >= 1")
        if not self.exploration > 0:
            raise ConfigError("exploration constant must be positive")
        if not 0 <= self.eps_min <= self.eps0 <= 1:
            raise ConfigError("need 0 <= eps_min <= eps0 <= 1")
        if not 0 < self.gamma <= 1:
            raise ConfigError("need 0 < gamma <= 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")

    @classmethod
    def for_domain(cls, domain: str, **overrides) -> "AgentConfig":
        """Config with the catalog's suggested depth and horizon."""
        info = domain_info(domain)
        overrides.setdefault("depth", info.depth)
        overrides.setdefault("horizon", info.horizon)
        return cls(domain=info.name, **overrides)

    def epsilon(self, t: int) -> float:
        return max(self.eps_min, self.eps0 * self.gamma**t)


@dataclass
class CycleRecord:
    cycle: int
    action: int
    obs: int
    reward: int
    epsilon: float
    was_random: bool
    search_time: float
    simulations: int


class Agent:
    """A context-tree model plus planner acting in one domain.

    Three generators are spawned from the master seed: one for the
    exploration coin and random actions, one for the planner, and one handed
    to the environment by ``make_env``.  Changing the simulation budget
    therefore never changes what the environment does.
    """

    def __init__(self, config: AgentConfig):
        self.config = config
        self.spec: SpaceSpec = domain_info(config.domain).spec
        policy, planner, env = np.random.SeedSequence(config.seed).spawn(3)
        self.policy_rng = np.random.default_rng(policy)
        self.planner_rng = np.random.default_rng(planner)
        self._env_seed = env
        self.model = CtwModel(self.spec, config.depth)
        self.history = History(self.spec)
        self.cycle = 0
        self.train_steps = 0
        self.planner = PlannerConfig.for_space(
            self.spec, horizon=config.horizon, simulations=config.simulations,
            exploration=config.exploration)

    def make_env(self):
        return make_env(self.config.domain, self._env_seed)

    @property
    def epsilon(self) -> float:
        return self.config.epsilon(self.train_steps)

    # -- acting -------------------------------------------------------------

    def search(self):
        return rho_uct_search(self.model, self.planner, self.planner_rng)

    def run_cycle(self, env, mode: str = "explore", learn: bool = True) -> CycleRecord:
        if mode not in ("explore", "greedy"):
            raise ValueError(f"unknown mode {mode!r}")
        eps = self.epsilon if mode == "explore" else 0.0
        search_time, sims = 0.0, 0
        was_random = mode == "explore" and self.policy_rng.random() < eps
        if was_random:
            action = int(self.policy_rng.random() * self.spec.action_count)
        else:
            t0 = time.perf_counter()
            result = self.search()
            search_time = time.perf_counter() - t0
            action, sims = result.action, result.simulations
        self.model.condition_action(action)
        self.history.append_action(action)
        obs, reward = env.step(action)
        if learn:
            self.model.update_percept(obs, reward)
        else:
            self.model.observe_percept(obs, reward)
        self.history.append_percept(obs, reward)
        self.model.commit()
        if mode == "explore":
            self.train_steps += 1
        self.cycle += 1
        return CycleRecord(self.cycle, action, obs, reward, eps, bool(was_random),
                           search_time, sims)

    def run_training(self, env, cycles: int) -> list[CycleRecord]:
        if cycles < 0:
            raise ValueError("cycles must be non-negative")
        return [self.run_cycle(env, "explore") for _ in range(cycles)]

    def run_greedy_eval(self, env, cycles: int = 2000, learn: bool | None = None,
                        records: list | None = None) -> float:
        """Mean reward per cycle of greedy play (the model keeps learning by default)."""
        if cycles < 1:
            raise ValueError("evaluation needs at least one cycle")
        learn = self.config.learn_in_eval if learn is None else learn
        total = 0
        for _ in range(cycles):
            rec = self.run_cycle(env, "greedy", learn=learn)
            total += rec.reward
            if records is not None:
                records.append(rec)
        return total / cycles

    def fork(self) -> "Agent":
        """Independent copy of the agent, its generators included."""
        return copy.deepcopy(self)

    # -- snapshots --------------------------------------------------------------

    def to_bytes(self) -> bytes:
        if self.model.journal_depth:
            raise SnapshotError("agent model has uncommitted updates")
        meta = {
            "config": asdict(self.config),
            "cycle": self.cycle,
            "train_steps": self.train_steps,
            "policy_rng": self.policy_rng.bit_generator.state,
            "planner_rng": self.planner_rng.bit_generator.state,
            "env_seed": {"entropy": self._env_seed.entropy,
                         "spawn_key": list(self._env_seed.spawn_key)},
        }
        blob = json.dumps(meta, sort_keys=True, default=int).encode()
        hist = _history_array(self.history)
        tree = self.model.tree.to_bytes()
        out = io.BytesIO()
        out.write(AGENT_MAGIC)
        out.write(struct.pack("<HQQQ", AGENT_VERSION, len(blob), hist.shape[0], len(tree)))
        out.write(blob)
        out.write(hist.astype("<i8").tobytes())
        out.write(tree)
        return out.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Agent":
        head = 4 + struct.calcsize("<HQQQ")
        if len(data) < head or data[:4] != AGENT_MAGIC:
            raise SnapshotError("not an agent snapshot")
        version, n_blob, n_hist, n_tree = struct.unpack("<HQQQ", data[4:head])
        if version != AGENT_VERSION:
            raise SnapshotError(f"unsupported agent snapshot version {version}")
        if len(data) != head + n_blob + 24 * n_hist + n_tree:
            raise SnapshotError("truncated or oversized agent snapshot")
        try:
            meta = json.loads(data[head : head + n_blob])
            cfg = AgentConfig(**{f.name: meta["config"][f.name] for f in fields(AgentConfig)})
        except (ValueError, KeyError, TypeError) as exc:
            raise SnapshotError(f"bad agent metadata: {exc}") from exc
        pos = head + n_blob
        hist = np.frombuffer(data, dtype="<i8", count=3 * n_hist, offset=pos).reshape(-1, 3)
        tree = ContextTree.from_bytes(data[pos + 24 * n_hist :])
        if tree.depth != cfg.depth:
            raise SnapshotError("tree depth disagrees with the config")
        agent = cls(cfg)
        agent.model = CtwModel(agent.spec, cfg.depth, tree)
        agent.cycle = int(meta["cycle"])
        agent.train_steps = int(meta["train_steps"])
        agent.policy_rng.bit_generator.state = meta["policy_rng"]
        agent.planner_rng.bit_generator.state = meta["planner_rng"]
        es = meta["env_seed"]
        agent._env_seed = np.random.SeedSequence(es["entropy"], spawn_key=tuple(es["spawn_key"]))
        for action, obs, reward in hist.tolist():
            agent.history.append_action(action)
            agent.history.append_percept(obs, reward)
        if tree.bits_seen != len(agent.history.bits):
            raise SnapshotError("history length disagrees with the tree")
        return agent


def _history_array(history: History) -> np.ndarray:
    rows = []
    action = None
    for kind, value in history.symbols:
        if kind == "a":
            action = value
        else:
            rows.append((action, value[0], value[1]))
    return np.array(rows, dtype=np.int64).reshape(-1, 3)


def save_snapshot(agent: Agent, sink) -> None:
    sink.write(agent.to_bytes())


def load_snapshot(source) -> Agent:
    return Agent.from_bytes(source.read())
