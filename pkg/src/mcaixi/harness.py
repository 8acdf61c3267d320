"""Experiment protocol: train once per seed, evaluate forks at checkpoints.

Config files are line based: ``key = value`` pairs under ``[agent]`` and
``[experiment]`` headers.  Keys before any header are looked up in both
sections.  ``#`` starts a comment.
"""

from __future__ import annotations

import copy
import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .agent import Agent, AgentConfig, ConfigError
from .domains import NoKnownOptimum, domain_info, optimal_average_reward

log = logging.getLogger(__name__)

CSV_HEADER = ("domain", "seed", "experience", "normalized_reward", "search_time_s", "simulations")
DEFAULT_CHECKPOINTS = (100, 1000, 10000)


@dataclass(frozen=True)
class ExperimentSpec:
    agent: AgentConfig
    checkpoints: tuple[int, ...] = DEFAULT_CHECKPOINTS
    eval_cycles: int = 2000
    repeats: int = 1
    output: str = "results.csv"
    optimum_estimate: float | None = None  # normaliser for domains without an oracle
    workers: int = 1

    def __post_init__(self):
        cps = tuple(int(c) for c in self.checkpoints)
        object.__setattr__(self, "checkpoints", cps)
        if not cps:
            raise ConfigError("at least one checkpoint is required")
        if cps[0] < 0 or any(b <= a for a, b in zip(cps, cps[1:])):
            raise ConfigError("checkpoints must be non-negative and strictly increasing")
        if self.eval_cycles < 1:
            raise ConfigError("eval_cycles must be >= 1")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.optimum_estimate is not None and not (
                math.isfinite(self.optimum_estimate) and self.optimum_estimate != 0):
            raise ConfigError("optimum_estimate must be finite and non-zero")

    @property
    def seeds(self) -> list[int]:
        return [self.agent.seed + i for i in range(self.repeats)]


@dataclass
class ResultRow:
    domain: str
    seed: int
    experience: int
    normalized_reward: float
    search_time_s: float
    simulations: int
    mean_reward: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.normalized_reward):
            raise ValueError("normalized reward must be finite")


# -- config text -----------------------------------------------------------------

_EXPERIMENT_KEYS = {
    "checkpoints": "list", "eval_cycles": "int", "repeats": "int", "output": "str",
    "optimum_estimate": "float", "workers": "int",
}
_AGENT_TYPES = {
    "domain": "str", "depth": "int", "horizon": "int", "simulations": "int",
    "exploration": "float", "eps0": "float", "gamma": "float", "eps_min": "float",
    "seed": "int", "learn_in_eval": "bool",
}


def _convert(kind: str, raw: str):
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "list":
        return tuple(int(float(x)) for x in raw.replace(",", " ").split())
    return raw


def parse_config(text: str) -> ExperimentSpec:
    section = None
    values: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header")
            section = line[1:-1].strip().lower()
            if section not in ("agent", "experiment"):
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.lower().replace("-", "_")
        table = {"agent": _AGENT_TYPES, "experiment": _EXPERIMENT_KEYS}.get(
            section, {**_AGENT_TYPES, **_EXPERIMENT_KEYS})
        if key not in table:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = (_convert(table[key], raw), lineno)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    if "domain" not in values:
        raise ConfigError("config must name a domain")

    def build(keys, make):
        kw = {k: values[k][0] for k in keys if k in values}
        try:
            return make(**kw)
        except (ConfigError, KeyError, ValueError) as exc:
            lines = sorted(values[k][1] for k in kw)
            where = _blame(exc, kw, values) or (f"lines {lines[0]}-{lines[-1]}" if lines else "config")
            raise ConfigError(f"{where}: {exc}") from None

    agent = build(_AGENT_TYPES, lambda **kw: AgentConfig.for_domain(kw.pop("domain"), **kw))
    return build(_EXPERIMENT_KEYS, lambda **kw: ExperimentSpec(agent=agent, **kw))


def _blame(exc, kw, values) -> str | None:
    msg = str(exc)
    for k in kw:
        if k in msg or k.replace("_", " ") in msg:
            return f"line {values[k][1]}"
    return None


def serialize_config(spec: ExperimentSpec) -> str:
    a = spec.agent
    lines = ["[agent]"]
    for name in _AGENT_TYPES:
        value = getattr(a, name)
        lines.append(f"{name} = {_fmt(value)}")
    lines.append("")
    lines.append("[experiment]")
    lines.append("checkpoints = " + ", ".join(str(c) for c in spec.checkpoints))
    lines.append(f"eval_cycles = {spec.eval_cycles}")
    lines.append(f"repeats = {spec.repeats}")
    lines.append(f"output = {spec.output}")
    if spec.optimum_estimate is not None:
        lines.append(f"optimum_estimate = {_fmt(spec.optimum_estimate)}")
    lines.append(f"workers = {spec.workers}")
    return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


# -- running ---------------------------------------------------------------------

def normalizer(spec: ExperimentSpec) -> float:
    try:
        opt = optimal_average_reward(spec.agent.domain)
    except NoKnownOptimum:
        opt = spec.optimum_estimate if spec.optimum_estimate is not None else 1.0
        log.info("%s: no oracle optimum; normalising by estimate %r", spec.agent.domain, opt)
        return opt
    log.info("%s: oracle optimal average reward %r", spec.agent.domain, opt)
    return opt


def run_seed(spec: ExperimentSpec, seed: int, denom: float, emit=None,
             keep: list | None = None) -> list[ResultRow]:
    """One continuous training run; each checkpoint evaluates a fork.

    The training agent and environment are appended to ``keep`` when given.
    """
    agent = Agent(replace(spec.agent, seed=seed))
    env = agent.make_env()
    name = domain_info(spec.agent.domain).name
    rows = []
    for cp in spec.checkpoints:
        agent.run_training(env, cp - agent.train_steps)
        probe, probe_env = agent.fork(), copy.deepcopy(env)
        recs: list = []
        mean = probe.run_greedy_eval(probe_env, spec.eval_cycles, records=recs)
        times = [r.search_time for r in recs if r.simulations]
        sims = [r.simulations for r in recs if r.simulations]
        row = ResultRow(
            domain=name, seed=seed, experience=cp,
            normalized_reward=mean / denom,
            search_time_s=float(np.mean(times)) if times else 0.0,
            simulations=int(round(np.mean(sims))) if sims else 0,
            mean_reward=mean,
        )
        rows.append(row)
        if emit is not None:
            emit(row)
    if keep is not None:
        keep.append((agent, env))
    return rows


def run_experiment(spec: ExperimentSpec, sink=None, progress=None) -> list[ResultRow]:
    """Run every seed; rows are written to ``sink`` (if given) as they finish."""
    denom = normalizer(spec)
    writer = CsvSink(sink) if sink is not None else None

    def emit(row):
        if progress is not None:
            progress(row)

    if spec.workers == 1:
        rows = []
        for seed in spec.seeds:
            for row in run_seed(spec, seed, denom, emit):
                rows.append(row)
                if writer:
                    writer.write(row)
        return rows
    with ThreadPoolExecutor(spec.workers) as pool:
        futures = [pool.submit(run_seed, spec, s, denom, emit) for s in spec.seeds]
        rows = []
        for fut in futures:  # merge in seed order so output is deterministic
            for row in fut.result():
                rows.append(row)
                if writer:
                    writer.write(row)
    return rows


class CsvSink:
    """Single-writer CSV output; the header goes out before the first row."""

    def __init__(self, stream):
        self.stream = stream
        self.writer = csv.writer(stream, lineterminator="\n")
        self.writer.writerow(CSV_HEADER)
        stream.flush()

    def write(self, row: ResultRow) -> None:
        self.writer.writerow(_csv_fields(row))
        self.stream.flush()


def _csv_fields(row: ResultRow):
    return (row.domain, row.seed, row.experience, repr(float(row.normalized_reward)),
            repr(float(row.search_time_s)), row.simulations)


def emit_csv(rows, sink) -> None:
    out = CsvSink(sink)
    for row in rows:
        out.write(row)


def read_csv(stream) -> list[ResultRow]:
    reader = csv.reader(stream)
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    return [
        ResultRow(d, int(s), int(e), float(n), float(t), int(m))
        for d, s, e, n, t, m in reader
    ]
