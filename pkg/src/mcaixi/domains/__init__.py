"""Test environments and their optimal-average-reward oracles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from ..codec import SpaceSpec
from . import cheese, grid, kuhn, pacman, rps, tictactoe, tiger
from .base import Environment, NoKnownOptimum, UnknownDomain, solve_average_reward


@dataclass(frozen=True)
class DomainInfo:
    """One catalog row: sizes, bit widths and the suggested depth / horizon."""

    name: str
    title: str
    spec: SpaceSpec
    depth: int
    horizon: int
    factory: Callable[..., Environment]
    oracle: Callable[[], float] | None

    @property
    def action_count(self) -> int:
        return self.spec.action_count

    @property
    def obs_count(self) -> int:
        return self.spec.obs_count

    @property
    def widths(self) -> tuple[int, int, int]:
        return self.spec.action_bits, self.spec.obs_bits, self.spec.reward_bits


CATALOG: dict[str, DomainInfo] = {
    d.name: d
    for d in (
        DomainInfo("cheese", "Cheese Maze", cheese.SPEC, 96, 8, cheese.CheeseMaze, cheese.optimum),
        DomainInfo("tiger", "Tiger", tiger.SPEC, 96, 5, tiger.Tiger, tiger.optimum),
        DomainInfo("grid", "4x4 Grid", grid.SPEC, 96, 12, grid.Grid, grid.optimum),
        DomainInfo("tictactoe", "TicTacToe", tictactoe.SPEC, 64, 9, tictactoe.TicTacToe,
                   tictactoe.optimum),
        DomainInfo("rps", "Biased Rock-Paper-Scissor", rps.SPEC, 32, 4, rps.BiasedRps, rps.optimum),
        DomainInfo("kuhn", "Kuhn Poker", kuhn.SPEC, 42, 2, kuhn.KuhnPoker, kuhn.optimum),
        DomainInfo("pacman", "Pacman", pacman.SPEC, 64, 8, pacman.Pacman, None),
    )
}

ALIASES = {"cheese_maze": "cheese", "cheesemaze": "cheese", "biased_rps": "rps",
           "kuhn_poker": "kuhn", "4x4_grid": "grid", "extended_tiger": "tiger"}


def domain_info(name: str) -> DomainInfo:
    key = name.strip().lower().replace("-", "_")
    key = ALIASES.get(key, key)
    if key not in CATALOG:
        raise UnknownDomain(f"unknown domain {name!r}; choose from {', '.join(CATALOG)}")
    return CATALOG[key]


def make_env(name: str, seed=None) -> Environment:
    return domain_info(name).factory(seed)


def env_step(env: Environment, action: int) -> tuple[int, int]:
    return env.step(action)


@lru_cache(maxsize=None)
def optimal_average_reward(name: str) -> float:
    info = domain_info(name)
    if info.oracle is None:
        raise NoKnownOptimum(f"{info.title} has no known optimal average reward")
    return info.oracle()


__all__ = [
    "CATALOG", "DomainInfo", "Environment", "NoKnownOptimum", "UnknownDomain",
    "domain_info", "env_step", "make_env", "optimal_average_reward", "solve_average_reward",
]
