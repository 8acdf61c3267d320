"""Command line front end: run experiments, print oracle optima, self-test."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .agent import ConfigError
from .domains import CATALOG, NoKnownOptimum, UnknownDomain, domain_info, optimal_average_reward
from .harness import ExperimentSpec, parse_config, run_experiment


def _checkpoint_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(float(x)) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad checkpoint list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcaixi", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train and evaluate an agent, writing CSV")
    run.add_argument("--config", required=True, help="experiment config file")
    run.add_argument("--domain")
    run.add_argument("--depth", type=int)
    run.add_argument("--horizon", type=int)
    run.add_argument("--sims", type=int, help="simulations per cycle")
    run.add_argument("--ucb-c", type=float, help="UCB exploration constant")
    run.add_argument("--seed", type=int)
    run.add_argument("--checkpoints", type=_checkpoint_list, help="e.g. 100,1000,10000")
    run.add_argument("--eval-cycles", type=int)
    run.add_argument("--out", help="CSV path ('-' for stdout)")

    orc = sub.add_parser("oracle", help="print a domain's optimal average reward")
    orc.add_argument("--domain", required=True)

    sub.add_parser("selftest", help="run the enumeration-oracle checks")
    sub.add_parser("domains", help="list the domain catalog")
    return p


def _apply_overrides(spec: ExperimentSpec, args) -> ExperimentSpec:
    agent = spec.agent
    if args.domain:
        info = domain_info(args.domain)
        agent = replace(agent, domain=info.name, depth=info.depth, horizon=info.horizon)
    changes = {k: v for k, v in (("depth", args.depth), ("horizon", args.horizon),
                                 ("simulations", args.sims), ("exploration", args.ucb_c),
                                 ("seed", args.seed)) if v is not None}
    agent = replace(agent, **changes)
    top = {"agent": agent}
    if args.checkpoints is not None:
        top["checkpoints"] = args.checkpoints
    if args.eval_cycles is not None:
        top["eval_cycles"] = args.eval_cycles
    if args.out is not None:
        top["output"] = args.out
    return replace(spec, **top)


def cmd_run(args) -> int:
    with open(args.config) as fh:
        spec = _apply_overrides(parse_config(fh.read()), args)

    def progress(row):
        logging.info("seed %d  experience %d  normalized %.4f  search %.4fs",
                     row.seed, row.experience, row.normalized_reward, row.search_time_s)

    if spec.output == "-":
        run_experiment(spec, sys.stdout, progress)
    else:
        with open(spec.output, "w", newline="") as out:
            run_experiment(spec, out, progress)
    return 0


def cmd_oracle(args) -> int:
    print(repr(optimal_average_reward(domain_info(args.domain).name)))
    return 0


def cmd_domains(args) -> int:
    print(f"{'name':10} {'|A|':>4} {'|O|':>6} {'bits A/O/R':>11} {'D':>3} {'m':>3}")
    for d in CATALOG.values():
        a, o, r = d.widths
        print(f"{d.name:10} {d.action_count:>4} {d.obs_count:>6} {f'{a}/{o}/{r}':>11} "
              f"{d.depth:>3} {d.horizon:>3}")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_all

    return 0 if run_all(print) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handlers = {"run": cmd_run, "oracle": cmd_oracle, "selftest": cmd_selftest,
                "domains": cmd_domains}
    try:
        return handlers[args.command](args)
    except (ConfigError, UnknownDomain, NoKnownOptimum, OSError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
