"""Command line entry point: train, eval, sweep, demo.

Exit codes: 0 success, 2 configuration error, 3 numeric divergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from ..belief import ContradictoryEvidence
from ..env import STREAM_EVAL, ConfigError, build_prior, episode_rng
from .config import load_config
from .io import emit, load_checkpoint, save_checkpoint, summary_row, trace_rows
from .runner import evaluate, make_agent, run_episode, sweep, train

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 2, 3

log = logging.getLogger("activesense")


def _policy(args, run):
    if getattr(args, "ckpt", None):
        agent, ck_run = load_checkpoint(args.ckpt)
        if ck_run.agent != run.agent:
            log.warning("checkpoint agent %s overrides config agent %s", ck_run.agent, run.agent)
        return agent
    if run.learnable:
        log.info("no checkpoint given; training %s for %d episodes", run.agent, run.n_train_episodes)
        return train(run)[0]
    return make_agent(run)


def cmd_train(args):
    run = load_config(args.config)
    agent, rows = train(run)
    save_checkpoint(agent, run, args.out)
    if args.log:
        emit(rows, args.log, "csv", columns=["episode", "reward_sum", "stopping_time"])
    log.info("wrote %s", args.out)


def cmd_eval(args):
    run = load_config(args.config)
    if args.episodes is not None:
        run = run.replace(eval_episodes=args.episodes)
    summary = evaluate(_policy(args, run), run)
    emit([summary_row(run, summary)], args.out, "csv")
    print(json.dumps(summary.__dict__))


def cmd_sweep(args):
    run = load_config(args.config)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse sweep values {args.values!r}") from None
    if not values:
        raise ConfigError("sweep needs at least one value")
    results = sweep(run, args.axis, values, args.episodes)
    emit([summary_row(sub, s, axis=args.axis, value=v) for v, sub, s in results], args.out, "csv")


def cmd_demo(args):
    run = load_config(args.config)
    policy = _policy(args, run)
    cfg = run.process
    rec = run_episode(policy, cfg, run.reward_spec, run.pi_upper, run.T_max,
                      episode_rng(run.seed, STREAM_EVAL, args.episode), trace=True,
                      prior=build_prior(cfg))
    emit(trace_rows([rec]), args.trace, "jsonl")
    print(f"truth={list(rec.truth)} estimate={list(rec.estimate)} T={rec.stopping_time} "
          f"cost={rec.total_cost:.3f}")


def build_parser():
    ap = argparse.ArgumentParser(prog="activesense", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a learnable agent and write a checkpoint")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--log", help="optional per-episode training log (CSV)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint or fixed policy")
    p.add_argument("--config", required=True)
    p.add_argument("--ckpt")
    p.add_argument("--out", required=True)
    p.add_argument("--episodes", type=int)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="evaluate across values of one parameter")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", required=True, choices=["pi_upper", "rho", "lambda"])
    p.add_argument("--values", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--episodes", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("demo", help="write a single-episode step trace")
    p.add_argument("--config", required=True)
    p.add_argument("--ckpt")
    p.add_argument("--trace", required=True)
    p.add_argument("--episode", type=int, default=0)
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, ContradictoryEvidence) as exc:
        print(f"numeric divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
