"""Episode runner for the greenhouse environments.

::

    python -m simenv run --env Greenhouse-v0 --policy constant:0.2 --seed 7 --format csv
    python -m simenv run --policy fallback --seed 7
    python -m simenv verify --seed 7 --policy constant:0.2

``run`` writes one trace record per decision (plus the terminal state) to
``--output`` or stdout. ``verify`` drives the environment with a constant
policy and compares its trace field by field with a standalone run of the
simulation that never touches the environment machinery.

Exit codes: 0 success, 1 usage error, 2 contract or liveness error,
3 equivalence mismatch.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from simenv import bridge
from simenv import greenhouse_env  # noqa: F401 - registers the greenhouse envs
from simenv.spaces import sample

FIELDS = ("day", "temp", "humidity", "alive", "dead", "water_use", "action", "reward")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_MISMATCH = 0, 1, 2, 3


@dataclass(frozen=True)
class TraceRecord:
    day: int
    temp: float
    humidity: float
    alive: int
    dead: int
    water_use: float
    action: float | None = None
    reward: float | None = None


@dataclass
class RunConfig:
    env_id: str = greenhouse_env.ENV_ID
    policy: str = "random"
    seed: int = 0
    max_days: int = 365
    output: str | None = None
    format: str = "csv"
    quiet: bool = False

    def __post_init__(self):
        parse_policy(self.policy)
        if self.max_days < 1:
            raise ValueError("max-days must be at least 1")
        if self.format not in ("csv", "jsonl"):
            raise ValueError(f"unknown format {self.format!r}")


@dataclass
class Trace:
    records: list
    outcome: str  # "done" or "capped"


def parse_policy(spec):
    """Return ("random", None), ("constant", x) or ("fallback", None)."""
    if spec in ("random", "fallback"):
        return spec, None
    kind, _, value = spec.partition(":")
    if kind == "constant" and value:
        try:
            x = float(value)
        except ValueError:
            raise ValueError(f"bad constant policy {spec!r}") from None
        if not 0 <= x <= 1:
            raise ValueError(f"constant policy needs 0 <= x <= 1, got {x}")
        return kind, x
    raise ValueError(f"unknown policy {spec!r}; use random, constant:<x> or fallback")


def make_policy(spec, action_space, seed):
    kind, x = parse_policy(spec)
    if kind == "constant":
        return lambda obs: np.array([x])
    if kind == "random":
        rng = np.random.default_rng(seed + 1)
        return lambda obs: sample(action_space, rng)
    raise ValueError("the fallback policy has no environment-side policy")


def snapshot(sim, action=None, reward=None):
    g = sim.greenhouse
    alive = g.alive()
    return TraceRecord(
        day=sim.day,
        temp=float(g.temp),
        humidity=float(g.humidity),
        alive=alive,
        dead=len(g.pots) - alive,
        water_use=float(g.water_use),
        action=None if action is None else float(action),
        reward=None if reward is None else float(reward),
    )


def _log_sink(quiet):
    return None if quiet else (lambda line: print(line, file=sys.stderr))


def run_env_episode(env_id, policy_spec, seed, max_days=365, quiet=True, registry=None):
    """Drive a registered environment; the action column holds mapped litres."""
    registry = registry or bridge.default_envs
    env = registry.make(env_id)
    env.simulation.log = _log_sink(quiet)
    policy = make_policy(policy_spec, env.action_space, seed)
    env.seed(seed)
    try:
        obs = env.reset()
        records = [snapshot(env.simulation)]
        while True:
            if records[-1].day >= max_days - 1:
                return Trace(records, "capped")
            action = policy(obs)
            litres = env.definition.map_action(action)
            obs, reward, done, _ = env.step(action)
            records.append(snapshot(env.simulation, litres, reward))
            if done:
                return Trace(records, "done")
    finally:
        env.close()


class _Capped(Exception):
    pass


def run_standalone(env_id, seed, max_days=365, forced=None, quiet=True, registry=None):
    """Run the simulation with no environment bound.

    The decision point runs its own fallback, or ``forced`` (a fixed action
    space value pushed through the action mapping) if given. Rewards are
    evaluated with the environment's reward function at the same moments the
    environment would, so the trace is comparable record for record.
    """
    registry = registry or bridge.default_envs
    factory = registry.factory(env_id)
    definition = factory.definition
    points = bridge.default_decision_points
    if forced is None:
        decide = points.fallback(factory.decision_point)
    else:
        decide = bridge.policy_decision(factory.decision_point, lambda obs: np.array([forced]))

    sim = factory.new_simulation()
    sim.log = _log_sink(quiet)
    sim.set_seed(seed)
    sim.reset()
    reward_fn = definition.reward_map_factory()
    records = []
    last = {"action": None, "subject": None}

    def recorder(subject, *args, **kwargs):
        reward = reward_fn(subject)
        records.append(snapshot(sim, last["action"], reward if records else None))
        if records[-1].day >= max_days - 1:
            raise _Capped
        last["action"] = decide(subject, *args, **kwargs)
        last["subject"] = subject
        return last["action"]

    with points.override(factory.decision_point, recorder):
        try:
            sim.run()
        except _Capped:
            return Trace(records, "capped")
    records.append(snapshot(sim, last["action"], reward_fn(last["subject"])))
    return Trace(records, "done")


def first_divergence(a, b):
    """(index, [field names]) of the first differing record, or None."""
    for i, (ra, rb) in enumerate(zip(a, b)):
        diff = [f for f in FIELDS if getattr(ra, f) != getattr(rb, f)]
        if diff:
            return i, diff
    if len(a) != len(b):
        return min(len(a), len(b)), ["length"]
    return None


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_trace(records, fmt):
    if not records:
        raise ValueError("refusing to write an empty trace")
    out = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(FIELDS)
        for r in records:
            writer.writerow([_cell(getattr(r, f)) for f in FIELDS])
    elif fmt == "jsonl":
        for r in records:
            row = {k: v for k, v in dataclasses.asdict(r).items() if v is not None}
            out.write(json.dumps(row) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return out.getvalue()


def write_trace(records, fmt, path=None):
    text = format_trace(records, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc.strerror}") from exc


def read_jsonl(text):
    return [TraceRecord(**json.loads(line)) for line in text.splitlines() if line]


def cmd_run(config):
    kind, _ = parse_policy(config.policy)
    if kind == "fallback":
        trace = run_standalone(config.env_id, config.seed, config.max_days, quiet=config.quiet)
    else:
        trace = run_env_episode(
            config.env_id, config.policy, config.seed, config.max_days, quiet=config.quiet
        )
    write_trace(trace.records, config.format, config.output)
    last = trace.records[-1]
    if trace.outcome == "capped":
        print(f"episode capped at max-days {config.max_days} (last day {last.day})", file=sys.stderr)
    else:
        print(f"episode done at day {last.day}", file=sys.stderr)
    return EXIT_OK


def cmd_verify_equivalence(seed, policy, env_id=greenhouse_env.ENV_ID, reference="fallback",
                           max_days=365, quiet=True):
    kind, x = parse_policy(policy)
    if kind != "constant":
        raise ValueError("equivalence needs a deterministic constant:<x> policy")
    driven = run_env_episode(env_id, policy, seed, max_days, quiet=quiet)
    standalone = run_standalone(
        env_id, seed, max_days, forced=x if reference == "forced" else None, quiet=quiet
    )
    divergence = first_divergence(driven.records, standalone.records)
    if divergence is None:
        print(f"seed {seed}: traces identical ({len(driven.records)} records)")
        return EXIT_OK
    i, fields = divergence
    day = driven.records[i].day if i < len(driven.records) else standalone.records[i].day
    print(f"seed {seed}: traces diverge at day {day}: {', '.join(fields)}")
    for f in fields:
        if f != "length":
            print(f"  {f}: env={getattr(driven.records[i], f)!r} "
                  f"standalone={getattr(standalone.records[i], f)!r}")
    return EXIT_MISMATCH


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="simenv", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--env", default=greenhouse_env.ENV_ID, dest="env_id")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-days", type=int, default=365)
        p.add_argument("--quiet", action="store_true", help="suppress the day log lines")

    run = sub.add_parser("run", help="run one seeded episode and write its trace")
    common(run)
    run.add_argument("--policy", default="random", help="random | constant:<x> | fallback")
    run.add_argument("--output", default=None, help="trace file (default: stdout)")
    run.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    verify = sub.add_parser("verify", help="compare env-driven and standalone traces")
    common(verify)
    verify.add_argument("--policy", default="constant:0.2")
    verify.add_argument("--reference", choices=("fallback", "forced"), default="fallback",
                        help="standalone side runs the model's own decision or the forced constant")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        if args.env_id not in bridge.default_envs:
            raise ValueError(f"unknown environment {args.env_id!r}; known: {', '.join(bridge.default_envs.ids())}")
        if args.command == "run":
            config = RunConfig(args.env_id, args.policy, args.seed, args.max_days,
                               args.output, args.format, args.quiet)
            return cmd_run(config)
        if args.max_days < 1:
            raise ValueError("max-days must be at least 1")
        return cmd_verify_equivalence(args.seed, args.policy, args.env_id, args.reference,
                                      args.max_days, args.quiet)
    # SimEnvError first: LivenessError is also a TimeoutError (an OSError)
    except bridge.SimEnvError as exc:
        print(f"simenv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, OSError) as exc:
        print(f"simenv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
