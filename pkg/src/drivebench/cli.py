"""Command-line entry point.

One binary, five working subcommands plus a scenario exporter:

    run               evaluate an ego over a scenario suite, write a report
    gen-adv           generate adversarial traffic (policy, kinematics, or
                      trajectory method)
    corrupt           batch-corrupt an image dataset
    attack            run digital attacks against the built-in victim
    report            merge report files and recompute aggregates
    export-scenarios  write built-in scenarios and a suite file to disk

Every subcommand honors --seed; repeating an invocation with the same
seed reproduces output files byte for byte. Exit codes: 0 success,
1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .advgen import AdversarySpec, kinematics_attack, train_adversary, trajectory_attack
from .advgen.trajectory_attack import TrajectoryScene
from .attacks import AttackConfig, cw, fgsm, pgd, synthetic_patch_dataset, train_tiny_victim
from .corruptions import CORRUPTION_KINDS, corrupt_dataset, load_image, read_input_manifest
from .evaluation import episode_row, merge_reports, run_scenario, run_suite, write_report
from .policies import PpoConfig, TrainConfig, load_policy, save_policy
from .scenarios import (
    builtin_adversarial,
    builtin_precrash,
    builtin_suite,
    load_scenario,
    load_suite,
    save_suite,
)
from .sim.maps import get_map

log = logging.getLogger("drivebench")

EPSILON_HELP = (
    "L-infinity budget in normalized [0,1] units; a budget of 5 gray "
    "levels on the 0-255 scale is 5/255 (about 0.0196), 8 levels is "
    "8/255 (about 0.0314)"
)


class UsageError(Exception):
    """Bad argument values; reported with usage text and exit code 2."""


@dataclass(frozen=True)
class GlobalConfig:
    """Settings shared by every subcommand."""

    seed: int = 0
    jobs: int = 1
    out_root: Path = Path(".")
    verbosity: int = 0

    def __post_init__(self):
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")


def _global_config(args) -> GlobalConfig:
    return GlobalConfig(
        seed=args.seed,
        jobs=args.jobs,
        out_root=Path(args.out_root),
        verbosity=args.verbose,
    )


def _output_path(cfg: GlobalConfig, explicit, default_name: str) -> Path:
    path = Path(explicit) if explicit else cfg.out_root / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _resolve_suite(spec: str):
    """Suite spec -> (scenario configs, default seed count).

    Accepts a suite file path or builtin:precrash, builtin:suite,
    builtin:adversarial[:count].
    """
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name == "precrash":
            return builtin_precrash(), 1
        if name == "suite":
            return builtin_suite(), 1
        if name == "adversarial" or name.startswith("adversarial:"):
            parts = name.split(":")
            count = int(parts[1]) if len(parts) > 1 else 20
            return builtin_adversarial(count), 1
        raise UsageError(f"unknown builtin suite {spec!r}")
    return load_suite(spec)


def _resolve_scenario(spec: str):
    """Scenario spec: a file path or builtin:<set>:<index>."""
    if spec.startswith("builtin:"):
        parts = spec.split(":")
        if len(parts) != 3 or not parts[2].isdigit():
            raise UsageError(f"builtin scenario spec must be builtin:<set>:<index>, got {spec!r}")
        index = int(parts[2])
        if parts[1] == "adversarial":
            configs = builtin_adversarial(index + 1)
        elif parts[1] == "precrash":
            configs = builtin_precrash()
        else:
            raise UsageError(f"unknown builtin scenario set {parts[1]!r}")
        if index >= len(configs):
            raise UsageError(f"scenario index {index} out of range for {parts[1]}")
        return configs[index]
    return load_scenario(spec)


def _resolve_ego(spec: str):
    if spec == "autopilot":
        return "autopilot"
    return load_policy(spec)


def _episode_task(task):
    config, ego, adversary, seed = task
    try:
        episode = run_scenario(config, ego=ego, adversary=adversary, seed=seed)
    except Exception as exc:  # noqa: BLE001 - one bad episode must not kill the run
        return {"scenario": config.scenario_id, "seed": seed, "error": str(exc)}
    return episode_row(episode)


def _run_rows(configs, ego, adversary, seeds, jobs: int):
    if jobs == 1:
        return run_suite(
            configs, ego=ego, adversary=adversary, seeds=seeds, collect_logs=False
        ).rows
    tasks = [
        (config, ego, adversary, seed) for config in configs for seed in seeds
    ]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_episode_task, tasks))


def cmd_run(args) -> int:
    cfg = _global_config(args)
    configs, suite_seeds = _resolve_suite(args.suite)
    seed_count = args.seeds if args.seeds is not None else suite_seeds
    if seed_count < 1:
        raise UsageError("--seeds must be >= 1")
    seeds = [cfg.seed + i for i in range(seed_count)]
    ego = _resolve_ego(args.ego)
    adversary = load_policy(args.adv) if args.adv else None
    log.info("running %d scenarios over %d seeds", len(configs), len(seeds))
    rows = _run_rows(configs, ego, adversary, seeds, cfg.jobs)
    out = _output_path(cfg, args.out, f"report.{args.format}")
    write_report(rows, out, fmt=args.format)
    collisions = sum(r.get("collision", 0) for r in rows if "error" not in r)
    log.info("%d episodes, %d collisions", len(rows), collisions)
    print(out)
    return 0


def _train_config(args, algo: str):
    base = PpoConfig() if algo == "ppo" else TrainConfig()
    replacements = {"seed": args.seed}
    if args.iters is not None:
        replacements["iterations"] = args.iters
    if args.learning_rate is not None:
        replacements["learning_rate"] = args.learning_rate
    if args.batch_size is not None:
        replacements["batch_size"] = args.batch_size
    return dataclasses.replace(base, **replacements)


def _write_jsonl(path: Path, rows) -> None:
    path.write_text("".join(json.dumps(row, sort_keys=True) + "\n" for row in rows))


def _load_scene(path) -> TrajectoryScene:
    with open(path) as fh:
        data = json.load(fh)
    return TrajectoryScene(
        map_model=get_map(data.get("map", "straight")),
        ego_history=np.asarray(data["ego_history"], dtype=float),
        npc_histories=tuple(
            np.asarray(h, dtype=float) for h in data["npc_histories"]
        ),
        horizon=int(data["horizon"]),
        dt=float(data.get("dt", 0.1)),
    )


def _demo_scene() -> TrajectoryScene:
    """Two cars on parallel lanes of the straight map."""
    return TrajectoryScene(
        map_model=get_map("straight"),
        ego_history=np.array([[0.0, -1.75], [0.8, -1.75]]),
        npc_histories=(np.array([[9.2, 1.75], [10.0, 1.75]]),),
        horizon=30,
    )


def cmd_gen_adv(args) -> int:
    cfg = _global_config(args)
    if args.method == "policy":
        scenario = _resolve_scenario(args.scenario)
        spec = AdversarySpec(scenario=scenario)
        train_cfg = _train_config(args, args.algo)
        log.info("training %s adversary for %d iterations", args.algo, train_cfg.iterations)
        result = train_adversary(spec, train_cfg, algo=args.algo)
        out = _output_path(cfg, args.out, "adversary.json")
        save_policy(result.params, out)
        trace = _output_path(cfg, args.trace, "train-history.jsonl")
        _write_jsonl(trace, result.history)
        print(out)
        return 0
    if args.method == "kin":
        scenario = _resolve_scenario(args.scenario)
        spec = AdversarySpec(scenario=scenario)
        trace = _output_path(cfg, args.trace, "kin-trace.jsonl")
        result = kinematics_attack(
            spec,
            steps=args.steps if args.steps is not None else 60,
            learning_rate=args.learning_rate if args.learning_rate is not None else 0.25,
            trace_path=trace,
            stop_on_collision=False,
        )
        out = _output_path(cfg, args.out, "kin-plan.json")
        payload = {
            "format": "drivebench-plan",
            "version": 1,
            "scenario": scenario.scenario_id,
            "actions": [[a.steer, a.accel] for a in result.actions],
            "cost": result.cost,
            "initial_cost": result.initial_cost,
            "min_distance": result.min_distance,
        }
        out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        log.info("cost %.4f -> %.4f", result.initial_cost, result.cost)
        print(out)
        return 0
    # trajectory method
    scene = _load_scene(args.scene) if args.scene else _demo_scene()
    trace = _output_path(cfg, args.trace, "traj-trace.jsonl")
    result = trajectory_attack(
        scene, steps=args.steps if args.steps is not None else 40, trace_path=trace
    )
    out = _output_path(cfg, args.out, "trajectories.json")
    payload = {
        "format": "drivebench-trajectories",
        "version": 1,
        "trajectories": result.trajectories.tolist(),
        "objective": result.objective,
        "initial_objective": result.initial_objective,
        "min_distance": result.min_distance,
    }
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(out)
    return 0


def cmd_corrupt(args) -> int:
    cfg = _global_config(args)
    valid = {kind.value for kind in CORRUPTION_KINDS}
    kinds = args.kinds.split(",") if args.kinds else sorted(valid)
    for kind in kinds:
        if kind not in valid:
            raise UsageError(f"unknown corruption kind {kind!r}")
    try:
        severities = [int(s) for s in args.severities.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad severity list {args.severities!r}") from exc
    for severity in severities:
        if not 0 <= severity <= 5:
            raise UsageError(f"severity {severity} outside 0..5")
    out_dir = Path(args.out)
    manifest = corrupt_dataset(args.input, out_dir, kinds, severities, seed=cfg.seed)
    print(manifest)
    return 0


def _attack_samples(args, cfg: GlobalConfig, victim):
    """Yield (sample id, input vector, label to attack) triples."""
    if args.input:
        raster = int(np.sqrt(victim.input_dim))
        samples = []
        for i, path in enumerate(read_input_manifest(args.input)):
            image = load_image(path)
            if image.shape[0] != raster or image.shape[1] != raster:
                raise ValueError(
                    f"{path}: victim expects {raster}x{raster} images, got "
                    f"{image.shape[0]}x{image.shape[1]}"
                )
            flat = image.mean(axis=2).reshape(-1)
            label = int(np.argmax(victim.forward(flat)))
            samples.append((f"{i:04d}_{Path(path).stem}", flat, label))
        return samples
    inputs, labels = synthetic_patch_dataset(2000 + args.samples, seed=cfg.seed)
    return [
        (f"{i:04d}", inputs[2000 + i], int(labels[2000 + i]))
        for i in range(args.samples)
    ]


def cmd_attack(args) -> int:
    cfg = _global_config(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    train_inputs, train_labels = synthetic_patch_dataset(2000, seed=cfg.seed)
    victim = train_tiny_victim(train_inputs, train_labels, seed=cfg.seed)
    attack_cfg = AttackConfig(
        epsilon=args.eps,
        steps=args.steps,
        step_size=args.step_size,
        random_start=args.random_start,
    )
    samples = _attack_samples(args, cfg, victim)
    rng = np.random.default_rng([cfg.seed, 0xA77])
    rows = []
    flipped = 0
    for sample_id, x, label in samples:
        if args.method == "fgsm":
            adv = fgsm(victim, x, label, args.eps)
        elif args.method == "pgd":
            adv = pgd(victim, x, label, attack_cfg, rng=rng)
        else:
            adv = cw(victim, x, label, attack_cfg)
        clean_pred = int(np.argmax(victim.forward(x)))
        adv_pred = int(np.argmax(victim.forward(adv)))
        flipped += int(adv_pred != clean_pred)
        rows.append([sample_id, clean_pred, adv_pred, repr(float(np.abs(adv - x).max()))])
    report = _output_path(cfg, args.report, "attack.csv")
    with open(report, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample", "clean_pred", "adv_pred", "linf"])
        writer.writerows(rows)
    log.info("%s flipped %d of %d samples", args.method, flipped, len(rows))
    print(report)
    return 0


def cmd_report(args) -> int:
    cfg = _global_config(args)
    out = _output_path(cfg, args.out, f"merged.{args.format}")
    rows = merge_reports(args.merge, out, fmt=args.format)
    log.info("merged %d rows from %d reports", len(rows), len(args.merge))
    print(out)
    return 0


def cmd_export_scenarios(args) -> int:
    cfg = _global_config(args)
    if args.set == "precrash":
        configs = builtin_precrash()
    elif args.set == "suite":
        configs = builtin_suite()
    else:
        configs = builtin_adversarial(args.count)
    out_dir = Path(args.out) if args.out else cfg.out_root / "scenarios"
    suite_path = save_suite(configs, out_dir, seeds=args.seeds)
    log.info("wrote %d scenarios", len(configs))
    print(suite_path)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    parser.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="worker processes for episode-level parallelism (default 1)",
    )
    parser.add_argument(
        "--out-root",
        default=os.environ.get("DRIVEBENCH_OUT_ROOT", "."),
        help="directory for default output paths (env DRIVEBENCH_OUT_ROOT)",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drivebench",
        description="2D driving-safety testbed: scenario suites, adversarial "
        "traffic, corruptions, and digital attacks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate an ego over a scenario suite")
    _add_common(run)
    run.add_argument(
        "--suite",
        default="builtin:precrash",
        help="suite file, or builtin:precrash / builtin:suite / "
        "builtin:adversarial[:count] (default builtin:precrash)",
    )
    run.add_argument(
        "--ego",
        default="autopilot",
        help="'autopilot' or a policy checkpoint path (default autopilot)",
    )
    run.add_argument("--adv", help="adversary policy checkpoint; replaces adversary-role agents")
    run.add_argument(
        "--seeds",
        type=int,
        default=None,
        help="evaluation seeds per scenario (default: the suite file's count, else 1)",
    )
    run.add_argument("--out", help="report path (default <out-root>/report.<format>)")
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.set_defaults(handler=cmd_run)

    gen = sub.add_parser("gen-adv", help="generate adversarial traffic")
    _add_common(gen)
    gen.add_argument("--method", choices=("policy", "kin", "traj"), required=True)
    gen.add_argument(
        "--scenario",
        default="builtin:adversarial:0",
        help="scenario file or builtin:<set>:<index> (policy and kin methods)",
    )
    gen.add_argument("--scene", help="trajectory scene JSON (traj method; default demo scene)")
    gen.add_argument("--algo", choices=("reinforce", "ppo"), default="reinforce")
    gen.add_argument("--iters", type=int, default=None, help="training iterations (policy)")
    gen.add_argument("--batch-size", type=int, default=None, help="episodes per iteration (policy)")
    gen.add_argument(
        "--steps", type=int, default=None, help="attack iterations (kin default 60, traj default 40)"
    )
    gen.add_argument("--learning-rate", type=float, default=None)
    gen.add_argument("--out", help="checkpoint / plan / trajectories path")
    gen.add_argument("--trace", help="JSONL training history or attack trace path")
    gen.set_defaults(handler=cmd_gen_adv)

    cor = sub.add_parser("corrupt", help="batch-corrupt an image dataset")
    _add_common(cor)
    cor.add_argument("--in", dest="input", required=True, help="text manifest of image paths")
    cor.add_argument("--out", required=True, help="output directory")
    cor.add_argument(
        "--kinds", help="comma-separated corruption kinds (default: all 11)"
    )
    cor.add_argument(
        "--severities", default="1,2,3,4,5", help="comma-separated severities in 0..5"
    )
    cor.set_defaults(handler=cmd_corrupt)

    atk = sub.add_parser(
        "attack",
        help="digital attacks against the built-in victim",
        description="Attacks the bundled tiny classifier. " + EPSILON_HELP + ".",
    )
    _add_common(atk)
    atk.add_argument("--method", choices=("fgsm", "pgd", "cw"), required=True)
    atk.add_argument("--eps", type=float, default=8.0 / 255.0, help=EPSILON_HELP)
    atk.add_argument("--steps", type=int, default=10, help="attack iterations (default 10)")
    atk.add_argument("--step-size", type=float, default=None)
    atk.add_argument("--random-start", action="store_true")
    atk.add_argument(
        "--in",
        dest="input",
        help="text manifest of images matching the victim raster "
        "(default: built-in synthetic samples)",
    )
    atk.add_argument(
        "--samples", type=int, default=200, help="built-in sample count (default 200)"
    )
    atk.add_argument("--report", help="CSV report path (default <out-root>/attack.csv)")
    atk.set_defaults(handler=cmd_attack)

    rep = sub.add_parser("report", help="merge reports and recompute aggregates")
    _add_common(rep)
    rep.add_argument("--merge", nargs="+", required=True, help="report files to merge")
    rep.add_argument("--out", help="merged report path")
    rep.add_argument("--format", choices=("json", "csv"), default="json")
    rep.set_defaults(handler=cmd_report)

    exp = sub.add_parser("export-scenarios", help="write built-in scenarios to disk")
    _add_common(exp)
    exp.add_argument("--set", choices=("precrash", "suite", "adversarial"), default="precrash")
    exp.add_argument("--count", type=int, default=20, help="scenario count (adversarial set)")
    exp.add_argument("--seeds", type=int, default=2, help="seed count stored in the suite file")
    exp.add_argument("--out", help="output directory (default <out-root>/scenarios)")
    exp.set_defaults(handler=cmd_export_scenarios)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=max(logging.WARNING - 10 * args.verbose, logging.DEBUG),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"drivebench: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - stable exit-code contract
        log.error("%s", exc)
        print(f"drivebench: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
