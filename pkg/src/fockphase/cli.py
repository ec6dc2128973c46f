"""Command-line front end.

Exit codes: 0 success, 1 runtime error, 2 configuration error, 3 failed
invariant (``verify``).  Every data-writing command also writes
``manifest.json``; ``fockphase replay manifest.json`` regenerates the data
files from it.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import sys
from pathlib import Path

from . import __version__
from . import analysis as an
from . import measurement as ms
from .config import load_config
from .errors import ConfigError, FockError

ENSEMBLE_COLUMNS = (
    "index",
    "seed",
    "estimated_phase",
    "phase_fidelity",
    "sx",
    "sy",
    "sz",
    "transverse_magnitude",
)
CASCADE_COLUMNS = ("k", "probability", "reference", "abs_error")
BOB_COLUMNS = ("m", "spin_value", "probability")


class UsageError(Exception):
    """Bad command-line input that is not a config-file problem."""


def fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_jsonl(path: Path, objects):
    with path.open("w") as fh:
        for obj in objects:
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def write_manifest(out: Path, command, arguments, config, outputs):
    manifest = {
        "tool": "fockphase",
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "command": command,
        "arguments": arguments,
        "config": None if config is None else config.as_dict(),
        "output_paths": [str(p) for p in outputs],
    }
    write_json(out / "manifest.json", manifest)


def _resolve_seed(flag_seed, config):
    """Command-line seed wins; otherwise member 0 of the config's master seed."""
    if flag_seed is not None:
        return flag_seed
    if config.master_seed is not None:
        return ms.mix_seed(config.master_seed, 0)
    raise ConfigError("master_seed", "no seed: pass --seed or set master_seed")


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _detection_lines(trajectory):
    for record in trajectory.records:
        yield {"type": "detection", **record.as_dict()}
    yield {
        "type": "summary",
        "seed": trajectory.seed,
        "final_total_n": trajectory.final_state.total_n,
        **trajectory.summary.as_dict(),
    }


def do_run(config, seed, out: Path):
    trajectory = ms.run_trajectory(config, seed)
    path = out / "trajectory.jsonl"
    write_jsonl(path, _detection_lines(trajectory))
    return [path]


def do_ensemble(config, out: Path, bins=16, workers=None):
    trajectories = ms.run_ensemble(config, workers=workers)
    rows = []
    for i, t in enumerate(trajectories):
        s = t.summary
        rows.append(
            (i, t.seed, s.estimated_phase, s.phase_fidelity, s.spin.sx, s.spin.sy, s.spin.sz,
             s.spin.transverse_magnitude)
        )
    csv_path = out / "ensemble.csv"
    write_csv(csv_path, ENSEMBLE_COLUMNS, rows)
    phases = [t.summary.estimated_phase for t in trajectories if not math.isnan(t.summary.estimated_phase)]
    stats = {"trajectories": len(trajectories), "defined_phases": len(phases)}
    if len(phases) >= 10 * bins:
        stats.update(an.uniformity_test(phases, bins).as_dict())
    else:
        stats.update({"bins": bins, "bin_counts": None, "chi_square": None,
                      "note": "too few defined phases for the uniformity test"})
    stats_path = out / "stats.json"
    write_json(stats_path, stats)
    return [csv_path, stats_path]


def do_cascade(n, k_max, out: Path, angle=0.0):
    if n < 2 or k_max < 0 or k_max >= n:
        raise UsageError("need n >= 2 and 0 <= k-max < n")
    probs = ms.cascade(n, k_max, angle)
    rows = []
    for k, p in enumerate(probs):
        ref = (2 * k + 1) / (2 * (k + 1))
        rows.append((k, p, ref, abs(p - ref)))
    path = out / "cascade.csv"
    write_csv(path, CASCADE_COLUMNS, rows)
    return [path]


def do_bob(config, seed, chi, out: Path):
    trajectory = ms.run_trajectory(config, seed)
    if chi == "estimated":
        chi = trajectory.summary.estimated_phase
        if math.isnan(chi):
            raise UsageError("Alice's sequence left no phase to estimate; pass --chi explicitly")
    else:
        chi = float(chi)
    dist = an.bob_count_distribution(trajectory.final_state, chi)
    alice = out / "alice.jsonl"
    write_jsonl(alice, list(_detection_lines(trajectory)) + [{"type": "bob", "chi": chi}])
    bob = out / "bob.csv"
    write_csv(bob, BOB_COLUMNS, zip(range(dist.total_n + 1), (int(v) for v in dist.spin_values),
                                    (float(p) for p in dist.probabilities)))
    return [alice, bob]


def build_parser():
    parser = argparse.ArgumentParser(prog="fockphase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one seeded trajectory")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("ensemble", help="seeded ensemble with phase statistics")
    p.add_argument("config")
    p.add_argument("--seed", type=int, help="overrides master_seed")
    p.add_argument("--bins", type=int, default=16)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cascade", help="conditional + probabilities after k forced + results")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--angle", type=float, default=0.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bob", help="Alice's detections, then Bob's collective count law")
    p.add_argument("config")
    p.add_argument("--chi", default="estimated", help="analyzer angle or 'estimated'")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")

    p = sub.add_parser("replay", help="regenerate data files from a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="target directory (defaults to the manifest's)")
    return parser


def execute(command, arguments, config):
    """Run a data command; returns (written paths, out directory)."""
    out = _out_dir(arguments["out"])
    if command == "run":
        return do_run(config, arguments["seed"], out), out
    if command == "ensemble":
        return do_ensemble(config, out, arguments["bins"], arguments.get("workers")), out
    if command == "cascade":
        return do_cascade(arguments["n"], arguments["k_max"], out, arguments["angle"]), out
    if command == "bob":
        return do_bob(config, arguments["seed"], arguments["chi"], out), out
    raise UsageError(f"unknown command {command!r}")


def _prepare(args):
    """Turn parsed arguments into (command, resolved arguments, config)."""
    command = args.command
    config = None
    arguments = {"out": args.out}
    if command in ("run", "ensemble", "bob"):
        config = load_config(args.config)
    if command in ("run", "bob"):
        arguments["seed"] = _resolve_seed(args.seed, config)
        if command == "bob":
            arguments["chi"] = args.chi
    elif command == "ensemble":
        if args.seed is not None:
            config = ms.ExperimentConfig(**{**config.as_dict(), "master_seed": args.seed})
        if config.master_seed is None:
            raise ConfigError("master_seed", "no seed: pass --seed or set master_seed")
        arguments.update(bins=args.bins, workers=args.workers)
    elif command == "cascade":
        arguments.update(n=args.n, k_max=args.k_max, angle=args.angle)
    return command, arguments, config


def _load_manifest(path, out):
    manifest = json.loads(Path(path).read_text())
    arguments = dict(manifest["arguments"])
    arguments["out"] = out if out is not None else arguments["out"]
    config = manifest["config"]
    if config is not None:
        config = ms.ExperimentConfig(**config)
    return manifest["command"], arguments, config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            from .verify import run_checks

            failed = run_checks(args.level)
            if failed:
                print(f"verify: {len(failed)} invariant(s) failed: {', '.join(failed)}", file=sys.stderr)
                return 3
            print("verify: all checks passed")
            return 0
        if args.command == "replay":
            command, arguments, config = _load_manifest(args.manifest, args.out)
        else:
            command, arguments, config = _prepare(args)
        outputs, out = execute(command, arguments, config)
        write_manifest(out, command, arguments, config, outputs)
        for path in outputs:
            print(path)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, FockError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
