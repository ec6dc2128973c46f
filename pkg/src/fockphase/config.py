"""Flat ``key = value`` experiment files.

Example::

    # 1000 atoms, 50 detections at random analyzer angles
    n_up = 500
    n_down = 500
    detections = 50
    analyzer = uniform
    master_seed = 12345
    trajectories = 2000

``schedule`` is a comma-separated list of ``indistinguishable``,
``which_path(up)`` and ``which_path(down)``; ``entry*count`` repeats an entry.
Blank lines and ``#`` comments are ignored; unknown or repeated keys are
errors.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigError
from .measurement import ExperimentConfig

INT_KEYS = ("n_up", "n_down", "detections", "master_seed", "trajectories")
REQUIRED_KEYS = ("n_up", "n_down", "detections")
KNOWN_KEYS = INT_KEYS + ("angle", "schedule", "analyzer")


def _parse_int(key, text):
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None


def parse_schedule(text):
    entries = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, star, count = chunk.partition("*")
        repeat = _parse_int("schedule", count.strip()) if star else 1
        if repeat < 0:
            raise ConfigError("schedule", f"negative repeat count in {chunk!r}")
        entries.extend([name.strip()] * repeat)
    return tuple(entries)


def parse_config_text(text: str) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq:
            raise ConfigError(key or f"line {lineno}", "expected 'key = value'")
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "given more than once")
        values[key] = value.strip()
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(key, "missing required key")

    kwargs = {}
    for key, value in values.items():
        if key in INT_KEYS:
            kwargs[key] = _parse_int(key, value)
        elif key == "angle":
            try:
                kwargs[key] = float(value)
            except ValueError:
                raise ConfigError(key, f"expected a number, got {value!r}") from None
        elif key == "schedule":
            kwargs[key] = parse_schedule(value)
        else:
            kwargs[key] = value
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())


def format_config(config: ExperimentConfig) -> str:
    """Inverse of ``parse_config_text`` (schedule written run-length encoded)."""
    lines = [
        f"n_up = {config.n_up}",
        f"n_down = {config.n_down}",
        f"detections = {config.detections}",
        f"angle = {config.angle!r}",
        f"analyzer = {config.analyzer}",
        f"trajectories = {config.trajectories}",
    ]
    if config.master_seed is not None:
        lines.append(f"master_seed = {config.master_seed}")
    runs = []
    for entry in config.schedule:
        if runs and runs[-1][0] == entry:
            runs[-1][1] += 1
        else:
            runs.append([entry, 1])
    if runs:
        lines.append("schedule = " + ", ".join(f"{e}*{c}" for e, c in runs))
    return "\n".join(lines) + "\n"
