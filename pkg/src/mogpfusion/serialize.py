"""Reading and writing run artifacts: config files, archives, fronts, histories."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path

from .dataset import format_real
from .evolution import EvolutionConfig, Individual
from .expr import FunctionSet
from .multigene import model_from_dict, model_to_dict, predict, r_squared

__all__ = [
    "ConfigError",
    "read_config",
    "archive_to_list",
    "write_archive",
    "read_archive",
    "front_rows",
    "write_front",
    "write_history",
    "dumps",
]

FRONT_HEADER = ("complexity", "fitness", "r2_train", "r2_holdout")
HISTORY_HEADER = ("generation", "best_fitness", "front_size")


class ConfigError(ValueError):
    """Invalid run configuration."""


_CONFIG_TYPES = {
    "population_size": int,
    "generations": int,
    "gmax": int,
    "dmax": int,
    "tournament_size": int,
    "elite_fraction": float,
    "crossover_prob": float,
    "mutation_prob": float,
    "high_level_crossover_fraction": float,
    "seed": int,
    "holdout_fraction": float,
    "function_set": FunctionSet.parse,
}


def parse_config_value(key: str, value: str):
    if key not in _CONFIG_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    try:
        return _CONFIG_TYPES[key](value.strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment.

    Keys mirror :class:`EvolutionConfig` field names.  A comma in a European
    decimal such as ``0,85`` is accepted for the probability fields.
    """
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":" if ":" in line else None
            if sep is None:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split(sep, 1))
            if _CONFIG_TYPES.get(key) is float:
                value = value.replace(",", ".")
            out[key] = parse_config_value(key, value)
    return out


def make_config(values: dict) -> EvolutionConfig:
    try:
        return EvolutionConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def dumps(obj) -> str:
    """Deterministic JSON text; non-finite reals become ``null``."""

    def clean(o):
        if isinstance(o, float) and not math.isfinite(o):
            return None
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        return o

    return json.dumps(clean(obj), indent=2, allow_nan=False) + "\n"


def _holdout_r2(ind, holdout):
    if holdout is None:
        return None
    r2 = r_squared(predict(ind.model, holdout), holdout.y)
    return r2 if math.isfinite(r2) else None


def archive_to_list(members, holdout=None, negate=False) -> list:
    """Model-file dicts for each archive member, ascending complexity.

    ``negate`` flips the sign of weights and bias, restoring the original
    direction of a DMOS-style target the run was oriented against.
    """
    out = []
    for ind in sorted(members, key=lambda m: (m.objectives.complexity, m.objectives.fitness)):
        model = ind.model.negated() if negate else ind.model
        d = model_to_dict(model, ind.objectives)
        d["pareto_rank"] = int(ind.pareto_rank or 1)
        d["r2_train"] = 1.0 - ind.objectives.fitness
        d["r2_holdout"] = _holdout_r2(ind, holdout)
        out.append(d)
    return out


def write_archive(path, members, holdout=None, negate=False) -> None:
    Path(path).write_text(dumps(archive_to_list(members, holdout, negate)), encoding="utf-8")


def read_archive(path) -> list:
    """Archive entries as ``(Individual, entry dict)`` pairs."""
    from .multigene import ObjectivePair

    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise ValueError(f"{path}: archive must be a JSON array")
    out = []
    for e in entries:
        obj = e.get("objectives") or {}
        fitness = obj.get("fitness")
        ind = Individual(
            model_from_dict(e),
            ObjectivePair(math.inf if fitness is None else float(fitness), int(obj.get("complexity", 0))),
            int(e.get("pareto_rank", 1)),
        )
        out.append((ind, e))
    return out


def front_rows(entries) -> list:
    """``front.csv`` rows from archive entry dicts, ascending complexity."""
    rows = []
    for e in entries:
        obj = e["objectives"]
        fitness = obj["fitness"]
        r2_train = e.get("r2_train")
        if r2_train is None and fitness is not None:
            r2_train = 1.0 - fitness
        rows.append((int(obj["complexity"]), fitness, r2_train, e.get("r2_holdout")))
    rows.sort(key=lambda r: (r[0], math.inf if r[1] is None else r[1]))
    return rows


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format_real(v)
    return str(v)


def write_front(path, entries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FRONT_HEADER)
        for row in front_rows(entries):
            w.writerow([_cell(v) for v in row])


def write_history(path, history) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTORY_HEADER)
        for gen, best, size in history:
            w.writerow([gen, _cell(float(best)), size])


def config_dict(config: EvolutionConfig) -> dict:
    d = dataclasses.asdict(config)
    d["function_set"] = ",".join(config.function_set.ops)
    return d
