"""Command line interface: ``evolve``, ``predict``, ``eval`` and ``front``.

Exit codes: 0 success, 1 internal failure, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .builtin import resolve_builtin
from .dataset import DataError, format_real, load_csv
from .evolution import _split, evolve, merge_archives, select_final
from .expr import ParseError, print_sexpr
from .multigene import load_model, model_to_dict, predict
from .quality import evaluate_report
from .serialize import (
    ConfigError,
    archive_to_list,
    dumps,
    make_config,
    parse_config_value,
    read_archive,
    read_config,
    write_front,
    write_history,
)

log = logging.getLogger("mogpfusion")

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3

_CONFIG_FLAGS = (
    "population_size", "generations", "gmax", "dmax", "tournament_size",
    "elite_fraction", "crossover_prob", "mutation_prob",
    "high_level_crossover_fraction", "seed", "holdout_fraction", "function_set",
)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mogpfusion",
        description="Multi-objective multigene GP fusion of quality measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evolve", help="evolve a Pareto archive of fusion models")
    ev.add_argument("--data", required=True, help="training CSV")
    ev.add_argument("--target", required=True, help="subjective score column")
    ev.add_argument("--features", help="comma separated feature columns (default: all others)")
    ev.add_argument("--id-column", default="id")
    ev.add_argument("--lower-is-better", action="store_true",
                    help="target is DMOS-like (lower score = better quality)")
    ev.add_argument("--config", help="key = value file with run parameters")
    ev.add_argument("--out", default=".", help="output directory")
    ev.add_argument("--policy", choices=("best_r2", "knee"), default="best_r2")
    ev.add_argument("--runs", type=int, default=1,
                    help="independent runs (seeds seed..seed+runs-1) whose archives are merged")
    for name in _CONFIG_FLAGS:
        ev.add_argument("--" + name.replace("_", "-"), dest=name, default=None)

    pr = sub.add_parser("predict", help="apply a model file or built-in formula")
    pr.add_argument("--model", required=True, help="model JSON or builtin:mfmogp1..4")
    pr.add_argument("--data", required=True)
    pr.add_argument("--id-column", default="id")
    pr.add_argument("--out", default="predictions.csv")

    es = sub.add_parser("eval", help="SRCC/KRCC/PCC/RMSE of predictions against subjective scores")
    es.add_argument("--predictions", required=True, help="CSV with id,prediction")
    es.add_argument("--data", required=True, help="CSV with the subjective score column")
    es.add_argument("--target", required=True)
    es.add_argument("--id-column", default="id")
    es.add_argument("--no-logistic", action="store_true",
                    help="compute PCC/RMSE on raw predictions")
    es.add_argument("--out", default="report.json")

    fr = sub.add_parser("front", help="write front.csv from an archive.json")
    fr.add_argument("--archive", required=True)
    fr.add_argument("--out", default="front.csv")
    return parser


def _config_from_args(args):
    try:
        values = read_config(args.config) if args.config else {}
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    for name in _CONFIG_FLAGS:
        v = getattr(args, name)
        if v is not None:
            values[name] = parse_config_value(name, v)
    return make_config(values)


def describe_model(model, schema=None) -> str:
    terms = [f"{format_real(w)} * {print_sexpr(g, schema)}" for w, g in zip(model.weights, model.genes)]
    return " + ".join(terms + [format_real(model.bias)])


def cmd_evolve(args) -> int:
    config = _config_from_args(args)
    if args.runs < 1:
        raise ConfigError("--runs must be >= 1")
    features = [f.strip() for f in args.features.split(",")] if args.features else None
    data = load_csv(args.data, args.target, features, args.id_column,
                    higher_is_better=not args.lower_is_better)
    train = data.oriented()

    try:
        if args.runs == 1:
            results = [evolve(train, config)]
            holdout = results[0].holdout
        else:
            rng = np.random.default_rng(config.seed)
            fit_on, holdout = _split(train, config.holdout_fraction, rng, config.gmax + 2)
            results = [
                evolve(fit_on, dataclasses.replace(config, seed=config.seed + k, holdout_fraction=0.0))
                for k in range(args.runs)
            ]
    except ValueError as exc:
        raise DataError(str(exc)) from None
    archive = results[0].archive if args.runs == 1 else merge_archives([r.archive for r in results])

    if holdout is None:
        log.warning("no holdout: model selection and reported R^2 use the training data")
    validation = holdout if holdout is not None else results[0].train
    selected = select_final(archive, validation, args.policy)

    negate = not data.higher_is_better
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = archive_to_list(archive.members, holdout, negate)
    (out / "archive.json").write_text(dumps(entries), encoding="utf-8")
    write_front(out / "front.csv", entries)
    write_history(out / "history.csv", results[0].history)
    for k, r in enumerate(results[1:], 2):
        write_history(out / f"history_run{k}.csv", r.history)

    model = selected.model.negated() if negate else selected.model
    (out / "selected_model.json").write_text(dumps(model_to_dict(model, selected.objectives)),
                                             encoding="utf-8")
    print(f"selected ({args.policy}): y = {describe_model(model)}")
    for g in model.genes:
        print(f"  gene: {print_sexpr(g)}    [{print_sexpr(g, model.schema)}]")
    print(f"  fitness (1 - R^2) = {format_real(selected.objectives.fitness)}, "
          f"complexity = {selected.objectives.complexity}")
    print(f"archive: {len(archive.members)} models written to {out}")
    return EXIT_OK


def _load_any_model(spec):
    try:
        model = resolve_builtin(spec)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    if model is not None:
        return model
    try:
        return load_model(spec)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load model {spec!r}: {exc}") from None


def cmd_predict(args) -> int:
    model = _load_any_model(args.model)
    data = load_csv(args.data, None, list(model.schema), args.id_column).select(model.schema)
    pred = predict(model, data)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("id", "prediction"))
        for i, p in zip(data.ids, pred):
            w.writerow((i, format_real(p)))
    print(f"{len(pred)} predictions written to {args.out}")
    return EXIT_OK


def _read_predictions(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "id" not in rows[0] or "prediction" not in rows[0]:
        raise DataError(f"{path}: expected columns id,prediction")
    ids, vals = [], []
    for n, r in enumerate(rows, 2):
        try:
            vals.append(float(r["prediction"]))
        except (TypeError, ValueError):
            raise DataError(f"{path}: non-numeric prediction on line {n}") from None
        ids.append(r["id"].strip())
    return ids, np.array(vals)


def cmd_eval(args) -> int:
    ids, pred = _read_predictions(args.predictions)
    truth = load_csv(args.data, args.target, [], args.id_column)
    where = {i: k for k, i in enumerate(truth.ids)}
    missing = [i for i in ids if i not in where]
    if missing:
        raise DataError(f"cannot join on id; {len(missing)} prediction id(s) absent from "
                        f"{args.data}, e.g. {missing[:5]}")
    if len(set(ids)) != len(ids):
        raise DataError(f"{args.predictions}: duplicate ids")
    sub = truth.y[[where[i] for i in ids]]
    try:
        report = evaluate_report(pred, sub, use_logistic=not args.no_logistic)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    text = dumps(report.to_dict())
    Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK


def cmd_front(args) -> int:
    try:
        entries = [e for _, e in read_archive(args.archive)]
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read archive {args.archive!r}: {exc}") from None
    write_front(args.out, entries)
    print(f"{len(entries)} rows written to {args.out}")
    return EXIT_OK


COMMANDS = {"evolve": cmd_evolve, "predict": cmd_predict, "eval": cmd_eval, "front": cmd_front}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ParseError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except DataError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
