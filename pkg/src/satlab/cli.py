"""Command-line entry point: generate / phase / encode / solve / count /
evaluate / report.

Settings resolve as defaults < config file < flags.  Every file-producing run
writes a manifest.json echoing the fully resolved configuration and seeds, so
an experiment can be reproduced without the original command line.  Exit
codes: 0 success, 2 configuration error, 3 I/O error, 4 transport failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import charts, encoding, metrics
from .cnf import DimacsError, parse_dimacs
from .counter import TooManyVariables, UncountedInstance, count_models
from .generator import (
    DEFAULT_DATASET_SEED,
    DEFAULT_HARD_BOUNDS,
    CorruptLine,
    InsufficientSamples,
    InvalidBounds,
    InvalidSpec,
    SchemaVersionMismatch,
    build_dataset,
    dataset_stats,
    grid_row,
    read_dataset,
    reference_grid,
    write_dataset,
)
from .harness import (
    CorruptRecords,
    MissingCredential,
    TransportError,
    make_adapter,
    read_records,
    run_eval,
)
from .metrics import EmptyJoin, EmptyProfile, MissingCounts
from .solver import BudgetExhausted, hardness_profile, solve

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_TRANSPORT = 4

MANIFEST_SCHEMA_VERSION = 1

CONFIG_ERRORS = (
    InvalidSpec,
    InvalidBounds,
    InsufficientSamples,
    TooManyVariables,
    UncountedInstance,
    MissingCredential,
    EmptyJoin,
    EmptyProfile,
    MissingCounts,
    encoding.VocabularyExhausted,
    BudgetExhausted,
    ValueError,
)
IO_ERRORS = (CorruptLine, SchemaVersionMismatch, CorruptRecords, DimacsError, OSError)


class ConfigError(ValueError):
    pass


def _load_config(path: str | None, command: str) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path}: expected a JSON object")
    section = data.get(command, data)
    if not isinstance(section, dict):
        raise ConfigError(f"config section {command!r} must be an object")
    return section


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    config = dict(defaults)
    config.update(_load_config(args.config, args.command))
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


def _write_manifest(out_dir: str, command: str, config: dict, outputs: list[str]) -> None:
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "command": command,
        "config": config,
        "outputs": outputs,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _parse_grid_specs(specs: list[str]) -> list[tuple[int, Fraction]]:
    cells: list[tuple[int, Fraction]] = []
    for spec in specs:
        head, _, tail = spec.partition(":")
        if not head.startswith("n="):
            raise ConfigError(f"bad grid spec {spec!r}; expected n=<int>[:a1,a2,...]")
        n = int(head[2:])
        if tail:
            cells.extend((n, Fraction(a.strip())) for a in tail.split(","))
        else:
            cells.extend((n, alpha) for alpha in grid_row(n, include_alpha_one=True))
    return cells


def _parse_alphas(spec: str) -> list[Fraction]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad alpha range {spec!r}; expected start:stop:step")
        start, stop, step = (Fraction(p) for p in parts)
        if step <= 0:
            raise ConfigError("alpha range step must be positive")
        alphas = []
        alpha = start
        while alpha <= stop:
            alphas.append(alpha)
            alpha += step
        return alphas
    return [Fraction(a.strip()) for a in spec.split(",")]


# --- subcommands -------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    defaults = {
        "per_alpha": 300,
        "seed": DEFAULT_DATASET_SEED,
        "hard_lo": DEFAULT_HARD_BOUNDS[0],
        "hard_hi": DEFAULT_HARD_BOUNDS[1],
        "parallelism": os.cpu_count() or 1,
        "with_counts": True,
        "reference_grid": False,
        "include_alpha_one": False,
        "grid": [],
        "out": "dataset",
    }
    config = _resolve(args, defaults)
    if args.no_counts:
        config["with_counts"] = False
    if config["reference_grid"]:
        grid = reference_grid(include_alpha_one=config["include_alpha_one"])
    elif config["grid"]:
        grid = _parse_grid_specs(config["grid"])
    else:
        raise ConfigError("select a grid with --reference-grid or --grid")
    out_dir = config["out"]
    os.makedirs(out_dir, exist_ok=True)
    instances = build_dataset(
        grid,
        per_alpha=config["per_alpha"],
        seed=config["seed"],
        bounds=(config["hard_lo"], config["hard_hi"]),
        with_counts=config["with_counts"],
        parallelism=config["parallelism"],
    )
    dataset_path = os.path.join(out_dir, "dataset.jsonl")
    write_dataset(instances, dataset_path)
    stats = dataset_stats(instances)
    with open(os.path.join(out_dir, "stats.json"), "w", encoding="utf-8") as fh:
        json.dump(stats, fh, indent=2)
        fh.write("\n")
    config["grid_cells"] = len(grid)
    _write_manifest(out_dir, "generate", _jsonable(config), ["dataset.jsonl", "stats.json"])
    print(
        f"wrote {stats['total']} instances ({stats['sat']} SAT / {stats['unsat']} unSAT, "
        f"fraction {stats['sat_fraction']:.4f}) to {dataset_path}"
    )
    return EXIT_OK


def cmd_phase(args: argparse.Namespace) -> int:
    defaults = {
        "n": [20],
        "alphas": "1.0:8.0:0.25",
        "per_alpha": 100,
        "seed": DEFAULT_DATASET_SEED,
        "with_time": False,
        "out": "phase",
    }
    config = _resolve(args, defaults)
    alphas = _parse_alphas(config["alphas"])
    grid = [(n, alpha) for n in config["n"] for alpha in alphas]
    profile = hardness_profile(grid, per_cell=config["per_alpha"], seed=config["seed"])
    svg, csv_text = metrics.phase_chart(profile, with_time=config["with_time"])
    out_dir = config["out"]
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "profile.csv"), "w", encoding="utf-8") as fh:
        fh.write(csv_text)
    with open(os.path.join(out_dir, "phase.svg"), "w", encoding="utf-8") as fh:
        fh.write(svg)
    _write_manifest(out_dir, "phase", _jsonable(config), ["profile.csv", "phase.svg"])
    crossing = metrics.find_crossing([(r.alpha, r.p_sat) for r in sorted(profile, key=lambda r: r.alpha)])
    note = f"P(SAT)=0.5 near alpha {crossing:.3f}" if crossing else "no 0.5 crossing in range"
    print(f"wrote {out_dir}/profile.csv and {out_dir}/phase.svg; {note}")
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    defaults = {
        "format": encoding.FORMAT_CNF,
        "variant": encoding.VARIANT_SEARCH,
        "shots": 0,
        "vocab_seed": 0,
        "out": "renderings.jsonl",
        "dataset": None,
    }
    config = _resolve(args, defaults)
    if not config["dataset"]:
        raise ConfigError("--dataset is required")
    instances = read_dataset(config["dataset"])
    out_path = config["out"]
    out_dir = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(out_dir, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        for inst in instances:
            if config["format"] == encoding.FORMAT_CNF:
                rendering = encoding.render_cnf(inst, config["variant"], config["shots"])
            elif config["format"] == encoding.FORMAT_MENU:
                rendering = encoding.render_menu(
                    inst, config["variant"], config["shots"], config["vocab_seed"]
                )
            else:
                rendering = encoding.render_translate(inst, config["vocab_seed"])
            record = {
                "instance_id": rendering.instance_id,
                "format": rendering.format,
                "variant": rendering.variant,
                "shots": rendering.shots,
                "prompt_text": rendering.prompt_text,
                "mapping": None
                if rendering.mapping is None
                else {
                    "var_to_item": {str(k): v for k, v in rendering.mapping.var_to_item.items()},
                    "clause_to_person": list(rendering.mapping.clause_to_person),
                },
            }
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    _write_manifest(out_dir, "encode", _jsonable(config), [os.path.basename(out_path)])
    print(f"wrote {len(instances)} renderings to {out_path}")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    with open(args.dimacs, "r", encoding="utf-8") as fh:
        formula = parse_dimacs(fh.read())
    result = solve(formula, budget=args.budget)
    print(result.verdict)
    if result.witness is not None:
        lits = [v if result.witness[v] else -v for v in sorted(result.witness)]
        print("v " + " ".join(str(l) for l in lits) + " 0")
    stats = result.stats
    print(
        f"c decisions={stats.decisions} unit_propagations={stats.unit_propagations} "
        f"pure_eliminations={stats.pure_eliminations} backtracks={stats.backtracks} "
        f"wall_time={stats.wall_time:.6f}"
    )
    return EXIT_OK


def cmd_count(args: argparse.Namespace) -> int:
    with open(args.dimacs, "r", encoding="utf-8") as fh:
        formula = parse_dimacs(fh.read())
    result = count_models(formula, max_vars=args.max_vars)
    print(f"model_count {result.model_count}")
    print(f"sat_ratio {float(result.sat_ratio)!r} ({result.sat_ratio})")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    defaults = {
        "dataset": None,
        "adapter": "scripted_oracle",
        "adapter_config": "{}",
        "format": encoding.FORMAT_CNF,
        "variant": encoding.VARIANT_SEARCH,
        "shots": 0,
        "vocab_seed": 0,
        "parallelism": 4,
        "out": "records.jsonl",
    }
    config = _resolve(args, defaults)
    if not config["dataset"]:
        raise ConfigError("--dataset is required")
    try:
        adapter_config = json.loads(config["adapter_config"]) if isinstance(
            config["adapter_config"], str
        ) else dict(config["adapter_config"])
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--adapter-config is not valid JSON: {exc}") from None
    adapter = make_adapter(config["adapter"], **adapter_config)
    instances = read_dataset(config["dataset"])
    out_path = config["out"]
    out_dir = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(out_dir, exist_ok=True)
    records = run_eval(
        instances,
        adapter,
        config["format"],
        config["variant"],
        shots=config["shots"],
        parallelism=config["parallelism"],
        out_path=out_path,
        vocab_seed=config["vocab_seed"],
    )
    correct = sum(1 for r in records if r.verdict == "correct")
    _write_manifest(out_dir, "evaluate", _jsonable(config), [os.path.basename(out_path)])
    print(f"{len(records)} records, accuracy {correct / len(records):.4f}, written to {out_path}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    defaults = {
        "records": None,
        "dataset": None,
        "window": 4,
        "out": "report",
    }
    config = _resolve(args, defaults)
    if not config["records"] or not config["dataset"]:
        raise ConfigError("--records and --dataset are required")
    records = read_records(config["records"])
    instances = read_dataset(config["dataset"])
    out_dir = config["out"]
    os.makedirs(out_dir, exist_ok=True)
    groups: dict[tuple, list] = {}
    for record in records:
        groups.setdefault((record.adapter, record.format, record.variant, record.shots), []).append(record)
    outputs: list[str] = []

    def emit(name: str, text: str) -> None:
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(text)
        outputs.append(name)

    for (adapter, fmt, variant, shots), group in sorted(groups.items()):
        stem = f"{adapter}__{fmt}__{variant}__shots{shots}"
        accuracy = metrics.accuracy_vs_alpha(group, instances, window=config["window"])
        emit(f"{stem}__accuracy-vs-alpha.csv", metrics.series_to_csv(accuracy))
        emit(
            f"{stem}__accuracy-vs-alpha.svg",
            charts.series_chart([accuracy], f"{adapter} {fmt} {variant}", "clause density (m/n)", "accuracy"),
        )
        tokens = metrics.tokens_vs_alpha(group, instances, window=config["window"])
        emit(f"{stem}__tokens-vs-alpha.csv", metrics.series_to_csv(tokens))
        emit(
            f"{stem}__tokens-vs-alpha.svg",
            charts.series_chart([tokens], f"{adapter} {fmt} {variant}", "clause density (m/n)", "completion tokens"),
        )
        if variant == encoding.VARIANT_DECISION:
            emit(f"{stem}__confusion.csv", metrics.confusion_to_csv(metrics.confusion(group, instances)))
        try:
            ratio_series = metrics.accuracy_vs_ratio(group, instances, region_filter=metrics.REGION_SPLIT)
        except (MissingCounts, EmptyJoin):
            ratio_series = []
        if ratio_series:
            for series in ratio_series:
                emit(f"{stem}__{series.label}.csv", metrics.series_to_csv(series))
            emit(
                f"{stem}__accuracy-vs-ratio.svg",
                charts.series_chart(
                    ratio_series, f"{adapter} {fmt} {variant}", "satisfiability ratio", "accuracy"
                ),
            )
    _write_manifest(out_dir, "report", _jsonable(config), outputs)
    print(f"wrote {len(outputs)} report files to {out_dir}")
    return EXIT_OK


def _jsonable(config: dict) -> dict:
    out = {}
    for key, value in config.items():
        if isinstance(value, Fraction):
            out[key] = str(value)
        elif isinstance(value, list):
            out[key] = [str(v) if isinstance(v, Fraction) else v for v in value]
        else:
            out[key] = value
    return out


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satlab",
        description="Random 3-SAT phase-transition laboratory and model evaluation harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a labeled, counted, region-tagged dataset")
    gen.add_argument("--config", help="JSON config file")
    gen.add_argument("--reference-grid", action="store_true", default=None,
                     help="use the built-in 200-cell benchmark grid (n in 3..10)")
    gen.add_argument("--include-alpha-one", action="store_true", default=None,
                     help="add the alpha=1.0 column to every reference-grid row")
    gen.add_argument("--grid", action="append",
                     help="grid spec, e.g. n=3 (that row, alpha 1..11) or n=5:1.0,2.5; repeatable")
    gen.add_argument("--per-alpha", type=int, dest="per_alpha", help="instances per grid cell")
    gen.add_argument("--seed", type=int, help="master seed (per-cell seeds are derived)")
    gen.add_argument("--hard-lo", type=float, dest="hard_lo", help="hard-region lower alpha bound")
    gen.add_argument("--hard-hi", type=float, dest="hard_hi", help="hard-region upper alpha bound")
    gen.add_argument("--no-counts", action="store_true",
                     help="skip exact model counting")
    gen.add_argument("--parallelism", type=int, help="worker processes")
    gen.add_argument("--out", help="output directory")
    gen.set_defaults(func=cmd_generate)

    phase = sub.add_parser("phase", help="hardness sweep: P(SAT) and solver effort vs alpha")
    phase.add_argument("--config", help="JSON config file")
    phase.add_argument("--n", type=int, action="append", help="variable count; repeatable")
    phase.add_argument("--alphas", help="comma list or start:stop:step range")
    phase.add_argument("--per-alpha", type=int, dest="per_alpha")
    phase.add_argument("--seed", type=int)
    phase.add_argument("--with-time", action="store_true", default=None, dest="with_time",
                       help="include mean wall time in the CSV (not byte-stable)")
    phase.add_argument("--out", help="output directory")
    phase.set_defaults(func=cmd_phase)

    enc = sub.add_parser("encode", help="render a dataset into prompts")
    enc.add_argument("--config", help="JSON config file")
    enc.add_argument("--dataset", help="dataset JSONL path")
    enc.add_argument("--format", choices=encoding.FORMATS)
    enc.add_argument("--variant", choices=encoding.VARIANTS)
    enc.add_argument("--shots", type=int)
    enc.add_argument("--vocab-seed", type=int, dest="vocab_seed")
    enc.add_argument("--out", help="output JSONL path")
    enc.set_defaults(func=cmd_encode)

    slv = sub.add_parser("solve", help="solve a DIMACS CNF file")
    slv.add_argument("--dimacs", required=True)
    slv.add_argument("--budget", type=int, default=None, help="decision budget")
    slv.set_defaults(func=cmd_solve)

    cnt = sub.add_parser("count", help="count models of a DIMACS CNF file")
    cnt.add_argument("--dimacs", required=True)
    cnt.add_argument("--max-vars", type=int, default=26, dest="max_vars")
    cnt.set_defaults(func=cmd_count)

    ev = sub.add_parser("evaluate", help="run an adapter over a dataset")
    ev.add_argument("--config", help="JSON config file")
    ev.add_argument("--dataset", help="dataset JSONL path")
    ev.add_argument("--adapter", help="scripted_oracle | scripted_constant | scripted_noisy | http_chat")
    ev.add_argument("--adapter-config", dest="adapter_config",
                    help='adapter settings as JSON, e.g. \'{"p": 0.8, "seed": 1}\'')
    ev.add_argument("--format", choices=encoding.FORMATS)
    ev.add_argument("--variant", choices=encoding.VARIANTS)
    ev.add_argument("--shots", type=int)
    ev.add_argument("--vocab-seed", type=int, dest="vocab_seed")
    ev.add_argument("--parallelism", type=int)
    ev.add_argument("--out", help="records JSONL path")
    ev.set_defaults(func=cmd_evaluate)

    rep = sub.add_parser("report", help="aggregate records into CSV/SVG analyses")
    rep.add_argument("--config", help="JSON config file")
    rep.add_argument("--records", help="records JSONL path")
    rep.add_argument("--dataset", help="dataset JSONL path")
    rep.add_argument("--window", type=int, help="moving-window size over alpha values")
    rep.add_argument("--out", help="output directory")
    rep.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except IO_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TransportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
