"""Command-line entry point: ``odse train | eval | bench | generate | config``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, fields
from pathlib import Path

from .bench import SUITES, format_table
from .classify import evaluate
from .datasets import SPLITS, load_dataset, write_dataset
from .graph import LabelKindError
from .optimizer import GaConfig, OdseModel, ga_optimize
from .synthetic import letter_like_dataset

FORMATS = ("native", "gxl-collection")
_GA_FIELDS = {f.name for f in fields(GaConfig)}
_RUN_FIELDS = {"data", "format"}


class ConfigError(ValueError):
    pass


def default_config() -> dict:
    return {"data": "dataset.manifest", "format": "native", **asdict(GaConfig())}


def load_config(path) -> tuple[Path, str, GaConfig]:
    """Read a run configuration; returns (manifest path, dataset format, GA configuration)."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    unknown = sorted(set(raw) - _GA_FIELDS - _RUN_FIELDS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    if "data" not in raw:
        raise ConfigError(f"{path}: 'data' (dataset manifest path) is required")
    fmt = raw.get("format", "native")
    if fmt not in FORMATS:
        raise ConfigError(f"{path}: format must be one of {FORMATS}")
    manifest = (path.parent / raw["data"]).resolve()
    if not manifest.is_file():
        raise ConfigError(f"{path}: dataset manifest {manifest} not found")
    ga = GaConfig(**{k: v for k, v in raw.items() if k in _GA_FIELDS})
    return manifest, fmt, ga


def _dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def cmd_train(args) -> int:
    from . import report

    manifest, fmt, cfg = load_config(args.config)
    if args.seed is not None:
        cfg = GaConfig(**{**asdict(cfg), "seed": args.seed})
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    ds = load_dataset(manifest, fmt)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    result = ga_optimize(ds.train, ds.validation, cfg, threads=args.threads)
    test = evaluate(result.model, ds.test)
    wall = time.perf_counter() - start

    n_train, n_classes = len(ds.train), len({c for _, c in ds.train})
    best = result.best
    metrics = {
        "variant": cfg.variant,
        "seed": cfg.seed,
        "accuracy": test.accuracy,
        "validation_accuracy": best.accuracy,
        "rs_size": best.rs_size,
        "initial_rs_size": best.initial_rs_size,
        "compressed_rs_size": best.compressed_rs_size,
        "theta_term": best.theta_term,
        "upsilon": best.upsilon,
        "n_train": n_train,
        "n_classes": n_classes,
        "generations_run": len(result.history),
        "best_fitness": best.value,
        "best_genome": list(result.best_genome),
        "per_generation": [asdict(h) for h in result.history],
        "final_population": [
            {"fitness": r.value, "rs_size": r.rs_size, "initial_rs_size": r.initial_rs_size,
             "compressed_rs_size": r.compressed_rs_size, "theta_term": r.theta_term,
             "degenerate": r.degenerate}
            for _, r in result.final_population
        ],
        "wall_time_s": wall,
    }
    _dump(result.model.to_json(), out / "model.json")
    _dump(metrics, out / "metrics.json")
    report.write_generation_csv(result.history, out / "per_generation.csv")
    report.plot_convergence(result.history, out / "convergence.png", f"{cfg.variant} seed {cfg.seed}")
    print(f"test accuracy {test.accuracy:.4f}  rs_size {best.rs_size}  "
          f"generations {len(result.history)}  best fitness {best.value:.6f}  ({wall:.1f}s)")
    print(f"wrote {out / 'model.json'} and {out / 'metrics.json'}")
    return 0


def cmd_eval(args) -> int:
    try:
        obj = json.loads(Path(args.model).read_text(encoding="utf-8"))
        model = OdseModel.from_json(obj)
    except FileNotFoundError:
        raise ConfigError(f"model file {args.model} not found") from None
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ConfigError(f"{args.model}: not a valid model bundle ({exc})") from None
    ds = load_dataset(args.data, args.format)
    report = {}
    for split in args.split:
        ev = evaluate(model, ds.split(split))
        correct = round(ev.accuracy * ev.total)
        report[split] = {"accuracy": ev.accuracy, "correct": correct, "total": ev.total}
        print(f"{split}\taccuracy={ev.accuracy:.6f}\t{correct}/{ev.total}")
    if args.json:
        _dump(report, Path(args.json))
    return 0


def cmd_bench(args) -> int:
    from . import report

    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = 0
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for name in names:
        start = time.perf_counter()
        rows = SUITES[name]()
        elapsed = time.perf_counter() - start
        bad = sum(not r.ok for r in rows)
        failed += bad
        sys.stdout.write(format_table(rows))
        print(f"# {name}: {len(rows) - bad}/{len(rows)} passed in {elapsed:.1f}s")
        if out:
            report.write_bench_tsv(rows, out / f"{name}.tsv")
            report.plot_bench(name, rows, out / f"{name}.png")
    return 1 if failed else 0


def cmd_generate(args) -> int:
    ds = letter_like_dataset(args.classes, args.per_class, args.noise, args.seed)
    written = write_dataset(ds, args.out)
    print("\n".join(str(p) for p in written))
    return 0


def cmd_config(args) -> int:
    print(json.dumps(default_config(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="odse", description="Dissimilarity-space graph classifier.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="synthesize a model with the genetic algorithm")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--threads", type=int, default=1, help="parallel fitness evaluations")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="classify a dataset with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="dataset manifest")
    p.add_argument("--format", choices=FORMATS, default="native")
    p.add_argument("--split", nargs="+", choices=SPLITS, default=["test"])
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=[*SUITES, "all"])
    p.add_argument("--out", help="directory for TSV tables and figures")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write a synthetic letter-like dataset")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True, help="graphs per class and split")
    p.add_argument("--noise", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="manifest path; split files go beside it")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("config", help="print the default run configuration")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ValueError, LabelKindError, OSError) as exc:
        print(f"odse: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
