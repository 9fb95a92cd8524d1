"""Command-line front end.

    stocktrend synth --days 7000 --seed 1 --out s.csv
    stocktrend train --input s.csv --horizon 60 --trees 45 --out model.json
    stocktrend compare --input s.csv --horizon 60
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from . import baselines, serialization
from .errors import StockTrendError, ValidationFailed, exit_code_table
from .evaluation import (compare_models, evaluate_forest, generate_synthetic,
                         linear_separability_test, oob_sweep, render_report)
from .evaluation.synthetic import PRESETS
from .indicators import IndicatorParams, build_dataset, feature_rows
from .market_data import DEFAULT_ALPHA, format_price, parse_ohlcv_csv, to_csv, validate_series
from .random_forest import ForestParams, RandomForest, fit_forest, oob_error, predict, predict_proba

SUBCOMMANDS = ("validate", "featurize", "train", "predict", "evaluate", "sweep", "compare",
               "separability", "synth")
IO_ERROR_EXIT = 70


@dataclass
class RunConfig:
    subcommand: str
    input: Optional[str] = None
    out: Optional[str] = None
    model: Optional[str] = None
    seed: int = 42
    format: str = "csv"
    alpha: float = DEFAULT_ALPHA
    horizon: int = 30
    horizons: tuple = (30, 60, 90)
    trees: tuple = (65,)
    max_depth: Optional[int] = None
    min_leaf: int = 1
    mtry: int = 2
    split: float = 0.8
    protocol: str = "chronological"
    label_on_raw: bool = False
    dead_zone: Optional[float] = None
    jobs: int = 1
    indicators: IndicatorParams = field(default_factory=IndicatorParams)
    baseline_options: dict = field(default_factory=dict)
    days: int = 7000
    regime: str = "moderate"
    symbol: str = ""

    def forest_params(self, n_estimators=None) -> ForestParams:
        return ForestParams(
            n_estimators=self.trees[0] if n_estimators is None else n_estimators,
            max_depth=self.max_depth,
            min_samples_leaf=self.min_leaf,
            mtry=self.mtry,
            seed=self.seed,
        )


def _ranged(kind, lo=None, hi=None, lo_open=False, hi_open=False, label=""):
    def convert(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {kind.__name__} value {text!r}") from None
        bad = ((lo is not None and (value <= lo if lo_open else value < lo))
               or (hi is not None and (value >= hi if hi_open else value > hi)))
        if bad:
            raise argparse.ArgumentTypeError(f"invalid value {text!r} (accepted range: {label})")
        return value
    return convert


def _int_list(text):
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"invalid value {text!r} (accepted range: integers >= 1)")
    return values


positive_int = _ranged(int, lo=1, label="integer >= 1")
nonneg_int = _ranged(int, lo=0, label="integer >= 0")
alpha_type = _ranged(float, lo=0.0, hi=1.0, lo_open=True, label="0 < alpha <= 1")
fraction_type = _ranged(float, lo=0.0, hi=1.0, lo_open=True, hi_open=True, label="0 < split < 1")
positive_float = _ranged(float, lo=0.0, lo_open=True, label="> 0")
nonneg_float = _ranged(float, lo=0.0, label=">= 0")
seed_type = _ranged(int, lo=0, hi=2 ** 64 - 1, label="0 <= seed < 2**64")
mtry_type = _ranged(int, lo=1, hi=6, label="1 <= mtry <= 6")


def _epilog():
    lines = ["exit codes:", "  0   success", "  2   usage error (unknown flag, invalid value, missing input)"]
    lines += [f"  {code:<3} {name}" for code, name in exit_code_table()]
    lines.append(f"  {IO_ERROR_EXIT:<3} I/O failure")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("shared options")
    g.add_argument("--input", help="input OHLCV CSV (header date,open,high,low,close,volume)")
    g.add_argument("--out", help="output path (default: standard output)")
    g.add_argument("--seed", type=seed_type, default=42, help="master seed (default 42)")
    g.add_argument("--format", choices=("csv", "svg"), default="csv")
    g.add_argument("--alpha", type=alpha_type, default=DEFAULT_ALPHA, help="smoothing weight (default 0.9)")
    g.add_argument("--horizon", type=positive_int, default=30, help="label horizon d in rows (default 30)")
    g.add_argument("--trees", type=_int_list, default=None,
                   help="tree count (default 65); sweep takes a list (default 5,25,45,65)")
    g.add_argument("--max-depth", type=nonneg_int, default=None, help="depth cap (default unlimited)")
    g.add_argument("--min-leaf", type=positive_int, default=1, help="min samples per leaf (default 1)")
    g.add_argument("--mtry", type=mtry_type, default=2, help="features tried per node (default 2)")
    g.add_argument("--split", type=fraction_type, default=0.8, help="train fraction (default 0.8)")
    g.add_argument("--protocol", choices=("chronological", "shuffled"), default="chronological",
                   help="train/test split protocol (default chronological)")
    g.add_argument("--label-on-raw", action="store_true", help="label on raw rather than smoothed close")
    g.add_argument("--dead-zone", type=nonneg_float, default=None, metavar="EPS",
                   help="drop rows whose |move| <= EPS * close")
    g.add_argument("--jobs", type=positive_int, default=1, help="worker processes for tree fitting")

    ind = shared.add_argument_group("indicator periods")
    ind.add_argument("--rsi-period", type=positive_int, default=14)
    ind.add_argument("--stoch-period", type=positive_int, default=14)
    ind.add_argument("--willr-period", type=positive_int, default=14)
    ind.add_argument("--roc-period", type=positive_int, default=12)
    ind.add_argument("--macd", type=_int_list, default=(12, 26, 9), metavar="FAST,SLOW,SIGNAL")

    base = shared.add_argument_group("baseline hyperparameters")
    base.add_argument("--lr", type=positive_float, default=0.1, help="logistic learning rate")
    base.add_argument("--epochs", type=positive_int, default=500, help="logistic epochs")
    base.add_argument("--l2", type=nonneg_float, default=1e-4, help="logistic L2 weight")
    base.add_argument("--svm-epochs", type=positive_int, default=50)
    base.add_argument("--svm-l2", type=positive_float, default=1e-4)

    parser = argparse.ArgumentParser(
        prog="stocktrend",
        description="Stock-trend classification with a from-scratch random forest.",
        epilog=_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    helps = {
        "validate": "check an OHLCV CSV for invariant violations",
        "featurize": "emit the indicator/label dataset as CSV",
        "train": "fit a forest on the full dataset and write the model file",
        "predict": "score every post-warm-up bar with a saved model",
        "evaluate": "forest accuracy, AUC and OOB error on a train/test split",
        "sweep": "OOB error over horizons x tree counts",
        "compare": "forest versus logistic, GDA, QDA and linear SVM",
        "separability": "convex-hull overlap of the classes in the top-2 PCA plane",
        "synth": "generate a synthetic OHLCV series",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[shared], help=helps[name], epilog=_epilog(),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        if name == "predict":
            p.add_argument("--model", required=True, help="model file written by train")
        if name == "sweep":
            p.add_argument("--horizons", type=_int_list, default=(30, 60, 90))
        if name == "synth":
            p.add_argument("--days", type=_ranged(int, lo=50, label="integer >= 50"), default=7000)
            p.add_argument("--regime", choices=sorted(PRESETS), default="moderate")
            p.add_argument("--symbol", default="SYN")
    return parser


def parse_cli(argv) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.subcommand != "synth" and not ns.input:
        parser.error(f"{ns.subcommand}: --input is required")
    trees = ns.trees or ((5, 25, 45, 65) if ns.subcommand == "sweep" else (65,))
    if ns.subcommand != "sweep" and len(trees) != 1:
        parser.error("argument --trees: takes a single count outside sweep")
    if len(ns.macd) != 3 or ns.macd[0] >= ns.macd[1]:
        parser.error("argument --macd: expected FAST,SLOW,SIGNAL with FAST < SLOW")
    try:
        indicators = IndicatorParams(ns.rsi_period, ns.stoch_period, ns.willr_period, ns.roc_period,
                                     *ns.macd)
    except StockTrendError as exc:
        parser.error(str(exc))
    return RunConfig(
        subcommand=ns.subcommand,
        input=ns.input,
        out=ns.out,
        model=getattr(ns, "model", None),
        seed=ns.seed,
        format=ns.format,
        alpha=ns.alpha,
        horizon=ns.horizon,
        horizons=getattr(ns, "horizons", (30, 60, 90)),
        trees=trees,
        max_depth=ns.max_depth,
        min_leaf=ns.min_leaf,
        mtry=ns.mtry,
        split=ns.split,
        protocol=ns.protocol,
        label_on_raw=ns.label_on_raw,
        dead_zone=ns.dead_zone,
        jobs=ns.jobs,
        indicators=indicators,
        baseline_options={
            "logistic": {"learning_rate": ns.lr, "epochs": ns.epochs, "l2": ns.l2},
            "svm": {"epochs": ns.svm_epochs, "l2": ns.svm_l2},
        },
        days=getattr(ns, "days", 7000),
        regime=getattr(ns, "regime", "moderate"),
        symbol=getattr(ns, "symbol", ""),
    )


# execution

def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory and rename over ``path``."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _read_series(cfg: RunConfig):
    text = Path(cfg.input).read_text(encoding="utf-8")
    return parse_ohlcv_csv(text, Path(cfg.input).stem)


def _valid_series(cfg: RunConfig):
    series = _read_series(cfg)
    report = validate_series(series)
    if not report.ok:
        v = report.first_violation
        raise ValidationFailed(f"{len(report.violations)} violation(s); first at row {v.row_number} "
                               f"(bar {v.index}): {v.check}: {v.message}")
    return series


def _dataset(cfg: RunConfig, series, horizon=None):
    return build_dataset(series, cfg.alpha, cfg.horizon if horizon is None else horizon,
                         cfg.indicators, cfg.label_on_raw, cfg.dead_zone)


def _emit(cfg: RunConfig, text: str, summary: str, out) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
        print(summary, file=out)
    else:
        out.write(text)


def _fmt(x) -> str:
    return "nan" if x is None or x != x else f"{x:.6f}"


def execute(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    cmd = cfg.subcommand

    if cmd == "synth":
        series = generate_synthetic(cfg.days, PRESETS[cfg.regime], cfg.seed, cfg.symbol or "SYN")
        _emit(cfg, to_csv(series), f"synth: {len(series)} bars, regime={cfg.regime}, seed={cfg.seed}", out)
        return 0

    if cmd == "validate":
        series = _read_series(cfg)
        report = validate_series(series)
        if not report.ok:
            for v in report.violations:
                print(f"row {v.row_number} (bar {v.index}): {v.check}: {v.message}", file=sys.stderr)
            raise ValidationFailed(f"{len(report.violations)} violation(s) in {cfg.input}")
        print(f"validate: ok, {len(series)} bars", file=out)
        return 0

    series = _valid_series(cfg)

    if cmd == "featurize":
        ds = _dataset(cfg, series)
        _emit(cfg, ds.to_csv(), f"featurize: {len(ds)} rows, horizon={cfg.horizon}", out)
        return 0

    if cmd == "train":
        ds = _dataset(cfg, series)
        forest = fit_forest(ds, cfg.forest_params(), n_jobs=cfg.jobs)
        oob = oob_error(forest, ds)
        target = cfg.out or "model.json"
        write_atomic(target, serialization.dumps(forest))
        print(f"train: trees={len(forest.trees)} rows={len(ds)} horizon={cfg.horizon} "
              f"oob_error={_fmt(oob)} model={target}", file=out)
        return 0

    if cmd == "predict":
        model = serialization.loads(Path(cfg.model).read_text(encoding="utf-8"))
        dates, X = feature_rows(series, cfg.alpha, cfg.indicators)
        if isinstance(model, RandomForest):
            proba = predict_proba(model, X)
            pred = predict(model, X)
        else:
            proba = baselines.baseline_score(model, X)
            pred = baselines.baseline_predict(model, X)
        lines = ["date,proba,prediction"]
        lines += [f"{d.isoformat()},{format_price(p)},{int(c)}" for d, p, c in zip(dates, proba, pred)]
        _emit(cfg, "\n".join(lines) + "\n",
              f"predict: {len(dates)} rows, last={dates[-1].isoformat()} proba={_fmt(proba[-1])}", out)
        return 0

    if cmd == "evaluate":
        ds = _dataset(cfg, series)
        report, _ = evaluate_forest(ds, cfg.forest_params(), cfg.split, cfg.protocol, cfg.jobs)
        m = report.metrics[0]
        _emit(cfg, render_report(report, cfg.format),
              f"evaluate: accuracy={_fmt(m.accuracy)} auc={_fmt(m.auc)} oob_error={_fmt(m.oob_error)}", out)
        return 0

    if cmd == "compare":
        ds = _dataset(cfg, series)
        report = compare_models(ds, cfg.forest_params(), cfg.split, cfg.protocol, cfg.jobs,
                                cfg.baseline_options)
        summary = "compare: " + " ".join(f"{m.model}={_fmt(m.accuracy)}" for m in report.metrics)
        _emit(cfg, render_report(report, cfg.format), summary, out)
        return 0

    if cmd == "sweep":
        datasets = {d: _dataset(cfg, series, d) for d in cfg.horizons}
        rows = oob_sweep(datasets, cfg.trees, replace(cfg.forest_params(), n_estimators=1),
                         master_seed=cfg.seed, n_jobs=cfg.jobs)
        summary = "sweep: " + " ".join(f"d{r.horizon_d}/t{r.n_trees}={_fmt(r.oob_error)}" for r in rows)
        _emit(cfg, render_report(rows, cfg.format), summary, out)
        return 0

    if cmd == "separability":
        ds = _dataset(cfg, series)
        rep = linear_separability_test(ds)
        _emit(cfg, render_report(rep, cfg.format),
              f"separability: ratio={_fmt(rep.hull_overlap_ratio)} verdict={rep.verdict}", out)
        return 0

    raise AssertionError(cmd)


def main(argv=None) -> int:
    cfg = parse_cli(sys.argv[1:] if argv is None else argv)
    try:
        return execute(cfg)
    except StockTrendError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: I/O: {exc}", file=sys.stderr)
        return IO_ERROR_EXIT


if __name__ == "__main__":
    sys.exit(main())
