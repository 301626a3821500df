"""Command line driver.

Subcommands::

    mlrank convert      rewrite a dataset between sparse text and dense CSV
    mlrank train        fit one model and save it
    mlrank cv           cross-validated lambda selection for one algorithm
    mlrank bench        full benchmark grid over datasets x algorithms
    mlrank consistency  product-condition check, counterexamples, random audit
    mlrank bounds       deviation bounds for a trained model on a dataset
    mlrank report       regenerate summary table and charts from bench CSVs

Exit codes: 0 success, 1 task failure (training aborted), 2 invalid
configuration or malformed input data, 3 I/O error.  ``MLRANK_THREADS``
overrides any configured worker count.  Benchmark artifacts embed a hash of
the full configuration in their file names, so differing runs never
overwrite each other.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import consistency as cons
from .dataset import (DatasetFormatError, MultiLabelDataset, load_csv, load_sparse,
                      save_csv, save_sparse)
from .losses import BASE_KINDS, BaseLoss
from .model import LinearModel, load_model, predict, save_model
from .optimizer import NonFiniteObjectiveError, OptimizerConfig
from .trainer import ALGORITHMS, CvResult, cross_validate, evaluate, prepare_data, train_with_trace

EXIT_OK = 0
EXIT_TASK = 1
EXIT_CONFIG = 2
EXIT_IO = 3

DEFAULT_GRID = [10.0 ** e for e in range(-8, 3)]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Everything a benchmark run depends on; serializable, hashable.

    The seed and the grid coordinates determine every random draw, so two
    runs from equal configurations produce identical metrics regardless of
    worker count.
    """

    datasets: list[str] = field(default_factory=list)
    format: str = "sparse"
    label_count: int | None = None
    algos: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    base: str = "logistic"
    lambda_grid: list[float] = field(default_factory=lambda: list(DEFAULT_GRID))
    folds: int = 3
    seed: int = 0
    outer_epochs: int = 30
    inner_steps: int | None = None
    initial_step: float = 0.1
    tolerance: float = 1e-7
    standardize: bool = True
    bias: bool = True
    select_on_test_folds: bool = False
    keep_trivial: bool = False
    workers: int = 1
    outdir: str = "results"
    smoke: bool = False

    def validate(self) -> None:
        if not self.datasets:
            raise ConfigError("no datasets given")
        if self.format not in ("sparse", "csv"):
            raise ConfigError(f"format must be sparse or csv, not {self.format!r}")
        if self.format == "csv" and not self.label_count:
            raise ConfigError("csv format requires label_count")
        bad = [a for a in self.algos if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithms {bad}; choose from {list(ALGORITHMS)}")
        if self.base not in BASE_KINDS:
            raise ConfigError(f"unknown base loss {self.base!r}; choose from {list(BASE_KINDS)}")
        if not self.lambda_grid or any(l < 0 for l in self.lambda_grid):
            raise ConfigError("lambda grid must be nonempty and nonnegative")
        if self.folds < 2:
            raise ConfigError("need at least 2 folds")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


_LIST_FIELDS = {"datasets": str, "algos": str, "lambda_grid": float}
_SCALAR_PARSERS = {int: int, float: float, str: str}


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, list):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def config_to_text(cfg: ExperimentConfig) -> str:
    lines = [f"{f.name} = {_format_value(getattr(cfg, f.name))}"
             for f in dataclasses.fields(cfg)]
    return "\n".join(lines) + "\n"


def config_from_text(text: str, path: str = "<config>") -> ExperimentConfig:
    cfg = ExperimentConfig()
    known = {f.name: f for f in dataclasses.fields(cfg)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            setattr(cfg, key, _parse_config_value(key, value, known[key].type))
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}")
    return cfg


def _parse_config_value(key: str, value: str, _type_hint) -> object:
    if key in _LIST_FIELDS:
        if not value:
            return []
        caster = _LIST_FIELDS[key]
        return [caster(v.strip()) for v in value.split(",")]
    if value == "none":
        return None
    if value in ("true", "false"):
        return value == "true"
    if key in ("label_count", "folds", "seed", "outer_epochs", "inner_steps", "workers"):
        return int(value)
    if key in ("initial_step", "tolerance"):
        return float(value)
    return value


# metrics are invariant to where results land and how many workers run,
# so these fields stay out of the artifact hash
_UNHASHED_FIELDS = ("outdir", "workers")


def config_hash(cfg: ExperimentConfig) -> str:
    lines = [ln for ln in config_to_text(cfg).splitlines()
             if ln.split(" = ")[0] not in _UNHASHED_FIELDS]
    return hashlib.sha256("\n".join(sorted(lines)).encode()).hexdigest()[:10]


def _apply_smoke(cfg: ExperimentConfig) -> ExperimentConfig:
    """CI-scale caps: few epochs, short inner loops, two-point grid."""
    cfg = dataclasses.replace(cfg)
    cfg.outer_epochs = min(cfg.outer_epochs, 3)
    cfg.inner_steps = min(cfg.inner_steps, 500) if cfg.inner_steps else 500
    if len(cfg.lambda_grid) > 2:
        cfg.lambda_grid = [min(cfg.lambda_grid), max(cfg.lambda_grid)]
    return cfg


def _optimizer_config(cfg: ExperimentConfig, seed: int | None = None) -> OptimizerConfig:
    return OptimizerConfig(outer_epochs=cfg.outer_epochs, inner_steps=cfg.inner_steps,
                           initial_step=cfg.initial_step, tolerance=cfg.tolerance,
                           seed=cfg.seed if seed is None else seed)


def _resolve_workers(requested: int) -> int:
    env = os.environ.get("MLRANK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"MLRANK_THREADS must be an integer, got {env!r}")
    return requested


def _load_dataset(path: str, fmt: str, label_count: int | None, keep_trivial: bool) -> MultiLabelDataset:
    if fmt == "csv":
        return load_csv(path, label_count, keep_trivial=keep_trivial)
    return load_sparse(path, keep_trivial=keep_trivial)


# ---------------------------------------------------------------------------
# report rendering
# ---------------------------------------------------------------------------


def render_summary_markdown(table: dict[str, dict[str, tuple[float, float]]],
                            algos: list[str], note: str = "") -> str:
    """Benchmark table: rows are datasets, cells ``mean +- std`` ranking loss.

    The best entry per dataset gets a dagger, the top two are bold.
    """
    lines = ["| Dataset | " + " | ".join(algos) + " |",
             "|---" * (len(algos) + 1) + "|"]
    for dataset in sorted(table):
        row = table[dataset]
        present = [a for a in algos if a in row]
        order = sorted(present, key=lambda a: row[a][0])
        top_two = set(order[:2])
        best = order[0] if order else None
        cells = []
        for a in algos:
            if a not in row:
                cells.append("-")
                continue
            mean, std = row[a]
            cell = f"{mean:.4f} ± {std:.4f}"
            if a == best:
                cell += "†"
            if a in top_two:
                cell = f"**{cell}**"
            cells.append(cell)
        lines.append("| " + dataset + " | " + " | ".join(cells) + " |")
    if note:
        lines += ["", note]
    return "\n".join(lines) + "\n"


_SVG_COLORS = ("#4878cf", "#ee854a", "#6acc65", "#d65f5f", "#956cb4")


def render_runtime_svg(seconds: dict[str, dict[str, float]], algos: list[str]) -> str:
    """Log-scale grouped bar chart of training seconds, hand-rolled SVG."""
    datasets = sorted(seconds)
    values = [seconds[d].get(a, 0.0) for d in datasets for a in algos]
    positive = [v for v in values if v > 0.0]
    vmax = max(positive, default=1.0)
    vmin = min(positive, default=0.1)
    lo = np.floor(np.log10(vmin)) - 0.2
    hi = np.ceil(np.log10(vmax)) + 0.2
    span = max(hi - lo, 1.0)

    bar_w, gap, group_gap = 22, 4, 30
    group_w = len(algos) * (bar_w + gap) + group_gap
    plot_h, margin_l, margin_t, margin_b = 260, 60, 30, 70
    width = margin_l + len(datasets) * group_w + 40
    height = margin_t + plot_h + margin_b

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{margin_l}" y="16" font-size="13">training wall time per algorithm '
             f'(seconds, log scale)</text>']
    # y axis decade ticks
    for e in range(int(np.floor(lo)), int(np.ceil(hi)) + 1):
        frac = (e - lo) / span
        if not 0.0 <= frac <= 1.0:
            continue
        y = margin_t + plot_h - frac * plot_h
        parts.append(f'<line x1="{margin_l - 4}" y1="{y:.1f}" x2="{width - 20}" y2="{y:.1f}" '
                     f'stroke="#dddddd"/>')
        parts.append(f'<text x="{margin_l - 8}" y="{y + 4:.1f}" text-anchor="end">1e{e}</text>')
    # bars
    for di, dataset in enumerate(datasets):
        gx = margin_l + di * group_w
        for ai, algo in enumerate(algos):
            v = seconds[dataset].get(algo, 0.0)
            x = gx + ai * (bar_w + gap)
            if v > 0.0:
                frac = (np.log10(v) - lo) / span
                h = max(frac, 0.0) * plot_h
            else:
                h = 0.0
            y = margin_t + plot_h - h
            color = _SVG_COLORS[ai % len(_SVG_COLORS)]
            parts.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w}" height="{h:.1f}" '
                         f'fill="{color}"><title>{dataset} {algo}: {v:.3g}s</title></rect>')
        label_x = gx + (len(algos) * (bar_w + gap)) / 2
        parts.append(f'<text x="{label_x:.1f}" y="{margin_t + plot_h + 16}" '
                     f'text-anchor="middle">{dataset}</text>')
    # legend
    for ai, algo in enumerate(algos):
        x = margin_l + ai * 70
        y = margin_t + plot_h + 36
        color = _SVG_COLORS[ai % len(_SVG_COLORS)]
        parts.append(f'<rect x="{x}" y="{y}" width="12" height="12" fill="{color}"/>')
        parts.append(f'<text x="{x + 16}" y="{y + 10}">{algo}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


_BENCH_CSV_HEADER = "dataset,algo,fold,lambda,ranking_loss,partial_ranking_loss,seconds"


def _bench_rows(result: CvResult) -> list[str]:
    rows = []
    for f in range(result.folds):
        rows.append(",".join([
            result.dataset, result.algorithm, str(f),
            f"{result.best_lambda:.17g}",
            f"{result.fold_ranking_losses[f]:.17g}",
            f"{result.fold_partial_losses[f]:.17g}",
            f"{result.fold_seconds[f]:.6f}",
        ]))
    return rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_convert(args) -> int:
    fmt_in = args.from_format or ("csv" if args.input.endswith(".csv") else "sparse")
    data = _load_dataset(args.input, fmt_in, args.labels, args.keep_trivial)
    if data.dropped_trivial:
        print(f"dropped {data.dropped_trivial} trivial instances")
    if args.to == "csv":
        save_csv(data, args.output)
    else:
        save_sparse(data, args.output)
    print(f"wrote {args.output} ({data.n} instances, d={data.d}, c={data.c})")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = ExperimentConfig(datasets=[args.data], format=args.format,
                           label_count=args.labels, base=args.base,
                           outer_epochs=args.epochs, inner_steps=args.inner_steps,
                           initial_step=args.eta0, tolerance=args.tolerance,
                           standardize=args.standardize, bias=args.bias,
                           keep_trivial=args.keep_trivial, seed=args.seed,
                           smoke=args.smoke)
    if args.algo not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {args.algo!r}")
    if cfg.base not in BASE_KINDS:
        raise ConfigError(f"unknown base loss {cfg.base!r}")
    if cfg.smoke:
        cfg = _apply_smoke(cfg)
    data = _load_dataset(args.data, cfg.format, cfg.label_count, cfg.keep_trivial)
    if data.dropped_trivial:
        print(f"dropped {data.dropped_trivial} trivial instances")
    prepared, _ = prepare_data(data, cfg.standardize, cfg.bias)
    model, trace = train_with_trace(prepared, args.algo, args.lam, BaseLoss(cfg.base),
                                    _optimizer_config(cfg))
    save_model(model, args.out)
    if args.trace:
        trace.to_csv(args.trace)
    report = evaluate(model, prepared)
    print(f"saved model to {args.out}")
    print(f"epochs run: {len(trace.records)}  stop: {trace.stop_reason}")
    print(f"training ranking loss: {report.ranking_loss:.6f}  "
          f"partial: {report.partial_ranking_loss:.6f}")
    return EXIT_OK


def cmd_cv(args) -> int:
    grid = [float(x) for x in args.grid.split(",")] if args.grid else list(DEFAULT_GRID)
    cfg = ExperimentConfig(datasets=[args.data], format=args.format,
                           label_count=args.labels, base=args.base,
                           lambda_grid=grid, folds=args.folds, seed=args.seed,
                           outer_epochs=args.epochs, inner_steps=args.inner_steps,
                           initial_step=args.eta0, tolerance=args.tolerance,
                           standardize=args.standardize, bias=args.bias,
                           select_on_test_folds=args.select_on_test_folds,
                           keep_trivial=args.keep_trivial,
                           workers=args.workers, smoke=args.smoke)
    cfg.validate()
    if args.algo not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {args.algo!r}")
    if cfg.smoke:
        cfg = _apply_smoke(cfg)
    workers = _resolve_workers(cfg.workers)
    data = _load_dataset(args.data, cfg.format, cfg.label_count, cfg.keep_trivial)
    if data.dropped_trivial:
        print(f"dropped {data.dropped_trivial} trivial instances")
    result = cross_validate(data, args.algo, cfg.lambda_grid, k=cfg.folds, seed=cfg.seed,
                            base=BaseLoss(cfg.base), optimizer_cfg=_optimizer_config(cfg),
                            select_on_test_folds=cfg.select_on_test_folds,
                            workers=workers, standardize=cfg.standardize, bias=cfg.bias)
    print(f"dataset {result.dataset}: n={data.n} d={data.d} c={data.c}")
    print(f"algorithm {result.algorithm} ({result.protocol}), {result.folds} folds, "
          f"seed {result.seed}")
    print(f"selected lambda: {result.best_lambda:g}")
    print(f"ranking loss: {result.mean_ranking_loss:.4f} ± {result.std_ranking_loss:.4f}")
    print(f"partial ranking loss: {result.mean_partial_ranking_loss:.4f} ± "
          f"{result.std_partial_ranking_loss:.4f}")
    print(f"grid seconds: {result.selection_seconds:.2f}  final seconds: "
          f"{result.total_seconds:.2f}")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(_BENCH_CSV_HEADER + "\n")
            fh.write("\n".join(_bench_rows(result)) + "\n")
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        cfg = config_from_text(text, args.config)
    else:
        cfg = ExperimentConfig()
    if args.data:
        cfg.datasets = args.data
    if args.algos:
        cfg.algos = args.algos.split(",")
    if args.grid:
        cfg.lambda_grid = [float(x) for x in args.grid.split(",")]
    for attr, value in (("format", args.format), ("label_count", args.labels),
                        ("base", args.base), ("folds", args.folds),
                        ("seed", args.seed), ("workers", args.workers),
                        ("outdir", args.outdir)):
        if value is not None:
            setattr(cfg, attr, value)
    if args.select_on_test_folds:
        cfg.select_on_test_folds = True
    if args.smoke:
        cfg.smoke = True
    cfg.validate()

    run_cfg = _apply_smoke(cfg) if cfg.smoke else cfg
    tag = config_hash(cfg)
    outdir = Path(cfg.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_IO
    workers = _resolve_workers(run_cfg.workers)

    table: dict[str, dict[str, tuple[float, float]]] = {}
    runtime: dict[str, dict[str, float]] = {}
    for path in run_cfg.datasets:
        data = _load_dataset(path, run_cfg.format, run_cfg.label_count, run_cfg.keep_trivial)
        if data.dropped_trivial:
            print(f"{data.name}: dropped {data.dropped_trivial} trivial instances")
        rows: list[str] = []
        for algo in run_cfg.algos:
            result = cross_validate(
                data, algo, run_cfg.lambda_grid, k=run_cfg.folds, seed=run_cfg.seed,
                base=BaseLoss(run_cfg.base), optimizer_cfg=_optimizer_config(run_cfg),
                select_on_test_folds=run_cfg.select_on_test_folds, workers=workers,
                standardize=run_cfg.standardize, bias=run_cfg.bias)
            rows.extend(_bench_rows(result))
            table.setdefault(data.name, {})[algo] = (result.mean_ranking_loss,
                                                     result.std_ranking_loss)
            runtime.setdefault(data.name, {})[algo] = (result.selection_seconds
                                                       + result.total_seconds)
            print(f"{data.name} {algo}: ranking loss {result.mean_ranking_loss:.4f} "
                  f"± {result.std_ranking_loss:.4f} (lambda {result.best_lambda:g})")
        csv_path = outdir / f"bench_{data.name}_{tag}.csv"
        csv_path.write_text(_BENCH_CSV_HEADER + "\n" + "\n".join(rows) + "\n",
                            encoding="utf-8")
        print(f"wrote {csv_path}")

    note = f"configuration hash: {tag}"
    if cfg.smoke:
        note += " (smoke mode: reduced epochs and lambda grid; metrics are not comparable)"
    summary_path = outdir / f"summary_{tag}.md"
    summary_path.write_text(render_summary_markdown(table, list(run_cfg.algos), note),
                            encoding="utf-8")
    runtime_csv = outdir / f"runtime_{tag}.csv"
    with open(runtime_csv, "w", encoding="utf-8") as fh:
        fh.write("dataset,algo,seconds\n")
        for dataset in sorted(runtime):
            for algo in run_cfg.algos:
                if algo in runtime[dataset]:
                    fh.write(f"{dataset},{algo},{runtime[dataset][algo]:.6f}\n")
    svg_path = outdir / f"runtime_{tag}.svg"
    svg_path.write_text(render_runtime_svg(runtime, list(run_cfg.algos)), encoding="utf-8")
    config_path = outdir / f"config_{tag}.txt"
    config_path.write_text(config_to_text(cfg), encoding="utf-8")
    print(f"wrote {summary_path}, {runtime_csv}, {svg_path}, {config_path}")
    return EXIT_OK


def _fraction_str(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return f"{x:.12g}"


def cmd_consistency(args) -> int:
    if args.scheme not in ("u1", "u2", "u3", "u4"):
        raise ConfigError(f"scheme must be one of u1..u4, not {args.scheme!r}")
    if args.base not in BASE_KINDS:
        raise ConfigError(f"unknown base loss {args.base!r}")
    base = BaseLoss(args.base)
    records: list[dict] = []

    tau = cons.necessary_condition_tau(args.scheme, args.c)
    if tau.holds:
        print(f"{args.scheme} at c={args.c}: product condition holds, tau = "
              f"{_fraction_str(tau.tau)}")
    else:
        k1, k2, r1, r2 = tau.witness
        print(f"{args.scheme} at c={args.c}: product condition FAILS; split sizes "
              f"{k1} and {k2} give ratios {_fraction_str(r1)} vs {_fraction_str(r2)}")
    records.append({"type": "tau", "scheme": args.scheme, "c": args.c,
                    "holds": tau.holds,
                    "tau": _fraction_str(tau.tau) if tau.holds else None,
                    "witness": None if tau.holds else
                    [str(tau.witness[0]), str(tau.witness[1]),
                     _fraction_str(tau.witness[2]), _fraction_str(tau.witness[3])]})

    if not tau.holds:
        dist = cons.tau_witness_distribution(args.scheme, args.c)
        verdict = cons.check_consistency_on_distribution(
            dist, cons.scheme_assignment(args.scheme))
        w = verdict.witness
        print("constructive two-atom distribution:")
        for atom, p in zip(dist.atoms, dist.probs):
            print(f"  P({_fmt_atom(atom)}) = {p:.6f}")
        print(f"  sign conflict at labels ({w.p}, {w.q}): measure demands "
              f"{w.p} above {w.q} ({w.delta_products[0]:.6g} > {w.delta_products[1]:.6g}) "
              f"but surrogate scores do not ({w.phi_products[0]:.6g} <= {w.phi_products[1]:.6g})")
        records.append({"type": "constructive", "atoms": dist.atoms.tolist(),
                        "probs": dist.probs.tolist(), "pair": [w.p, w.q],
                        "delta_products": list(w.delta_products),
                        "phi_products": list(w.phi_products)})

    if base.kind == "hinge":
        record = cons.hinge_counterexample()
        print("hinge tie counterexample (c=2):")
        for atom, p in zip(record.dist.atoms, record.dist.probs):
            print(f"  P({_fmt_atom(atom)}) = {p:.6f}")
        print(f"  hinge Bayes scores: {record.bayes.scores.tolist()}  "
              f"member of measure-optimal set: {record.membership.member}")
        records.append({"type": "hinge_counterexample",
                        "atoms": record.dist.atoms.tolist(),
                        "probs": record.dist.probs.tolist(),
                        "bayes_scores": record.bayes.scores.tolist(),
                        "member": record.membership.member})

    search_base = base if base.kind in ("exponential", "logistic", "squared_hinge") else None
    search = cons.random_violation_search(args.scheme, args.c, args.trials,
                                          seed=args.seed, base=search_base)
    print(f"random search: {len(search.violations)} violating distributions "
          f"in {search.trials} trials (seed {args.seed})")
    for v in search.violations[:args.show]:
        print(f"  trial {v.trial}: conflict at labels ({v.witness.p}, {v.witness.q})")
    for v in search.violations:
        records.append({"type": "violation", "trial": v.trial,
                        "atoms": v.dist.atoms.tolist(), "probs": v.dist.probs.tolist(),
                        "pair": [v.witness.p, v.witness.q],
                        "delta_products": list(v.witness.delta_products),
                        "phi_products": list(v.witness.phi_products)})

    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec) + "\n")
        print(f"wrote {args.report}")
    return EXIT_OK


def _fmt_atom(atom: np.ndarray) -> str:
    return "(" + ",".join("+1" if v > 0 else "-1" for v in atom) + ")"


def cmd_bounds(args) -> int:
    model = load_model(args.model)
    data = _load_dataset(args.data, args.format, args.labels, keep_trivial=False)
    prepared, _ = prepare_data(data, args.standardize, args.bias)
    if prepared.d != model.d:
        raise ConfigError(
            f"model expects d={model.d} features but dataset provides {prepared.d}; "
            "match the --standardize/--bias flags used at training time")
    base = BaseLoss(model.base)
    report = evaluate(model, prepared, base)
    scores = predict(model, prepared.features)
    z_max = float(np.abs(scores).max())
    rho = bounds_mod.base_lipschitz(base, z_max)
    B = bounds_mod.base_sup(base, z_max)
    weight_norm = float(np.linalg.norm(model.weights))
    feature_norm = float(np.linalg.norm(prepared.features, axis=1).max())

    print(f"model {args.model}: algorithm {model.algorithm}, base {base.kind}, "
          f"lambda {model.lam:g}")
    print(f"dataset {data.name}: n={prepared.n} d={prepared.d} c={prepared.c}")
    print(f"empirical ranking loss: {report.ranking_loss:.6f}")
    print(f"margin domain |z| <= {z_max:.4g} gives rho={rho:.6g}, B={B:.6g} "
          f"(plug-in weight_norm={weight_norm:.6g}, feature_norm={feature_norm:.6g})")
    log_note = "log2" if args.log2 else "natural log"
    print(f"confidence delta={args.delta:g} ({log_note})")
    for which in bounds_mod.BOUNDED_SCHEMES:
        inputs = bounds_mod.BoundInputs(
            empirical_risk=report.surrogate_risks[which], n=prepared.n, c=prepared.c,
            rho=rho, B=B, weight_norm=weight_norm, feature_norm=feature_norm,
            delta=args.delta, log2=args.log2)
        value = bounds_mod.THEOREM_BOUNDS[which](inputs)
        print(f"  {which}: empirical risk {inputs.empirical_risk:.6f} -> "
              f"ranking-loss bound {value:.6f}")
    return EXIT_OK


def cmd_report(args) -> int:
    table: dict[str, dict[str, tuple[float, float]]] = {}
    seconds: dict[str, dict[str, float]] = {}
    algos_seen: list[str] = []
    per_cell: dict[tuple[str, str], list[tuple[float, float]]] = {}
    for path in args.results:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != _BENCH_CSV_HEADER:
                raise ConfigError(f"{path}: unexpected header {header!r}")
            for line in fh:
                cells = line.strip().split(",")
                if len(cells) != 7:
                    continue
                dataset, algo = cells[0], cells[1]
                if algo not in algos_seen:
                    algos_seen.append(algo)
                per_cell.setdefault((dataset, algo), []).append(
                    (float(cells[4]), float(cells[6])))
    for (dataset, algo), folds in per_cell.items():
        losses_ = np.array([f[0] for f in folds])
        table.setdefault(dataset, {})[algo] = (float(losses_.mean()), float(losses_.std()))
        seconds.setdefault(dataset, {})[algo] = float(sum(f[1] for f in folds))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    md_path = outdir / "summary_report.md"
    md_path.write_text(render_summary_markdown(table, algos_seen), encoding="utf-8")
    svg_path = outdir / "runtime_report.svg"
    svg_path.write_text(render_runtime_svg(seconds, algos_seen), encoding="utf-8")
    print(f"wrote {md_path} and {svg_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("sparse", "csv"), default="sparse",
                   help="dataset file format")
    p.add_argument("--labels", type=int, default=None,
                   help="label column count (csv format)")
    p.add_argument("--keep-trivial", action="store_true",
                   help="keep all-positive/all-negative instances when loading")


def _add_optimizer_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epochs", type=int, default=30, help="outer epochs")
    p.add_argument("--inner-steps", type=int, default=None,
                   help="inner steps per epoch (default 2n)")
    p.add_argument("--eta0", type=float, default=0.1, help="first-epoch step size")
    p.add_argument("--tolerance", type=float, default=1e-7,
                   help="relative objective change to stop at")


def _add_preprocess_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-standardize", dest="standardize", action="store_false",
                   help="skip zero-mean/unit-variance feature scaling")
    p.add_argument("--no-bias", dest="bias", action="store_false",
                   help="skip the constant bias feature")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlrank",
                                     description="multi-label ranking toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="rewrite a dataset between formats")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--to", choices=("sparse", "csv"), required=True)
    p.add_argument("--from", dest="from_format", choices=("sparse", "csv"), default=None)
    p.add_argument("--labels", type=int, default=None)
    p.add_argument("--keep-trivial", action="store_true")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("train", help="fit one model")
    p.add_argument("--data", required=True)
    p.add_argument("--algo", required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--base", default="logistic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--trace", default=None, help="optional objective trace CSV")
    p.add_argument("--smoke", action="store_true")
    _add_dataset_args(p)
    _add_optimizer_args(p)
    _add_preprocess_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="cross-validated lambda selection")
    p.add_argument("--data", required=True)
    p.add_argument("--algo", required=True)
    p.add_argument("--grid", default=None, help="comma-separated lambda values")
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--base", default="logistic")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--select-on-test-folds", action="store_true",
                   help="score the grid on the test folds instead of a nested holdout")
    p.add_argument("--csv", default=None, help="write per-fold metrics CSV")
    p.add_argument("--smoke", action="store_true")
    _add_dataset_args(p)
    _add_optimizer_args(p)
    _add_preprocess_args(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("bench", help="benchmark grid over datasets and algorithms")
    p.add_argument("--config", default=None, help="experiment config file")
    p.add_argument("--data", nargs="*", default=None, help="dataset paths")
    p.add_argument("--algos", default=None, help="comma-separated algorithm ids")
    p.add_argument("--grid", default=None, help="comma-separated lambda values")
    p.add_argument("--format", choices=("sparse", "csv"), default=None)
    p.add_argument("--labels", type=int, default=None)
    p.add_argument("--base", default=None)
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--outdir", default=None)
    p.add_argument("--select-on-test-folds", action="store_true")
    p.add_argument("--smoke", action="store_true",
                   help="cap epochs and grid for a fast completeness check")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("consistency", help="consistency analysis for a scheme")
    p.add_argument("--scheme", required=True)
    p.add_argument("--base", default="logistic")
    p.add_argument("--c", type=int, default=4, help="number of labels")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--show", type=int, default=5, help="violations to print")
    p.add_argument("--report", default=None, help="JSON-lines verdict file")
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("bounds", help="deviation bounds for a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--log2", action="store_true",
                   help="use log base 2 in the confidence term")
    _add_dataset_args(p)
    _add_preprocess_args(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("report", help="summary table and charts from bench CSVs")
    p.add_argument("results", nargs="+", help="bench per-dataset CSV files")
    p.add_argument("--outdir", default="results")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DatasetFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteObjectiveError as exc:
        print(f"error: training aborted: {exc}", file=sys.stderr)
        return EXIT_TASK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
