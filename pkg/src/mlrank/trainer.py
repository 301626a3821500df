"""Training pipelines: single fits, evaluation, cross-validated selection.

The five training algorithms share one linear model and optimizer and differ
only in the surrogate objective:

* ``pa``: pairwise surrogate over relevant/irrelevant label pairs,
* ``u1`` .. ``u4``: univariate surrogates under the four penalty schemes.

``cross_validate`` implements seeded k-fold selection over a lambda grid.
By default the grid is scored on a nested 80/20 holdout inside each fold's
training portion, so the reported test metrics never see the selection data;
``select_on_test_folds=True`` swaps in the cheaper protocol that scores the
grid on the test folds directly.  The (fold x lambda) task grid runs on an
optional process pool; every task derives its own seed from the master seed
and its grid coordinates, so results do not depend on scheduling order or
pool size.
"""

from __future__ import annotations

import hashlib
import time
from concurrent import futures
from dataclasses import dataclass, replace

import numpy as np

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover - fallback when threadpoolctl is absent
    from contextlib import contextmanager

    @contextmanager
    def threadpool_limits(limits=None):
        yield

from . import losses
from .dataset import (MultiLabelDataset, StandardizationParams, append_bias,
                      kfold_split, standardize_apply, standardize_fit)
from .losses import LOGISTIC, BaseLoss, PenaltyScheme
from .model import LinearModel, Objective, ObjectiveSpec, predict
from .optimizer import OptimizationTrace, OptimizerConfig, minimize_svrg_bb

ALGORITHMS = ("pa", "u1", "u2", "u3", "u4")


def task_seed(master_seed: int, fold: int, lam_index: int, algo: str, phase: str = "train") -> int:
    """Stable per-task seed; independent of scheduling and pool size."""
    key = f"{master_seed}:{fold}:{lam_index}:{algo}:{phase}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little")


def prepare_data(data: MultiLabelDataset, standardize: bool = True, bias: bool = True,
                 params: StandardizationParams | None = None
                 ) -> tuple[MultiLabelDataset, StandardizationParams | None]:
    """Standardize (fitting on ``data`` unless ``params`` given) and add bias."""
    if standardize:
        if params is None:
            params = standardize_fit(data)
        data = standardize_apply(data, params)
    if bias:
        data = append_bias(data)
    return data, params


def _stabilized(cfg: OptimizerConfig, lam: float) -> OptimizerConfig:
    # keep the regularizer's per-step shrink factor |1 - 2*lam*eta| away from
    # divergence when lambda is large relative to the configured step
    if lam > 0.0 and cfg.max_step is None:
        return replace(cfg, max_step=1.0 / (4.0 * lam))
    return cfg


def train_with_trace(data: MultiLabelDataset, algo: str, lam: float,
                     base: BaseLoss = LOGISTIC, cfg: OptimizerConfig | None = None
                     ) -> tuple[LinearModel, OptimizationTrace]:
    """Fit one linear model from a zero start; returns the trace as well."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}, expected one of {ALGORITHMS}")
    cfg = _stabilized(cfg or OptimizerConfig(), lam)
    objective = Objective(data.features, data.labels, ObjectiveSpec(algo, base, lam))
    W0 = np.zeros((data.d, data.c))
    W, trace = minimize_svrg_bb(objective, W0, cfg)
    model = LinearModel(W, algorithm=algo, base=base.kind, lam=lam, seed=cfg.seed)
    return model, trace


def train(data: MultiLabelDataset, algo: str, lam: float, base: BaseLoss = LOGISTIC,
          cfg: OptimizerConfig | None = None) -> LinearModel:
    model, _ = train_with_trace(data, algo, lam, base, cfg)
    return model


@dataclass
class EvalReport:
    """Instance-averaged metrics; trivial label vectors are skipped."""

    ranking_loss: float
    partial_ranking_loss: float
    surrogate_risks: dict[str, float]
    n_evaluated: int
    n_skipped: int


def evaluate(model: LinearModel, data: MultiLabelDataset, base: BaseLoss | None = None) -> EvalReport:
    """Ranking metrics and per-surrogate empirical risks of a model."""
    base = base if base is not None else BaseLoss(model.base)
    scores = predict(model, data.features)
    mask = losses.nontrivial_mask(data.labels)
    if not mask.any():
        raise ValueError("no nontrivial instances to evaluate")
    F, Y = scores[mask], data.labels[mask]
    risks = {"pa": float(losses.pairwise_batch_for(Y, base)(F)[0].mean())}
    for algo in ("u1", "u2", "u3", "u4"):
        vals, _ = losses.univariate_batch(F, Y, base, PenaltyScheme(algo))
        risks[algo] = float(vals.mean())
    return EvalReport(
        ranking_loss=float(losses.ranking_loss_batch(F, Y).mean()),
        partial_ranking_loss=float(losses.ranking_loss_batch(F, Y, partial=True).mean()),
        surrogate_risks=risks,
        n_evaluated=int(mask.sum()),
        n_skipped=int((~mask).sum()),
    )


# ---------------------------------------------------------------------------
# Cross-validation task grid.  Workers get the dataset once via the pool
# initializer; tasks carry row indices only.
# ---------------------------------------------------------------------------

_POOL: dict = {}


@dataclass(frozen=True)
class _TaskSpec:
    phase: str
    fold: int
    lam_index: int
    lam: float
    train_rows: np.ndarray
    eval_rows: np.ndarray
    seed: int


def _pool_init(X: np.ndarray, Y: np.ndarray, algo: str, base_kind: str,
               opt_cfg: OptimizerConfig, standardize: bool, bias: bool) -> None:
    _POOL.update(X=X, Y=Y, algo=algo, base=BaseLoss(base_kind), opt_cfg=opt_cfg,
                 standardize=standardize, bias=bias)


def _run_task(task: _TaskSpec) -> dict:
    # single-threaded BLAS keeps results identical across pool sizes
    with threadpool_limits(limits=1):
        X, Y = _POOL["X"], _POOL["Y"]
        train_set = MultiLabelDataset(X[task.train_rows], Y[task.train_rows])
        eval_set = MultiLabelDataset(X[task.eval_rows], Y[task.eval_rows])
        train_set, params = prepare_data(train_set, _POOL["standardize"], _POOL["bias"])
        eval_set, _ = prepare_data(eval_set, _POOL["standardize"], _POOL["bias"], params=params)
        cfg = replace(_POOL["opt_cfg"], seed=task.seed)
        t0 = time.perf_counter()
        model = train(train_set, _POOL["algo"], task.lam, _POOL["base"], cfg)
        seconds = time.perf_counter() - t0
        report = evaluate(model, eval_set)
    return {"phase": task.phase, "fold": task.fold, "lam_index": task.lam_index,
            "ranking_loss": report.ranking_loss,
            "partial_ranking_loss": report.partial_ranking_loss,
            "seconds": seconds}


def _execute(tasks: list[_TaskSpec], workers: int, init_args: tuple) -> list[dict]:
    if workers <= 1:
        _pool_init(*init_args)
        return [_run_task(t) for t in tasks]
    with futures.ProcessPoolExecutor(max_workers=workers, initializer=_pool_init,
                                     initargs=init_args) as pool:
        return list(pool.map(_run_task, tasks))


@dataclass
class CvResult:
    """Cross-validation outcome for one (dataset, algorithm) pair."""

    dataset: str
    algorithm: str
    base: str
    lambda_grid: list[float]
    folds: int
    seed: int
    protocol: str
    validation_losses: np.ndarray
    best_lambda: float
    best_lambda_index: int
    fold_ranking_losses: np.ndarray
    fold_partial_losses: np.ndarray
    fold_seconds: np.ndarray
    selection_seconds: float = 0.0

    @property
    def mean_ranking_loss(self) -> float:
        return float(self.fold_ranking_losses.mean())

    @property
    def std_ranking_loss(self) -> float:
        return float(self.fold_ranking_losses.std())

    @property
    def mean_partial_ranking_loss(self) -> float:
        return float(self.fold_partial_losses.mean())

    @property
    def std_partial_ranking_loss(self) -> float:
        return float(self.fold_partial_losses.std())

    @property
    def total_seconds(self) -> float:
        return float(self.fold_seconds.sum())


def cross_validate(data: MultiLabelDataset, algo: str, lambda_grid, k: int = 3,
                   seed: int = 0, base: BaseLoss = LOGISTIC,
                   optimizer_cfg: OptimizerConfig | None = None,
                   select_on_test_folds: bool = False, workers: int = 1,
                   standardize: bool = True, bias: bool = True) -> CvResult:
    """Select lambda by k-fold grid search, then score the chosen model.

    Returns per-fold test metrics at the selected lambda.  The grid is
    sorted ascending and ties in mean validation loss break toward the
    smaller lambda.
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}, expected one of {ALGORITHMS}")
    grid = sorted(float(l) for l in lambda_grid)
    if not grid:
        raise ValueError("lambda grid is empty")
    if not losses.nontrivial_mask(data.labels).all():
        raise ValueError("cross_validate requires nontrivial instances; filter the data first")
    opt_cfg = optimizer_cfg or OptimizerConfig()
    fold_of = kfold_split(data.n, k, seed)
    all_rows = np.arange(data.n)

    select_tasks: list[_TaskSpec] = []
    fold_rows: list[tuple[np.ndarray, np.ndarray]] = []
    for f in range(k):
        train_rows = all_rows[fold_of != f]
        test_rows = all_rows[fold_of == f]
        fold_rows.append((train_rows, test_rows))
        if select_on_test_folds:
            sub_rows, val_rows = train_rows, test_rows
        else:
            rng = np.random.default_rng(task_seed(seed, f, -1, algo, "holdout"))
            perm = train_rows[rng.permutation(train_rows.size)]
            n_val = max(1, int(round(0.2 * perm.size)))
            val_rows, sub_rows = perm[:n_val], perm[n_val:]
        for li, lam in enumerate(grid):
            select_tasks.append(_TaskSpec("select", f, li, lam, sub_rows, val_rows,
                                          task_seed(seed, f, li, algo, "select")))

    init_args = (data.features, data.labels, algo, base.kind, opt_cfg, standardize, bias)
    results = {(r["fold"], r["lam_index"]): r
               for r in _execute(select_tasks, workers, init_args)}
    validation = np.array([[results[(f, li)]["ranking_loss"] for li in range(len(grid))]
                           for f in range(k)])
    best_index = int(np.argmin(validation.mean(axis=0)))
    best_lambda = grid[best_index]

    if select_on_test_folds:
        final = [results[(f, best_index)] for f in range(k)]
    else:
        final_tasks = [_TaskSpec("final", f, best_index, best_lambda,
                                 fold_rows[f][0], fold_rows[f][1],
                                 task_seed(seed, f, best_index, algo, "final"))
                       for f in range(k)]
        by_fold = {r["fold"]: r for r in _execute(final_tasks, workers, init_args)}
        final = [by_fold[f] for f in range(k)]

    return CvResult(
        dataset=data.name, algorithm=algo, base=base.kind, lambda_grid=grid,
        folds=k, seed=seed,
        protocol="test-fold" if select_on_test_folds else "nested-holdout",
        validation_losses=validation,
        best_lambda=best_lambda, best_lambda_index=best_index,
        fold_ranking_losses=np.array([r["ranking_loss"] for r in final]),
        fold_partial_losses=np.array([r["partial_ranking_loss"] for r in final]),
        fold_seconds=np.array([r["seconds"] for r in final]),
        selection_seconds=float(sum(r["seconds"] for r in results.values())),
    )
