"""Training pipeline: preparation, fitting, evaluation, cross-validation."""

import numpy as np
import pytest

from mlrank.dataset import synthetic_linear
from mlrank.losses import LOGISTIC
from mlrank.model import LinearModel
from mlrank.optimizer import OptimizerConfig
from mlrank.trainer import (cross_validate, evaluate, prepare_data, task_seed,
                            train, train_with_trace)

LN2 = np.log(2.0)


def test_task_seed_is_stable_and_distinct():
    s = task_seed(0, 1, 2, "u3", "train")
    assert s == task_seed(0, 1, 2, "u3", "train")
    others = {task_seed(0, 1, 2, "u3", "select"), task_seed(0, 1, 2, "u2", "train"),
              task_seed(0, 1, 3, "u3", "train"), task_seed(0, 2, 2, "u3", "train"),
              task_seed(1, 1, 2, "u3", "train")}
    assert s not in others and len(others) == 5
    assert 0 <= s < 2 ** 64


def test_prepare_data_reuses_parameters():
    train_part = synthetic_linear(60, 5, 2, seed=0)
    test_part = synthetic_linear(30, 5, 2, seed=1)
    prepped_train, params = prepare_data(train_part)
    prepped_test, params2 = prepare_data(test_part, params=params)
    assert params2 is params
    assert prepped_train.d == prepped_test.d == 6  # bias appended
    # test features transformed with training statistics, not its own
    own, _ = prepare_data(test_part)
    assert (prepped_test.features[:, :5] != own.features[:, :5]).any()


def test_training_fits_separable_data():
    data = synthetic_linear(80, 6, 2, seed=2)
    prepped, _ = prepare_data(data)
    for algo in ("pa", "u3"):
        model = train(prepped, algo, 1e-8,
                      cfg=OptimizerConfig(outer_epochs=10, seed=0))
        report = evaluate(model, prepped)
        assert report.ranking_loss < 0.05, algo


def test_schemes_coincide_at_two_labels():
    # at c = 2 every nontrivial row has |S+| = |S-| = 1, so the u2/u3/u4
    # weights are all identically 1 and the fits must agree bitwise
    data = synthetic_linear(50, 4, 2, seed=3, noise=0.05)
    prepped, _ = prepare_data(data)
    cfg = OptimizerConfig(outer_epochs=5, seed=7)
    fits = [train(prepped, algo, 1e-4, cfg=cfg).weights
            for algo in ("u2", "u3", "u4")]
    np.testing.assert_array_equal(fits[0], fits[1])
    np.testing.assert_array_equal(fits[0], fits[2])


def test_zero_model_surrogate_risks():
    data = synthetic_linear(40, 5, 2, seed=4)
    model = LinearModel(np.zeros((5, 2)), base="logistic")
    report = evaluate(model, data)
    # all scores zero: each coordinate contributes ell(0) = ln 2
    assert report.surrogate_risks["u3"] == pytest.approx(2 * LN2)
    assert report.surrogate_risks["u2"] == pytest.approx(2 * LN2)
    assert report.surrogate_risks["u1"] == pytest.approx(LN2)
    assert report.surrogate_risks["pa"] == pytest.approx(LN2)
    assert report.ranking_loss == 1.0  # ties count fully
    assert report.partial_ranking_loss == pytest.approx(0.5)


def test_evaluate_skips_trivial_rows():
    data = synthetic_linear(20, 4, 2, seed=5)
    labels = data.labels.copy()
    labels[[2, 11]] = 1.0
    tampered = type(data)(data.features, labels)
    model = LinearModel(np.zeros((4, 2)))
    report = evaluate(model, tampered)
    assert report.n_evaluated == 18 and report.n_skipped == 2
    all_trivial = type(data)(data.features, np.ones_like(labels))
    with pytest.raises(ValueError):
        evaluate(model, all_trivial)


def test_train_with_trace_reports_progress():
    data = synthetic_linear(40, 4, 2, seed=6)
    prepped, _ = prepare_data(data)
    model, trace = train_with_trace(prepped, "u1", 1e-6,
                                    cfg=OptimizerConfig(outer_epochs=4,
                                                        tolerance=0.0))
    assert len(trace.records) == 4
    assert trace.objectives[-1] <= trace.objectives[0]
    assert model.algorithm == "u1" and model.base == "logistic"


def test_train_rejects_unknown_algorithm():
    data = synthetic_linear(10, 3, 2, seed=7)
    with pytest.raises(ValueError):
        train(data, "boost", 0.1)


def test_huge_regularizer_is_stabilized():
    data = synthetic_linear(30, 4, 2, seed=8)
    prepped, _ = prepare_data(data)
    model = train(prepped, "u2", 1e2, cfg=OptimizerConfig(outer_epochs=5, seed=0))
    assert np.all(np.isfinite(model.weights))
    assert np.linalg.norm(model.weights) < 0.1


CV_CFG = OptimizerConfig(outer_epochs=3, seed=0)


def test_cross_validate_nested_holdout():
    data = synthetic_linear(60, 5, 3, seed=9, noise=0.1)
    result = cross_validate(data, "u3", [1e-6, 1e-2], k=3, seed=1,
                            optimizer_cfg=CV_CFG)
    assert result.protocol == "nested-holdout"
    assert result.best_lambda in (1e-6, 1e-2)
    assert result.validation_losses.shape == (3, 2)
    assert len(result.fold_ranking_losses) == 3
    assert 0.0 <= result.mean_ranking_loss <= 1.0
    assert result.std_ranking_loss >= 0.0
    assert result.total_seconds > 0.0 and result.selection_seconds > 0.0


def test_cross_validate_test_fold_protocol():
    data = synthetic_linear(45, 4, 2, seed=10, noise=0.1)
    result = cross_validate(data, "u1", [1e-6, 1e-2], k=3, seed=2,
                            optimizer_cfg=CV_CFG, select_on_test_folds=True)
    assert result.protocol == "test-fold"
    # in this mode the reported fold metrics are the grid column at best lambda
    col = result.validation_losses[:, result.best_lambda_index]
    np.testing.assert_allclose(result.fold_ranking_losses, col)


def test_cross_validate_worker_pool_is_deterministic():
    data = synthetic_linear(48, 4, 2, seed=11, noise=0.1)
    kwargs = dict(k=3, seed=3, optimizer_cfg=CV_CFG)
    r1 = cross_validate(data, "u2", [1e-6, 1e-2], workers=1, **kwargs)
    r2 = cross_validate(data, "u2", [1e-6, 1e-2], workers=2, **kwargs)
    np.testing.assert_array_equal(r1.validation_losses, r2.validation_losses)
    np.testing.assert_array_equal(r1.fold_ranking_losses, r2.fold_ranking_losses)
    np.testing.assert_array_equal(r1.fold_partial_losses, r2.fold_partial_losses)
    assert r1.best_lambda == r2.best_lambda


def test_cross_validate_sorts_grid_ascending():
    data = synthetic_linear(30, 3, 2, seed=12)
    result = cross_validate(data, "u1", [1e-2, 1e-8], k=3, seed=4,
                            optimizer_cfg=CV_CFG)
    assert result.lambda_grid == [1e-8, 1e-2]
    assert result.best_lambda == result.lambda_grid[result.best_lambda_index]


def test_cross_validate_rejects_bad_input():
    data = synthetic_linear(30, 3, 2, seed=13)
    with pytest.raises(ValueError):
        cross_validate(data, "nope", [1e-4], optimizer_cfg=CV_CFG)
    with pytest.raises(ValueError):
        cross_validate(data, "u1", [], optimizer_cfg=CV_CFG)
