import csv
import json
import math

import numpy as np
import pytest

from ideascreen.experiments import (
    GridCell,
    LabeledDataset,
    NonConvergenceError,
    batch_lr_fit,
    dataset_from_fixture,
    full_grid,
    load_dataset,
    log_likelihood,
    log_likelihood_grad,
    metrics,
    run_grid,
    run_trial,
    synthetic_dataset,
    wald_significance,
    write_grid_report,
)


def overlapping_dataset(n=400, seed=2, dim=7):
    """Well-conditioned, non-separable data with a unique optimum."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, dim))
    X[:, 0] = 1.0
    beta_star = rng.normal(size=dim) * 0.8
    p = 1.0 / (1.0 + np.exp(-(X @ beta_star)))
    y = (rng.random(n) < p).astype(int)
    rows = tuple((tuple(map(float, X[i])), int(y[i])) for i in range(n))
    return LabeledDataset(rows=rows)


class TestBatchFit:
    def test_symmetric_two_points(self):
        x = (1.0, 0, 0, 0, 0, 0, 0)
        data = LabeledDataset(rows=((x, 1), (x, 0)))
        fit = batch_lr_fit(data)
        assert fit.beta[0] == pytest.approx(0.0, abs=1e-12)

    def test_gradient_vanishes_at_optimum(self):
        data = overlapping_dataset()
        fit = batch_lr_fit(data, tol=1e-8)
        X = np.array(data.xs())
        g = log_likelihood_grad(fit.beta, X, np.array(data.ys(), dtype=float))
        assert np.max(np.abs(g)) < 1e-8

    def test_likelihood_at_fit_beats_zero_vector(self):
        data = overlapping_dataset(seed=5)
        fit = batch_lr_fit(data)
        X = np.array(data.xs())
        y = np.array(data.ys(), dtype=float)
        assert fit.log_lik >= log_likelihood(np.zeros(7), X, y)

    def test_matches_gradient_ascent_oracle_on_overlapping_data(self):
        # unique interior optimum: both solvers must land on it
        data = overlapping_dataset(n=300, seed=11)
        fit = batch_lr_fit(data, tol=1e-9)

        X = np.array(data.xs())
        y = np.array(data.ys(), dtype=float)
        step = 1.0 / (0.25 * np.linalg.eigvalsh(X.T @ X).max())
        beta = np.zeros(7)
        for _ in range(1_000_000):
            g = log_likelihood_grad(beta, X, y)
            if np.max(np.abs(g)) < 1e-8:
                break
            beta = beta + step * g
        else:
            pytest.fail("gradient-ascent oracle did not converge")
        assert np.max(np.abs(beta - fit.beta)) < 1e-4

    def test_single_label_rejected(self):
        x = (1.0, 0, 0, 0, 0, 0, 0)
        with pytest.raises(ValueError):
            batch_lr_fit(LabeledDataset(rows=((x, 1), (x, 1))))

    def test_iteration_cap_reported(self):
        data = overlapping_dataset(seed=3)
        with pytest.raises(NonConvergenceError):
            batch_lr_fit(data, tol=1e-14, max_iter=2)

    def test_zero_variance_column_frozen(self, fixture_path):
        fit = batch_lr_fit(dataset_from_fixture(fixture_path), tol=1e-6)
        assert 3 not in fit.active          # the owner-type column is constant
        assert fit.beta[3] == 0.0
        assert math.isinf(fit.covariance[3, 3])


class TestGradientCheck:
    def test_against_central_differences(self):
        rng = np.random.default_rng(17)
        h = 1e-6
        worst = 0.0
        for _ in range(20):
            n = int(rng.integers(5, 40))
            X = rng.normal(size=(n, 7)) * 3.0
            X[:, 0] = 1.0
            y = (rng.random(n) < 0.5).astype(float)
            beta = rng.normal(size=7) * 0.5
            g = log_likelihood_grad(beta, X, y)
            for j in range(7):
                e = np.zeros(7)
                e[j] = h
                fd = (log_likelihood(beta + e, X, y) - log_likelihood(beta - e, X, y)) / (2 * h)
                if abs(fd) > 1e-8:
                    worst = max(worst, abs(g[j] - fd) / abs(fd))
        assert worst < 1e-5


class TestWald:
    def test_zero_coefficient_gives_p_one(self, fixture_path):
        fit = batch_lr_fit(dataset_from_fixture(fixture_path), tol=1e-6)
        p = wald_significance(fit)
        assert len(p) == 7
        assert p[3] == 1.0

    def test_monotone_decreasing_in_z(self):
        from ideascreen.experiments import BatchFit

        zs = [0.0, 0.5, 1.0, 1.959964, 3.0, 5.0]
        ps = []
        for z in zs:
            fit = BatchFit(beta=np.array([z]), covariance=np.array([[1.0]]),
                           log_lik=0.0, iterations=1, active=(0,))
            ps.append(wald_significance(fit)[0])
        assert all(b < a for a, b in zip(ps, ps[1:]))

    def test_five_percent_point(self):
        from scipy.stats import norm

        from ideascreen.experiments import BatchFit

        fit = BatchFit(beta=np.array([1.959964]), covariance=np.array([[1.0]]),
                       log_lik=0.0, iterations=1, active=(0,))
        p = wald_significance(fit)[0]
        assert p == pytest.approx(0.05, abs=1e-4)
        assert p == pytest.approx(2 * norm.sf(1.959964), abs=1e-12)


class TestMetrics:
    def test_perfect(self):
        assert metrics(1, 0, 0, 1) == (1.0, 1.0, 1.0)

    def test_arithmetic(self):
        acc, prec, rec = metrics(2, 1, 1, 6)
        assert acc == pytest.approx(0.8)
        assert prec == pytest.approx(2 / 3)
        assert rec == pytest.approx(2 / 3)

    def test_degenerate_denominators(self):
        acc, prec, rec = metrics(0, 0, 0, 4)
        assert acc == 1.0 and prec is None and rec is None

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            metrics(0, 0, 0, 0)


class TestGridCells:
    def test_full_grid_is_75_cells_in_printed_order(self):
        cells = full_grid()
        assert len(cells) == 75
        assert [c.set_no for c in cells] == list(range(1, 76))
        assert (cells[0].epsilon, cells[0].alpha, cells[0].theta) == (0.1, 1.0, 30)
        assert (cells[33].epsilon, cells[33].alpha, cells[33].theta) == (0.5, 1.0, 100)
        assert (cells[73].epsilon, cells[73].alpha, cells[73].theta) == (1.0, 3.0, 100)
        assert (cells[74].epsilon, cells[74].alpha, cells[74].theta) == (1.0, 3.0, 120)

    def test_off_grid_values_rejected(self):
        with pytest.raises(ValueError):
            GridCell(0.2, 1.0, 30)
        with pytest.raises(ValueError):
            GridCell(0.1, 1.5, 30)
        with pytest.raises(ValueError):
            GridCell(0.1, 1.0, 31)


class TestRunTrial:
    def test_minimal_two_rows(self):
        x1 = (1.0, 1.0, 0, 0, 0, 0, 0)
        x2 = (1.0, -1.0, 0, 0, 0, 0, 0)
        data = LabeledDataset(rows=((x1, 1), (x2, 0)))
        report = run_trial(data, GridCell(1.0, 1.0, 30), seed=1)
        assert sum(report.confusion) == 1
        assert report.theory_bound is None     # n < theta

    def test_deterministic_replay(self, fixture_path):
        data = load_dataset(fixture_path)
        cell = GridCell(1.0, 3.0, 100, 74)
        a = run_trial(data, cell, seed=42)
        b = run_trial(data, cell, seed=42)
        for field in ("seed", "accuracy", "precision", "recall", "regret",
                      "theory_bound", "mistakes", "ensemble_size", "confusion"):
            assert getattr(a, field) == getattr(b, field)

    def test_accuracy_beats_chance_on_labelled_synthetic(self):
        cell = GridCell(1.0, 1.0, 50)
        above = 0
        for s in range(30):
            data = synthetic_dataset(241, seed=4000 + s, flip=0.10)
            report = run_trial(data, cell, seed=s, eta0=0.1)
            above += report.accuracy > 0.5
        assert above >= 28

    def test_single_row_rejected(self):
        data = LabeledDataset(rows=(((1.0, 0, 0, 0, 0, 0, 0), 1),))
        with pytest.raises(ValueError):
            run_trial(data, GridCell(1.0, 1.0, 30), seed=0)


class TestRunGrid:
    def test_one_cell_one_trial_equals_that_trial(self, fixture_path):
        data = load_dataset(fixture_path)
        cell = GridCell(0.5, 1.0, 30, 31)
        reports = run_grid(data, [cell], trials=1, seed=9)
        only = reports[0].trials[0]
        summary = reports[0].summary()
        assert summary["accuracy_mean"] == only.accuracy
        assert summary["accuracy_std"] == 0.0

    def test_summary_stats_match_independent_pass(self, fixture_path):
        data = load_dataset(fixture_path)
        cells = [GridCell(0.5, 1.0, 30, 31), GridCell(1.0, 3.0, 100, 74)]
        reports = run_grid(data, cells, trials=8, seed=3)
        for report in reports:
            summary = report.summary()
            accs = np.array([t.accuracy for t in report.trials])
            assert summary["accuracy_mean"] == pytest.approx(accs.mean(), abs=1e-9)
            assert summary["accuracy_std"] == pytest.approx(accs.std(), abs=1e-9)
            assert min(accs) <= summary["accuracy_mean"] <= max(accs)

    def test_report_files_and_determinism(self, tmp_path, fixture_path):
        data = load_dataset(fixture_path)
        cells = [GridCell(0.5, 1.0, 30, 31)]
        for sub in ("a", "b"):
            reports = run_grid(data, cells, trials=3, seed=5)
            write_grid_report(reports, tmp_path / sub, include_timing=False)
        for name in ("trials.csv", "cells.csv", "report.json"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()
        with open(tmp_path / "a" / "trials.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3
        assert "elapsed_ms" not in rows[0]

    def test_timing_columns_present_by_default(self, tmp_path, fixture_path):
        data = load_dataset(fixture_path)
        reports = run_grid(data, [GridCell(0.5, 1.0, 30, 31)], trials=2, seed=5)
        write_grid_report(reports, tmp_path)
        with open(tmp_path / "trials.csv") as fh:
            header = fh.readline().strip().split(",")
        assert "elapsed_ms" in header

    def test_strict_bound_mode_passes_on_compliant_stream(self):
        beta = (-0.8, 1.8, 1.4, 1.6, 2.2, 1.2, -1.8)
        data = synthetic_dataset(241, seed=7003, beta_star=beta, labels="bernoulli")
        reports = run_grid(data, [GridCell(0.5, 1.0, 30, 31)], trials=3, seed=3,
                           strict_bound=True)
        for trial in reports[0].trials:
            assert trial.regret <= trial.theory_bound


class TestDatasets:
    def test_fixture_dataset_shape(self, fixture_path):
        data = load_dataset(fixture_path)
        assert len(data) == 10
        x, y = data.rows[0]
        assert x == (1.0, 27.02, 262.0, 0.0, 1.0, 4.82, 7.67)
        assert y == 1

    def test_synthetic_reproducible(self):
        a = synthetic_dataset(50, seed=1)
        b = synthetic_dataset(50, seed=1)
        assert a.rows == b.rows

    def test_synthetic_label_modes(self):
        thr = synthetic_dataset(200, seed=1, flip=0.0, labels="threshold")
        ber = synthetic_dataset(200, seed=1, labels="bernoulli")
        assert thr.rows != ber.rows
        with pytest.raises(ValueError):
            synthetic_dataset(10, seed=1, labels="coinflip")

    def test_bad_labels_rejected(self):
        with pytest.raises(ValueError):
            LabeledDataset(rows=(((1.0, 0, 0, 0, 0, 0, 0), 2),))
