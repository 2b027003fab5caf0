"""Replay experiments, the batch-fit baseline, and significance tests.

A trial shuffles a labeled dataset, seeds the ensemble with the first
row, and streams the rest through the online learner, scoring each
prediction before the model trains on it.  The grid runner repeats that
over the printed hyperparameter combinations and reports per-cell
statistics.  The batch baseline is a Newton-Raphson maximum-likelihood
fit that also yields the covariance needed for Wald p-values.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import FixtureRow, load_fixture
from .olr import (
    EnsembleState,
    HyperParams,
    empirical_regret,
    init_state,
    olr_step,
    theory_regret,
)

__all__ = [
    "LabeledDataset", "GridCell", "TrialReport", "GridCellReport",
    "NonConvergenceError", "PerfectSeparationError", "BatchFit",
    "log_likelihood", "log_likelihood_grad", "batch_lr_fit",
    "wald_significance", "metrics", "run_trial", "run_grid",
    "full_grid", "synthetic_dataset", "dataset_from_fixture",
    "load_dataset", "write_grid_report",
]

EPSILON_GRID = (0.1, 0.3, 0.5, 0.7, 1.0)
ALPHA_GRID = (1.0, 2.0, 3.0)
THETA_GRID = (30, 50, 80, 100, 120)


@dataclass(frozen=True)
class LabeledDataset:
    rows: tuple[tuple[tuple[float, ...], int], ...]
    provenance: str = ""

    def __post_init__(self):
        labels = {y for _, y in self.rows}
        if self.rows and not labels <= {0, 1}:
            raise ValueError("labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.rows)

    def xs(self) -> list[tuple[float, ...]]:
        return [x for x, _ in self.rows]

    def ys(self) -> list[int]:
        return [y for _, y in self.rows]


@dataclass(frozen=True)
class GridCell:
    epsilon: float
    alpha: float
    theta: int
    set_no: int = 0

    def __post_init__(self):
        if self.epsilon not in EPSILON_GRID:
            raise ValueError(f"epsilon {self.epsilon} is not on the grid")
        if self.alpha not in ALPHA_GRID:
            raise ValueError(f"alpha {self.alpha} is not on the grid")
        if self.theta not in THETA_GRID:
            raise ValueError(f"theta {self.theta} is not on the grid")

    def hyper(self, **overrides) -> HyperParams:
        return HyperParams(
            epsilon=self.epsilon, alpha=self.alpha, theta=self.theta,
            **overrides,
        )


def full_grid() -> list[GridCell]:
    """The 75 printed hyperparameter combinations, in set-number order."""
    cells = []
    set_no = 0
    for eps in EPSILON_GRID:
        for alpha in ALPHA_GRID:
            for theta in THETA_GRID:
                set_no += 1
                cells.append(GridCell(eps, alpha, theta, set_no))
    return cells


# ---------------------------------------------------------------------------
# batch maximum-likelihood baseline


class NonConvergenceError(RuntimeError):
    pass


class PerfectSeparationError(NonConvergenceError):
    pass


def log_likelihood(beta, X, y) -> float:
    """Natural-log likelihood of labels under logistic probabilities,
    computed overflow-safe via log1p(exp(-|z|))."""
    z = X @ beta
    # log(1+e^z) = max(z,0) + log1p(e^-|z|)
    softplus = np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))
    return float(np.sum(y * z - softplus))


def log_likelihood_grad(beta, X, y) -> np.ndarray:
    z = X @ beta
    p = np.empty_like(z)
    pos = z >= 0
    p[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    p[~pos] = ez / (1.0 + ez)
    return X.T @ (y - p)


@dataclass(frozen=True)
class BatchFit:
    beta: np.ndarray
    covariance: np.ndarray
    log_lik: float
    iterations: int
    active: tuple[int, ...]      # columns that actually entered the solve


_COEF_BOUND = 1e6


def batch_lr_fit(data: LabeledDataset, tol: float = 1e-8,
                 max_iter: int = 200) -> BatchFit:
    """Newton-Raphson maximum-likelihood logistic fit with step-halving.

    Zero-variance columns beyond the intercept cannot be identified;
    their coefficients are frozen at 0 with infinite variance.  Diverging
    coefficients (perfect separation) raise instead of returning a bogus
    optimum.
    """
    if not data.rows:
        raise ValueError("empty dataset")
    X_full = np.array(data.xs(), dtype=float)
    y = np.array(data.ys(), dtype=float)
    if len(set(data.ys())) < 2:
        raise ValueError("need both labels present for a baseline fit")

    n, dim = X_full.shape
    active = [0] + [j for j in range(1, dim) if np.ptp(X_full[:, j]) > 0.0]
    X = X_full[:, active]
    k = len(active)

    beta = np.zeros(k)
    ll = log_likelihood(beta, X, y)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        z = X @ beta
        p = np.empty_like(z)
        pos = z >= 0
        p[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        p[~pos] = ez / (1.0 + ez)
        g = X.T @ (y - p)
        if np.max(np.abs(g)) < tol:
            break
        w = p * (1.0 - p)
        H = (X * w[:, None]).T @ X
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError as exc:
            raise PerfectSeparationError(
                f"information matrix singular at iteration {iterations}: {exc}"
            ) from None
        # halve until the likelihood actually improves
        scale = 1.0
        for _ in range(60):
            candidate = beta + scale * step
            ll_new = log_likelihood(candidate, X, y)
            if ll_new > ll - 1e-12:
                break
            scale /= 2.0
        else:
            raise NonConvergenceError(
                f"no uphill step found at iteration {iterations}"
            )
        beta = candidate
        ll = ll_new
        if np.max(np.abs(beta)) > _COEF_BOUND:
            raise PerfectSeparationError(
                "coefficients diverging; the data is likely perfectly separated"
            )
    else:
        raise NonConvergenceError(
            f"gradient norm still above {tol} after {max_iter} iterations"
        )

    w = 1.0 / (1.0 + np.exp(-(X @ beta)))
    w = w * (1.0 - w)
    H = (X * w[:, None]).T @ X
    try:
        cov_active = np.linalg.inv(H)
    except np.linalg.LinAlgError:
        raise PerfectSeparationError("information matrix singular at the optimum") from None

    beta_full = np.zeros(dim)
    cov_full = np.full((dim, dim), 0.0)
    for a, j in enumerate(active):
        beta_full[j] = beta[a]
        for b, jj in enumerate(active):
            cov_full[j, jj] = cov_active[a, b]
    for j in range(dim):
        if j not in active:
            cov_full[j, j] = math.inf
    return BatchFit(
        beta=beta_full, covariance=cov_full, log_lik=ll,
        iterations=iterations, active=tuple(active),
    )


def wald_significance(fit: BatchFit) -> list[float]:
    """Two-sided p-value per coefficient: z = beta/SE against the
    standard normal.  Frozen coefficients have infinite SE, hence z = 0
    and p = 1."""
    variances = np.diag(fit.covariance)
    if np.any(variances < 0):
        raise ValueError("covariance has negative diagonal entries")
    p_values = []
    for b, var in zip(fit.beta, variances):
        if math.isinf(var):
            z = 0.0
        else:
            se = math.sqrt(var)
            if se == 0.0:
                raise ValueError("zero standard error; covariance is singular")
            z = b / se
        p_values.append(math.erfc(abs(z) / math.sqrt(2.0)))
    return p_values


# ---------------------------------------------------------------------------
# trials


def metrics(tp: int, fp: int, fn: int, tn: int):
    """(accuracy, precision, recall); empty denominators give None."""
    total = tp + fp + fn + tn
    if total <= 0:
        raise ValueError("metrics need at least one observation")
    accuracy = (tp + tn) / total
    precision = tp / (tp + fp) if (tp + fp) > 0 else None
    recall = tp / (tp + fn) if (tp + fn) > 0 else None
    return accuracy, precision, recall


@dataclass(frozen=True)
class TrialReport:
    seed: int
    accuracy: float
    precision: float | None
    recall: float | None
    elapsed_ms: float
    mean_step_ms: float
    regret: int
    theory_bound: float | None
    mistakes: int
    ensemble_size: int
    confusion: tuple[int, int, int, int]   # tp, fp, fn, tn


def run_trial(data: LabeledDataset, cell: GridCell, seed: int,
              sigma: float = 1e-4, eta0: float = 0.01, delta: float = 10.0,
              max_sweeps: int = 10_000) -> TrialReport:
    """One seeded replay: shuffle, train the first parameter vector on
    the first row, then stream the rest test-then-train.  Predictions are
    scored at 0.5 before each update."""
    if len(data) < 2:
        raise ValueError("a trial needs at least two rows")
    hyper = cell.hyper(sigma=sigma, eta0=eta0, delta=delta, max_sweeps=max_sweeps)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(data))
    rows = [data.rows[i] for i in order]

    started = time.perf_counter()
    state = init_state(rows[0], hyper, seed)
    tp = fp = fn = tn = 0
    trace_x, trace_y = [], []
    for x, y in rows[1:]:
        outcome, state = olr_step(state, x, y)
        predicted = 1 if outcome.p >= 0.5 else 0
        if predicted == 1 and y == 1:
            tp += 1
        elif predicted == 1 and y == 0:
            fp += 1
        elif predicted == 0 and y == 1:
            fn += 1
        else:
            tn += 1
        trace_x.append(x)
        trace_y.append(y)
    elapsed = (time.perf_counter() - started) * 1000.0

    regret = empirical_regret(trace_x, trace_y, state)
    bound = theory_regret(len(data), cell.alpha, cell.theta) if len(data) >= cell.theta else None
    accuracy, precision, recall = metrics(tp, fp, fn, tn)
    steps = len(rows) - 1
    return TrialReport(
        seed=seed, accuracy=accuracy, precision=precision, recall=recall,
        elapsed_ms=elapsed, mean_step_ms=elapsed / steps, regret=regret,
        theory_bound=bound, mistakes=state.mistake_count,
        ensemble_size=len(state.params), confusion=(tp, fp, fn, tn),
    )


@dataclass(frozen=True)
class GridCellReport:
    cell: GridCell
    trials: tuple[TrialReport, ...]

    def _stats(self, values):
        usable = [v for v in values if v is not None]
        if not usable:
            return None, None
        mean = sum(usable) / len(usable)
        var = sum((v - mean) ** 2 for v in usable) / len(usable)
        return mean, math.sqrt(var)

    def summary(self) -> dict:
        acc = self._stats([t.accuracy for t in self.trials])
        prec = self._stats([t.precision for t in self.trials])
        rec = self._stats([t.recall for t in self.trials])
        elapsed = self._stats([t.elapsed_ms for t in self.trials])
        return {
            "set_no": self.cell.set_no,
            "epsilon": self.cell.epsilon,
            "alpha": self.cell.alpha,
            "theta": self.cell.theta,
            "accuracy_mean": acc[0], "accuracy_std": acc[1],
            "precision_mean": prec[0], "precision_std": prec[1],
            "recall_mean": rec[0], "recall_std": rec[1],
            "elapsed_ms_mean": elapsed[0], "elapsed_ms_std": elapsed[1],
            "max_regret": max(t.regret for t in self.trials),
            "theory_bound": self.trials[0].theory_bound,
        }


def run_grid(data: LabeledDataset, cells: list[GridCell], trials: int = 30,
             seed: int = 0, strict_bound: bool = False,
             **trial_kwargs) -> list[GridCellReport]:
    """Seeded trials for every cell.  Per-trial seeds derive
    deterministically from the root seed.  With strict_bound, a trial
    whose empirical regret exceeds the bound fails the run for the
    near-tight cells (alpha = 1, theta <= 50)."""
    reports = []
    for cell in cells:
        cell_trials = []
        for t in range(trials):
            trial_seed = seed * 1_000_003 + cell.set_no * 1_009 + t
            report = run_trial(data, cell, trial_seed, **trial_kwargs)
            if (
                strict_bound
                and cell.alpha == 1.0
                and cell.theta <= 50
                and report.theory_bound is not None
                and report.regret > report.theory_bound
            ):
                raise AssertionError(
                    f"empirical regret {report.regret} exceeds bound "
                    f"{report.theory_bound:.3f} in cell {cell} (seed {trial_seed})"
                )
            cell_trials.append(report)
        reports.append(GridCellReport(cell=cell, trials=tuple(cell_trials)))
    return reports


_TRIAL_FIELDS = ["set_no", "epsilon", "alpha", "theta", "trial", "seed",
                 "accuracy", "precision", "recall", "regret", "theory_bound",
                 "mistakes", "ensemble_size", "elapsed_ms", "mean_step_ms"]

_TIMING_FIELDS = {"elapsed_ms", "mean_step_ms", "elapsed_ms_mean", "elapsed_ms_std"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_grid_report(reports: list[GridCellReport], out_dir,
                      include_timing: bool = True) -> dict[str, Path]:
    """Per-trial and per-cell tables as CSV plus a JSON mirror.  Timing
    columns are environmental noise; include_timing=False leaves them
    out, which makes reruns with the same seed byte-identical."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    trial_fields = [f for f in _TRIAL_FIELDS
                    if include_timing or f not in _TIMING_FIELDS]
    trials_path = out / "trials.csv"
    with open(trials_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(trial_fields)
        for report in reports:
            for i, t in enumerate(report.trials):
                row = {
                    "set_no": report.cell.set_no, "epsilon": report.cell.epsilon,
                    "alpha": report.cell.alpha, "theta": report.cell.theta,
                    "trial": i, "seed": t.seed, "accuracy": t.accuracy,
                    "precision": t.precision, "recall": t.recall,
                    "regret": t.regret, "theory_bound": t.theory_bound,
                    "mistakes": t.mistakes, "ensemble_size": t.ensemble_size,
                    "elapsed_ms": t.elapsed_ms, "mean_step_ms": t.mean_step_ms,
                }
                writer.writerow([_fmt(row[f]) for f in trial_fields])

    summaries = [r.summary() for r in reports]
    summary_fields = [f for f in summaries[0]
                      if include_timing or f not in _TIMING_FIELDS] if summaries else []
    cells_path = out / "cells.csv"
    with open(cells_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(summary_fields)
        for s in summaries:
            writer.writerow([_fmt(s[f]) for f in summary_fields])

    mirror = {
        "cells": [
            {k: v for k, v in s.items() if include_timing or k not in _TIMING_FIELDS}
            for s in summaries
        ],
    }
    json_path = out / "report.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(mirror, fh, indent=2, sort_keys=True)
    return {"trials": trials_path, "cells": cells_path, "json": json_path}


# ---------------------------------------------------------------------------
# datasets


def dataset_from_fixture(rows: list[FixtureRow] | str | Path) -> LabeledDataset:
    """Feature vectors and labels from the measurement fixture (or a
    path to one)."""
    if not isinstance(rows, list):
        rows = load_fixture(rows)
    data = tuple(
        ((1.0, r.rel, float(r.vote), float(r.type), float(r.epr), r.div, r.con), r.label)
        for r in rows
    )
    return LabeledDataset(rows=data, provenance="measurement fixture")


def load_dataset(path) -> LabeledDataset:
    return dataset_from_fixture(load_fixture(path))


def synthetic_dataset(n: int, seed: int, flip: float = 0.10,
                      beta_star=None, labels: str = "threshold") -> LabeledDataset:
    """Labeled stream drawn from a known coefficient vector over
    measurement-shaped features.

    labels="threshold" assigns the majority label under beta_star and
    then flips the given fraction; labels="bernoulli" samples each label
    from its model probability, so class overlap scales with the
    coefficient magnitudes."""
    rng = np.random.default_rng(seed)
    if beta_star is None:
        beta_star = (-0.4, 0.9, 0.7, 0.8, 1.1, 0.6, -0.9)
    beta_star = np.asarray(beta_star, dtype=float)
    rows = []
    for _ in range(n):
        x = (
            1.0,
            float(rng.gamma(2.0, 1.0)),        # relevance-like, skewed positive
            float(rng.normal(0.0, 1.0)),       # centered vote score
            float(rng.integers(0, 2)),         # serial-owner flag
            float(rng.poisson(1.0)),           # expert comments
            float(rng.uniform(-1.0, 3.0)),     # diversity-like
            float(rng.normal(0.0, 1.0)),       # concern-like
        )
        z = float(beta_star @ np.asarray(x))
        p = 1.0 / (1.0 + math.exp(-z))
        if labels == "bernoulli":
            y = 1 if rng.random() < p else 0
        elif labels == "threshold":
            y = 1 if p >= 0.5 else 0
            if rng.random() < flip:
                y = 1 - y
        else:
            raise ValueError(f"unknown label mode {labels!r}")
        rows.append((x, y))
    return LabeledDataset(
        rows=tuple(rows),
        provenance=f"synthetic(seed={seed}, flip={flip}, labels={labels})",
    )
