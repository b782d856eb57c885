"""Ridge regression on the selected feature bins.

The sparse selection solver underestimates coefficient magnitudes, so the
final per-task age regressors are refit by ridge regression restricted to
the selected bins. Fitting centers both features and labels, solves the
regularized normal equations, and recovers an intercept; predictions are
clamped to the training label range.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    FeatureTooShortError,
    GridEmptyError,
    ShapeMismatchError,
    SingularSystemError,
    TooFewSamplesError,
    UnknownTaskError,
)

POOLED = "pooled"

DEFAULT_ALPHA_GRID = tuple(10.0 ** e for e in range(-3, 4))


@dataclass
class RidgeModel:
    """Per-task linear age regressors over a shared set of selected bins."""

    selected: np.ndarray  # ascending bin indices into the full feature vector
    weights: dict = field(default_factory=dict)  # task -> (len(selected),) array
    intercepts: dict = field(default_factory=dict)  # task -> float
    alphas: dict = field(default_factory=dict)  # task -> ridge weight used
    clamp: tuple = (0.0, 130.0)  # (min_age, max_age) from training labels


def fit_ridge(X, y, alpha):
    """Solve centered ridge normal equations; returns (weights, intercept).

    With alpha = 0 the design must have full column rank after centering,
    otherwise SingularSystemError is raised.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ShapeMismatchError(f"X {X.shape} vs y {y.shape}")
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")

    y_mean = y.mean()
    if X.shape[1] == 0:
        # intercept-only model (empty selection)
        return np.zeros(0), float(y_mean)
    x_mean = X.mean(axis=0)
    Xc = X - x_mean
    yc = y - y_mean
    A = Xc.T @ Xc + alpha * np.eye(X.shape[1])
    rhs = Xc.T @ yc
    try:
        w = cho_solve(cho_factor(A), rhs)
    except np.linalg.LinAlgError:
        raise SingularSystemError(
            f"normal equations singular (alpha={alpha}); increase alpha"
        )
    intercept = y_mean - float(x_mean @ w)
    return w, intercept


def select_alpha(X, y, grid=DEFAULT_ALPHA_GRID, k=5, seed=0):
    """k-fold cross-validated MAE over an alpha grid; ties go to larger alpha.

    Folds are contiguous blocks of a seeded shuffle, so the choice is
    deterministic for a given seed.
    """
    grid = list(grid)
    if not grid:
        raise GridEmptyError("empty alpha grid")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if k < 2 or n < k:
        raise TooFewSamplesError(f"{n} samples cannot form {k} folds")

    order = np.random.default_rng(seed).permutation(n)
    bounds = np.linspace(0, n, k + 1).astype(int)
    folds = [order[bounds[i] : bounds[i + 1]] for i in range(k)]

    best_alpha, best_mae = None, np.inf
    for alpha in grid:
        errs = []
        for fold in folds:
            train = np.setdiff1d(order, fold)
            w, b = fit_ridge(X[train], y[train], alpha)
            pred = X[fold] @ w + b
            errs.append(np.mean(np.abs(pred - y[fold])))
        mean_mae = float(np.mean(errs))
        if mean_mae < best_mae or (mean_mae == best_mae and alpha > best_alpha):
            best_alpha, best_mae = alpha, mean_mae
    return best_alpha


def fit_model(selected, task_data, alpha_grid=DEFAULT_ALPHA_GRID, cv_folds=5, seed=0):
    """Fit per-task ridge regressors (plus a pooled fallback) on selected bins.

    ``task_data`` maps task label -> (X_full, y) where X_full has the full
    feature dimension; columns outside ``selected`` are ignored. The pooled
    model under the key "pooled" is fit on the union of all tasks' samples
    and serves rows whose task label is unknown at prediction time.
    """
    selected = np.asarray(selected, dtype=int)
    model = RidgeModel(selected=selected)
    all_X, all_y = [], []
    for task, (X_full, y) in task_data.items():
        Xs = np.asarray(X_full, dtype=np.float64)[:, selected]
        all_X.append(Xs)
        all_y.append(np.asarray(y, dtype=np.float64))
        alpha = _pick_alpha(Xs, y, alpha_grid, cv_folds, seed)
        w, b = fit_ridge(Xs, y, alpha)
        model.weights[task] = w
        model.intercepts[task] = b
        model.alphas[task] = alpha
    X_pool = np.vstack(all_X)
    y_pool = np.concatenate(all_y)
    alpha = _pick_alpha(X_pool, y_pool, alpha_grid, cv_folds, seed)
    w, b = fit_ridge(X_pool, y_pool, alpha)
    model.weights[POOLED] = w
    model.intercepts[POOLED] = b
    model.alphas[POOLED] = alpha
    model.clamp = (float(y_pool.min()), float(y_pool.max()))
    return model


def _pick_alpha(X, y, grid, k, seed):
    grid = list(grid)
    if len(grid) == 1:
        return grid[0]
    if len(y) < max(k, 2):
        return grid[len(grid) // 2]  # too few samples to cross-validate
    return select_alpha(X, y, grid, k=min(k, len(y)), seed=seed)


def predict(model, x, task=POOLED):
    """Predict an age for one full-length feature vector, clamped."""
    if task not in model.weights:
        raise UnknownTaskError(f"no regressor for task {task!r}")
    x = np.asarray(x, dtype=np.float64)
    if model.selected.size and x.shape[-1] <= int(model.selected.max()):
        raise FeatureTooShortError(
            f"feature length {x.shape[-1]} < required {int(model.selected.max()) + 1}"
        )
    raw = float(x[model.selected] @ model.weights[task]) + model.intercepts[task]
    lo, hi = model.clamp
    return min(max(raw, lo), hi)


# --- GLOHRIDGE text serialization ---

def write_model(path, model):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("GLOHRIDGE 1\n")
        for task in model.weights:
            fh.write(f"task={task}\n")
            fh.write(f"alpha={float(model.alphas[task])!r}\n")
            fh.write(f"intercept={float(model.intercepts[task])!r}\n")
            fh.write(f"clamp={float(model.clamp[0])!r} {float(model.clamp[1])!r}\n")
            for k, w in zip(model.selected, model.weights[task]):
                fh.write(f"{int(k)} {float(w)!r}\n")


def read_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != "GLOHRIDGE 1":
        raise ShapeMismatchError(f"not a GLOHRIDGE file: {path}")
    model = RidgeModel(selected=np.array([], dtype=int))
    task = None
    bins, weights = [], []
    clamp = (0.0, 130.0)

    def flush():
        if task is not None:
            model.weights[task] = np.array(weights)
            model.selected = np.array(bins, dtype=int)

    for ln in lines[1:]:
        if ln.startswith("task="):
            flush()
            task = ln.split("=", 1)[1]
            bins, weights = [], []
        elif ln.startswith("alpha="):
            model.alphas[task] = float(ln.split("=", 1)[1])
        elif ln.startswith("intercept="):
            model.intercepts[task] = float(ln.split("=", 1)[1])
        elif ln.startswith("clamp="):
            lo, hi = ln.split("=", 1)[1].split()
            clamp = (float(lo), float(hi))
        else:
            k, w = ln.split()
            bins.append(int(k))
            weights.append(float(w))
    flush()
    model.clamp = clamp
    return model
