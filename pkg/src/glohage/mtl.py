"""Sparsity-enforced feature-bin selection.

Solves, over a K x L coefficient matrix W (bins as rows, tasks as columns),

    min_W  sum_l (1/N_l) ||y_l - X_l w_l||^2  +  lambda * R(W)

with R(W) = sum_k ||W[k, :]||_2 in multi-task ("mtl") mode, and
R(W) = sum of |W| entries in single-task ("stl") mode. The production
solver is accelerated proximal gradient with backtracking line search; a
cyclic block-coordinate-descent solver is provided as an independent
reference for testing. Bins whose coefficient row survives thresholding
are the selected features.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BudgetOutOfRangeError,
    NegativeLambdaError,
    NonFiniteError,
    ShapeMismatchError,
)

MODE_MTL = "mtl"
MODE_STL = "stl"


@dataclass
class TaskDataset:
    """Design matrix and age labels for one task (one gender)."""

    task_id: str
    X: np.ndarray  # (N_l, K)
    y: np.ndarray  # (N_l,)

    def __post_init__(self):
        self.X = np.asarray(self.X)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.X.ndim != 2 or self.y.ndim != 1 or self.X.shape[0] != self.y.shape[0]:
            raise ShapeMismatchError(
                f"task {self.task_id}: X {self.X.shape} vs y {self.y.shape}"
            )
        if self.X.shape[0] < 1:
            raise ShapeMismatchError(f"task {self.task_id}: empty dataset")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise NonFiniteError(f"task {self.task_id}: non-finite entries")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def k(self):
        return self.X.shape[1]


@dataclass
class SolverOptions:
    max_iters: int = 2000
    rel_tol: float = 1e-6
    init_step: float = 1.0
    step_shrink: float = 0.5
    mode: str = MODE_MTL

    def __post_init__(self):
        if self.max_iters < 1 or self.rel_tol <= 0 or not (0 < self.step_shrink < 1):
            raise ValueError("bad solver options")
        if self.mode not in (MODE_MTL, MODE_STL):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class SelectionResult:
    """Chosen regularization weight, coefficients and surviving bins."""

    lam: float
    W: np.ndarray
    selected: np.ndarray  # ascending bin indices
    epsilon: float = 1e-8


def _check_shapes(W, data):
    k = data[0].k
    for d in data:
        if d.k != k:
            raise ShapeMismatchError("tasks disagree on feature dimension")
    if W.shape != (k, len(data)):
        raise ShapeMismatchError(f"W shape {W.shape}, expected {(k, len(data))}")


def _work_dtype(data):
    # run big float32 feature matrices in float32; avoids silent upcast
    # copies of the design matrix on every product
    return np.result_type(np.float32, *(d.X.dtype for d in data))


def _smooth_loss(W, data):
    total = 0.0
    for l, d in enumerate(data):
        r = d.X @ W[:, l].astype(d.X.dtype, copy=False) - d.y
        total += float(np.dot(r, r)) / d.n
    return total


def _smooth_grad(W, data):
    G = np.empty_like(W)
    for l, d in enumerate(data):
        w = W[:, l].astype(d.X.dtype, copy=False)
        r = d.X @ w - d.y.astype(d.X.dtype, copy=False)
        G[:, l] = (2.0 / d.n) * (d.X.T @ r)
    return G


def penalty(W, mode):
    if mode == MODE_MTL:
        return float(np.sum(np.linalg.norm(W, axis=1)))
    return float(np.sum(np.abs(W)))


def objective(W, data, lam, mode=MODE_MTL):
    """Full objective: task-summed normalized squared loss + lam * penalty."""
    if lam < 0:
        raise NegativeLambdaError(f"lambda = {lam}")
    W = np.asarray(W, dtype=np.float64)
    _check_shapes(W, data)
    return _smooth_loss(W, data) + lam * penalty(W, mode)


def soft_threshold(x, tau):
    """Scalar/elementwise shrinkage: sign(x) * max(|x| - tau, 0)."""
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


def group_soft_threshold(row, tau):
    """Shrink a row toward zero by tau in Euclidean norm; zero it if shorter."""
    row = np.asarray(row, dtype=np.float64)
    norm = np.linalg.norm(row)
    if norm <= tau:
        return np.zeros_like(row)
    return row * (1.0 - tau / norm)


def _prox(V, tau, mode):
    if mode == MODE_STL:
        return soft_threshold(V, tau)
    norms = np.linalg.norm(V, axis=1)
    scale = np.zeros_like(norms)
    nz = norms > tau
    scale[nz] = 1.0 - tau / norms[nz]
    return V * scale[:, None]


def lambda_max(data, mode=MODE_MTL):
    """Smallest lambda for which the all-zero W is optimal."""
    G = np.column_stack(
        [(2.0 / d.n) * (d.X.T @ d.y).astype(np.float64) for d in data]
    )
    if mode == MODE_MTL:
        return float(np.max(np.linalg.norm(G, axis=1)))
    return float(np.max(np.abs(G)))


def solve(data, lam, opts=SolverOptions(), w0=None):
    """Accelerated proximal gradient (FISTA) with backtracking.

    Momentum weights theta_{t+1} = (1 + sqrt(1 + 4 theta_t^2)) / 2; the
    step is halved until the quadratic upper bound on the smooth part
    holds at the prox point. Stops on relative objective change below
    opts.rel_tol. Returns the best iterate seen, so the result never
    beats the initial point at the objective; starting from zero (the
    default), any lam >= lambda_max returns the exact zero matrix.
    """
    if lam < 0:
        raise NegativeLambdaError(f"lambda = {lam}")
    k, n_tasks = data[0].k, len(data)
    dtype = _work_dtype(data)
    W = (
        np.zeros((k, n_tasks), dtype=dtype)
        if w0 is None
        else np.array(w0, dtype=dtype)
    )
    _check_shapes(W, data)

    W_prev = W.copy()
    theta = 1.0
    step = opts.init_step
    F = objective(W, data, lam, opts.mode)
    best_F, best_W = F, W.copy()

    for _ in range(opts.max_iters):
        theta_next = (1.0 + np.sqrt(1.0 + 4.0 * theta * theta)) / 2.0
        Z = W + ((theta - 1.0) / theta_next) * (W - W_prev)
        fZ = _smooth_loss(Z, data)
        G = _smooth_grad(Z, data)

        while True:
            W_new = _prox(Z - step * G, step * lam, opts.mode)
            diff = W_new - Z
            bound = fZ + float(np.sum(G * diff)) + float(np.sum(diff * diff)) / (
                2.0 * step
            )
            f_new = _smooth_loss(W_new, data)
            if f_new <= bound + 1e-12 * max(1.0, abs(bound)):
                break
            step *= opts.step_shrink
            if step < 1e-18:
                raise NonFiniteError("backtracking step underflow")

        W_prev, W = W, W_new
        theta = theta_next
        F_new = f_new + lam * penalty(W, opts.mode)
        if not np.isfinite(F_new):
            raise NonFiniteError("objective diverged")
        if F_new < best_F:
            best_F, best_W = F_new, W.copy()
        if abs(F_new - F) / max(1.0, abs(F)) < opts.rel_tol:
            break
        F = F_new
    return best_W


def _cd_row_update(b, a, lam):
    """Minimize sum_l (a_l/2) u_l^2 - b_l u_l + lam * ||u||_2 over the row u."""
    bnorm = np.linalg.norm(b)
    if bnorm <= lam:
        return np.zeros_like(b)

    def g(nu):
        return float(np.linalg.norm(b * nu / (a * nu + lam)))

    ub = 1.0
    while g(ub) > ub:
        ub *= 2.0
    lo = 1e-16 * ub
    nu = brentq(lambda t: g(t) - t, lo, ub, xtol=1e-14, rtol=1e-14)
    return b * nu / (a * nu + lam)


def solve_cd_oracle(data, lam, opts=SolverOptions()):
    """Cyclic block-coordinate descent reference solver (test oracle).

    Each row update solves its one-row subproblem to first-order
    optimality (scalar root-find for the row norm in mtl mode, closed
    form shrinkage in stl mode). Intended for small instances only.
    """
    if lam < 0:
        raise NegativeLambdaError(f"lambda = {lam}")
    k, n_tasks = data[0].k, len(data)
    W = np.zeros((k, n_tasks))
    _check_shapes(W, data)
    X = [np.asarray(d.X, dtype=np.float64) for d in data]
    # a[l, k] = (2/N_l) ||column k||^2 ; columns of zeros never activate
    a = np.column_stack([(2.0 / d.n) * np.sum(x * x, axis=0) for d, x in zip(data, X)])
    res = [d.y.astype(np.float64).copy() for d in data]  # y - X w

    F = objective(W, data, lam, opts.mode)
    for _ in range(opts.max_iters):
        for kk in range(k):
            old = W[kk].copy()
            # b_l = (2/N_l) <x_k, y - X w + x_k w_k>
            b = np.array(
                [
                    (2.0 / data[l].n) * float(X[l][:, kk] @ res[l])
                    + a[kk, l] * old[l]
                    for l in range(n_tasks)
                ]
            )
            if opts.mode == MODE_STL:
                new = np.where(
                    a[kk] > 0, soft_threshold(b, lam) / np.where(a[kk] > 0, a[kk], 1.0), 0.0
                )
            else:
                if np.all(a[kk] == 0):
                    new = np.zeros(n_tasks)
                else:
                    new = _cd_row_update(b, a[kk], lam)
            delta = old - new
            if np.any(delta != 0):
                for l in range(n_tasks):
                    if delta[l] != 0:
                        res[l] += X[l][:, kk] * delta[l]
                W[kk] = new
        F_new = objective(W, data, lam, opts.mode)
        if abs(F_new - F) / max(1.0, abs(F)) < opts.rel_tol:
            break
        F = F_new
    return W


def support(W, epsilon=1e-8):
    """Ascending indices of rows with Euclidean norm above epsilon."""
    return np.flatnonzero(np.linalg.norm(np.atleast_2d(W), axis=1) > epsilon)


def fit_for_budget(data, budget, opts=SolverOptions(), epsilon=1e-8, max_bisect=40):
    """Pick lambda by bisection so at most ``budget`` bins are selected.

    Searches [0, lambda_max]; each solve warm-starts from the previous
    coefficients. Among solutions with |support| <= budget the one with
    the largest support wins, ties broken toward smaller lambda.
    """
    k = data[0].k
    if not (1 <= budget <= k):
        raise BudgetOutOfRangeError(f"budget {budget} outside [1, {k}]")

    lam_hi = lambda_max(data, opts.mode)
    best = SelectionResult(lam_hi, np.zeros((k, len(data))), np.array([], dtype=int), epsilon)
    if lam_hi == 0.0:
        return best

    lo, hi = 0.0, lam_hi
    W_warm = None
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        W = solve(data, mid, opts, w0=W_warm)
        W_warm = W
        S = support(W, epsilon)
        if len(S) <= budget:
            hi = mid
            if len(S) > len(best.selected) or (
                len(S) == len(best.selected) and mid < best.lam
            ):
                best = SelectionResult(mid, W.copy(), S, epsilon)
        else:
            lo = mid
    return best


# --- GLOHSEL text serialization ---

def write_selection(path, result):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("GLOHSEL 1\n")
        fh.write(f"lambda={float(result.lam)!r}\n")
        fh.write(f"epsilon={float(result.epsilon)!r}\n")
        for k in result.selected:
            weights = " ".join(repr(float(v)) for v in result.W[k])
            fh.write(f"{int(k)} {weights}\n")


def read_selection(path, n_bins, n_tasks):
    """Inverse of write_selection; needs the full (K, L) shape to rebuild W."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != "GLOHSEL 1":
        raise ShapeMismatchError(f"not a GLOHSEL file: {path}")
    lam = float(lines[1].split("=", 1)[1])
    eps = float(lines[2].split("=", 1)[1])
    W = np.zeros((n_bins, n_tasks))
    selected = []
    for ln in lines[3:]:
        if not ln:
            continue
        parts = ln.split()
        k = int(parts[0])
        W[k] = [float(v) for v in parts[1:]]
        selected.append(k)
    return SelectionResult(lam, W, np.array(selected, dtype=int), eps)
