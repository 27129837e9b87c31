"""Margin classifiers mapping sampled states to IST-sequence labels.

Two geometries are supported.  Flat mode learns one affine score per
class and labels by the largest score.  Conic mode learns one
homogeneous quadratic per class, ordered by label, and labels by the
first class whose quadratic is positive; this matches the nested-cone
structure of the triggering regions and needs no bias terms.

Training minimizes  sum_j ||W_j||^2 + rho * sum_i max(0, g_i)  where
g_i is the margin violation of sample i.  The objective is convex and
piecewise quadratic; it is minimized by L-BFGS over a decreasing
sequence of softmax smoothings, keeping the iterate with the best
unsmoothed objective.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .errors import UnsupportedConfigError

TIE_TOLERANCE = 1e-9

_MU_SCHEDULE = (1.0, 0.1, 0.01, 0.002)


def veronese2(X):
    """Degree-2 Veronese embedding, monomials in lexicographic order.

    For a row (x1, ..., xn) the features are x_i * x_j for i <= j,
    ordered (1,1), (1,2), ..., (1,n), (2,2), (2,3), ...  No scaling is
    applied to the cross terms.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[1]
    cols = [X[:, i] * X[:, j] for i in range(n) for j in range(i, n)]
    return np.stack(cols, axis=1)


def veronese2_dim(n):
    return n * (n + 1) // 2


def _features(X, feature_map):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if feature_map == "raw":
        return X
    if feature_map == "veronese2":
        return veronese2(X)
    raise UnsupportedConfigError(f"unknown feature map {feature_map!r}")


@dataclass
class MulticlassModel:
    """Trained classifier parameters plus the label order they assume."""

    mode: str
    feature_map: str
    zeta: float
    rho: float
    label_table: list
    W: np.ndarray
    b: np.ndarray

    @property
    def n_classes(self):
        return len(self.label_table)

    def features(self, X):
        return _features(X, self.feature_map)

    def to_config(self):
        return {
            "mode": self.mode,
            "feature_map": self.feature_map,
            "zeta": self.zeta,
            "rho": self.rho,
            "label_table": [list(lab) for lab in self.label_table],
            "W": [[float(v) for v in row] for row in self.W],
            "b": [float(v) for v in self.b],
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_config(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_model(path):
    with open(path) as fh:
        cfg = json.load(fh)
    return MulticlassModel(
        mode=cfg["mode"],
        feature_map=cfg["feature_map"],
        zeta=float(cfg["zeta"]),
        rho=float(cfg["rho"]),
        label_table=[tuple(lab) for lab in cfg["label_table"]],
        W=np.array(cfg["W"], dtype=float),
        b=np.array(cfg["b"], dtype=float),
    )


def _margin_matrix(model, scores, y_idx):
    """Per-sample, per-slot margin terms; -inf marks unused slots.

    g of a sample is the row maximum (0 for flat single-class models).
    """
    n, L = scores.shape
    rows = np.arange(n)
    if model.mode == "flat":
        own = scores[rows, y_idx]
        M = model.zeta - (own[:, None] - scores)
        M[rows, y_idx] = -np.inf
        return M
    cols = np.arange(L)[None, :]
    sign = np.where(cols < y_idx[:, None], 1.0, np.where(cols == y_idx[:, None], -1.0, 0.0))
    M = model.zeta + sign * scores
    M[cols > y_idx[:, None]] = -np.inf
    return M


def g_values(model, X, y_idx):
    """Margin violation of each sample against its true class index."""
    y_idx = np.asarray(y_idx, dtype=int)
    scores = model.features(X) @ model.W.T
    if model.mode == "flat":
        scores = scores + model.b
        if model.n_classes == 1:
            return np.zeros(len(scores))
    M = _margin_matrix(model, scores, y_idx)
    return M.max(axis=1)


def predict(model, X):
    """Class indices for new states (into model.label_table)."""
    scores = model.features(X) @ model.W.T
    if model.mode == "flat":
        return np.argmax(scores + model.b, axis=1)
    fired = scores > 0.0
    first = fired.argmax(axis=1)
    return np.where(fired.any(axis=1), first, model.n_classes - 1)


def predict_labels(model, X):
    return [model.label_table[i] for i in predict(model, X)]


def count_violations(model, samples, tie_tolerance=TIE_TOLERANCE):
    """Number of samples with margin violation above the tie tolerance."""
    samples = list(samples)
    if not samples:
        return 0
    lookup = {lab: i for i, lab in enumerate(model.label_table)}
    try:
        y_idx = np.array([lookup[s.label] for s in samples])
    except KeyError as err:
        raise ValueError(f"label {err.args[0]} is not in the model's label table") from None
    X = np.array([s.x for s in samples])
    return int((g_values(model, X, y_idx) > tie_tolerance).sum())


def objective(model, X, y_idx):
    """The training objective at the model's parameters."""
    g = g_values(model, X, y_idx)
    hinge = np.maximum(0.0, g).sum()
    return float(np.sum(model.W * model.W) + model.rho * hinge)


def _unpack(V, L, d, with_bias):
    W = V[: L * d].reshape(L, d)
    b = V[L * d:] if with_bias else np.zeros(L)
    return W, b


def _smoothed(V, Phi, y_idx, L, zeta, rho, mu, mode):
    n, d = Phi.shape
    with_bias = mode == "flat"
    W, b = _unpack(V, L, d, with_bias)
    scores = Phi @ W.T
    rows = np.arange(n)
    cols = np.arange(L)[None, :]

    if mode == "flat":
        scores = scores + b
        own = scores[rows, y_idx]
        A = (zeta - (own[:, None] - scores)) / mu
        A[rows, y_idx] = -np.inf
    else:
        sign = np.where(cols < y_idx[:, None], 1.0, np.where(cols == y_idx[:, None], -1.0, 0.0))
        A = (zeta + sign * scores) / mu
        A[cols > y_idx[:, None]] = -np.inf

    # r/mu = log(1 + sum_slots exp(A)): the extra 1 realizes max(0, .)
    lse = logsumexp(A, axis=1)
    r_over_mu = np.logaddexp(0.0, lse)
    value = float(np.sum(W * W) + rho * mu * r_over_mu.sum())

    P = np.exp(A - r_over_mu[:, None])
    if mode == "flat":
        D = P.copy()
        D[rows, y_idx] -= P.sum(axis=1)
    else:
        D = P * sign
    grad_W = rho * (D.T @ Phi) + 2.0 * W
    if with_bias:
        grad = np.concatenate([grad_W.ravel(), rho * D.sum(axis=0)])
    else:
        grad = grad_W.ravel()
    return value, grad


def train(scenarios, mode="conic", feature_map=None, zeta=1.0, rho=1e3,
          mu_schedule=_MU_SCHEDULE, max_iter=400):
    """Fit a multiclass margin classifier to a scenario set.

    Returns (model, info); info holds the achieved objective, the
    violation count on the training set, and per-stage diagnostics.
    The returned parameters are the iterate with the smallest
    unsmoothed objective encountered, so the reported objective is the
    best one found.
    """
    if mode not in ("flat", "conic"):
        raise UnsupportedConfigError(f"unknown mode {mode!r}")
    if mode == "conic":
        if scenarios.ell != 1:
            raise UnsupportedConfigError(
                "conic mode orders classes by scalar ISTs; "
                "use flat mode on veronese2 features for sequence labels"
            )
        if feature_map not in (None, "veronese2"):
            raise UnsupportedConfigError("conic mode requires veronese2 features")
        feature_map = "veronese2"
        label_table = sorted(scenarios.label_table)
    else:
        feature_map = feature_map or "veronese2"
        label_table = list(scenarios.label_table)

    X = scenarios.states()
    lookup = {lab: i for i, lab in enumerate(label_table)}
    y_idx = np.array([lookup[s.label] for s in scenarios.samples])
    Phi = _features(X, feature_map)
    n, d = Phi.shape
    L = len(label_table)
    with_bias = mode == "flat"

    def build(V):
        W, b = _unpack(V, L, d, with_bias)
        return MulticlassModel(
            mode=mode, feature_map=feature_map, zeta=zeta, rho=rho,
            label_table=label_table, W=W.copy(), b=b.copy(),
        )

    V = np.zeros(L * d + (L if with_bias else 0))
    best_value = objective(build(V), X, y_idx)
    best_V = V.copy()
    stages = []
    for mu in mu_schedule:
        res = minimize(
            _smoothed, V, args=(Phi, y_idx, L, zeta, rho, mu, mode),
            jac=True, method="L-BFGS-B",
            options={"maxiter": max_iter, "ftol": 1e-14, "gtol": 1e-9},
        )
        V = res.x
        value = objective(build(V), X, y_idx)
        stages.append({"mu": mu, "objective": value, "iterations": int(res.nit)})
        if value < best_value:
            best_value = value
            best_V = V.copy()

    model = build(best_V)
    info = {
        "objective": best_value,
        "n_violations": count_violations(model, scenarios.samples),
        "stages": stages,
    }
    return model, info
