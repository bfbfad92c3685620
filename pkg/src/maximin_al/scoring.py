"""MaxiMin selection scores for kernel interpolants.

Both scores rate an unlabeled candidate ``u`` by how much the minimum-norm
interpolant must change once ``u`` receives its least-favorable-looking label
``t(u) = argmin_t ||f_t^u||``:

* **function norm** — the squared norm of the augmented interpolant itself,
  ``score_F(u) = ||f||^2 + (1 - |f(u)|)^2 / S_u`` with Schur complement
  ``S_u = 1 - a_u^T K^{-1} a_u``;
* **data-based norm** — the mean squared change of the interpolant over the
  pool, ``score_D(u) = mean_x (f^u(x) - f(x))^2``, which by the rank-one
  update equals ``((t - f(u)) / S_u)^2 * mean_x (k(u,x) - a_u^T K^{-1} a_x)^2``.

The selection rule picks the candidate with the largest score; exact ties
(within ``1e-12`` absolute) are broken uniformly at random with the caller's
seed.  With no labeled data both rules are still defined: ``f == 0``, every
function-norm score is 1, and the data-based score of ``u`` reduces to
``mean_x k(u, x)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DuplicatePointError, EmptyPoolError
from .kernel import SCHUR_FLOOR, KernelInterpolator, kernel_matrix

TIE_TOLERANCE = 1e-12


class ScoreKind(Enum):
    FUNCTION_NORM = "function"
    DATA_NORM = "data"


@dataclass(frozen=True)
class ScoredCandidate:
    """A candidate's pool index (None when scored standalone), estimated label, and score."""

    index: int | None
    label: int
    score: float


class UnlabeledPool:
    """Pool of unlabeled points; doubles as the empirical measure for the data score.

    Parameters
    ----------
    points : array-like of shape (n, d)
    hidden_labels : array-like of shape (n,), optional
        Oracle labels (+1/-1) revealed one at a time during simulations.
    """

    def __init__(self, points, hidden_labels=None):
        points = np.atleast_1d(np.asarray(points, dtype=float))
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2:
            raise ValueError(f"points must be 2-D, got shape {points.shape}")
        self._points = points.copy()
        self._points.setflags(write=False)
        if hidden_labels is not None:
            hidden_labels = np.asarray(hidden_labels)
            if hidden_labels.shape != (len(points),):
                raise ValueError("hidden_labels length does not match points")
            if not np.all(np.isin(hidden_labels, (-1, 1))):
                raise ValueError("hidden labels must be +1 or -1")
            hidden_labels = hidden_labels.astype(int).copy()
            hidden_labels.setflags(write=False)
        self._hidden = hidden_labels

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def hidden_labels(self) -> np.ndarray | None:
        return self._hidden

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return len(self._points)

    def subset(self, indices) -> "UnlabeledPool":
        indices = np.asarray(indices)
        return UnlabeledPool(
            self._points[indices],
            None if self._hidden is None else self._hidden[indices],
        )


def estimate_label(model: KernelInterpolator, u) -> int:
    """Label whose augmented interpolant has the smaller norm: sign of f(u), +1 at 0."""
    return 1 if model.evaluate(u) >= 0 else -1


def _pool_statistics(model: KernelInterpolator, points: np.ndarray):
    """Per-candidate f(u) and Schur complement S_u, plus cross matrices A, C.

    A = K(X_L, points) and C = K^{-1} A; both are None for the empty model.
    Raises DuplicatePointError when any S_u falls below the duplicate floor.
    """
    n = len(points)
    if len(model) == 0:
        return np.zeros(n), np.ones(n), None, None
    A = kernel_matrix(model.base.points, points, model.config)
    C = model.solve(A)
    f = A.T @ model.coefficients
    schur = 1.0 + model.jitter - np.einsum("ij,ij->j", A, C)
    if np.any(schur < SCHUR_FLOOR):
        raise DuplicatePointError(
            "a candidate is numerically indistinguishable from a labeled point"
        )
    return f, schur, A, C


def score_pool(model: KernelInterpolator, pool: UnlabeledPool,
               kind: ScoreKind) -> tuple[np.ndarray, np.ndarray]:
    """Score every pool candidate at once.

    Returns
    -------
    scores, labels : ndarray of shape (len(pool),)
        MaxiMin scores and the matching estimated labels ``t(u)``.
    """
    points = pool.points
    if len(model) and pool.dim != model.base.dim:
        raise ValueError(f"pool dimension {pool.dim} does not match model {model.base.dim}")
    f, schur, A, C = _pool_statistics(model, points)
    labels = np.where(f >= 0, 1, -1)
    if kind is ScoreKind.FUNCTION_NORM:
        scores = model.norm_sq + (1.0 - np.abs(f)) ** 2 / schur
        return scores, labels
    # Data-based norm: mean squared change of f over the pool itself.
    K_pool = kernel_matrix(points, points, model.config)
    R = K_pool if A is None else K_pool - A.T @ C
    gain = ((1.0 - np.abs(f)) / schur) ** 2
    scores = gain * np.mean(R ** 2, axis=1)
    return scores, labels


def score_function_norm(model: KernelInterpolator, u) -> ScoredCandidate:
    """Squared norm of the interpolant after adding ``u`` with its estimated label.

    Equals ``||f||^2 + (1 - |f(u)|)^2 / (1 - a_u^T K^{-1} a_u)``; for an empty
    model this is 1 for every candidate.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    f, schur, _, _ = _pool_statistics(model, u[None, :])
    label = 1 if f[0] >= 0 else -1
    score = model.norm_sq + (1.0 - abs(f[0])) ** 2 / schur[0]
    return ScoredCandidate(None, int(label), float(score))


def score_data_norm(model: KernelInterpolator, u, pool: UnlabeledPool) -> ScoredCandidate:
    """Mean squared change of the interpolant over the pool after adding ``u``.

    The average runs over all pool points, including ``u`` itself when present.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if len(pool) == 0:
        raise EmptyPoolError("data-based score needs a nonempty pool")
    f, schur, _, _ = _pool_statistics(model, u[None, :])
    label = 1 if f[0] >= 0 else -1
    if len(model) == 0:
        delta = kernel_matrix(u[None, :], pool.points, model.config)[0]
    else:
        a = kernel_matrix(model.base.points, u[None, :], model.config)
        A_pool = kernel_matrix(model.base.points, pool.points, model.config)
        delta = (kernel_matrix(u[None, :], pool.points, model.config)[0]
                 - model.solve(a)[:, 0] @ A_pool)
    gain = ((1.0 - abs(f[0])) / schur[0]) ** 2
    return ScoredCandidate(None, int(label), float(gain * np.mean(delta ** 2)))


def select_next(model: KernelInterpolator, pool: UnlabeledPool, kind: ScoreKind,
                rng_seed) -> ScoredCandidate:
    """Pick the pool candidate with the largest score.

    Candidates whose scores are within ``1e-12`` (absolute) of the maximum are
    treated as tied and one is drawn uniformly at random from ``rng_seed``
    (an int seed or a ``numpy.random.Generator``).  Deterministic given the
    seed and inputs.
    """
    if len(pool) == 0:
        raise EmptyPoolError("cannot select from an empty pool")
    scores, labels = score_pool(model, pool, kind)
    best = np.max(scores)
    tied = np.flatnonzero(scores >= best - TIE_TOLERANCE)
    rng = np.random.default_rng(rng_seed)
    index = int(tied[rng.integers(len(tied))]) if len(tied) > 1 else int(tied[0])
    return ScoredCandidate(index, int(labels[index]), float(scores[index]))
