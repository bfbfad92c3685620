"""Minimum-norm interpolation with exponential radial-basis kernels.

The kernel family is ``k(x, x') = exp(-||x - x'||_p / h)`` with bandwidth
``h > 0`` and Minkowski order ``p >= 1``, so ``k(x, x) = 1`` everywhere.
Fitting a :class:`KernelInterpolator` to labeled points ``(x_i, y_i)`` solves
``K alpha = y`` for the representer coefficients; the interpolant is
``f(x) = sum_i alpha_i k(x_i, x)`` and its squared Hilbert norm is
``y^T K^{-1} y = y^T alpha``, the smallest norm among all interpolants of the
data in the kernel's native space.

Fitted models are immutable: :func:`augmented_fit` returns a new model for the
data set extended by one point, updating the Cholesky factor and the squared
norm in O(L^2) through the rank-one (Schur-complement) identity

    ||f_new||^2 = ||f||^2 + (1 - t * f(u))^2 / (1 - a_u^T K^{-1} a_u),

where ``a_u = [k(x_i, u)]_i`` and ``t`` is the new label.  Immutability makes
models safe to share across threads; all randomness in the package lives in
explicitly seeded selection routines, never here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.spatial.distance import cdist

from .exceptions import ConditioningError, DuplicatePointError

# Escalating diagonal jitter used before declaring the system singular.
JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)

# Residual tolerance for accepting a solve, max-norm of K @ alpha - y.
SOLVE_RESIDUAL_TOL = 1e-8

# Schur complements below this are treated as a duplicate of a labeled point.
SCHUR_FLOOR = 1e-12


@dataclass(frozen=True)
class KernelConfig:
    """Kernel hyperparameters: bandwidth ``h`` and Minkowski order ``p``.

    Parameters
    ----------
    bandwidth : float
        Length scale ``h``; must be strictly positive.
    exponent : float, default=2.0
        Distance order ``p``; any real ``p >= 1`` is accepted.
    """

    bandwidth: float
    exponent: float = 2.0

    def __post_init__(self):
        if not np.isfinite(self.bandwidth) or self.bandwidth <= 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        if not np.isfinite(self.exponent) or self.exponent < 1:
            raise ValueError(f"exponent must satisfy p >= 1, got {self.exponent}")


class LabeledSet:
    """Immutable collection of labeled points.

    Parameters
    ----------
    points : array-like of shape (n, d)
        Pairwise-distinct feature vectors.  A 1-D array is treated as n
        points in one dimension.
    labels : array-like of shape (n,)
        Binary labels, each exactly +1 or -1.
    """

    def __init__(self, points, labels):
        points = np.atleast_1d(np.asarray(points, dtype=float))
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2:
            raise ValueError(f"points must be 2-D, got shape {points.shape}")
        labels = np.asarray(labels)
        if labels.shape != (points.shape[0],):
            raise ValueError(
                f"labels shape {labels.shape} does not match {points.shape[0]} points"
            )
        if not np.all(np.isin(labels, (-1, 1))):
            raise ValueError("labels must be +1 or -1")
        if len(np.unique(points, axis=0)) != len(points):
            raise DuplicatePointError("labeled points must be pairwise distinct")
        self._points = points.copy()
        self._labels = labels.astype(int).copy()
        self._points.setflags(write=False)
        self._labels.setflags(write=False)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return len(self._points)

    def append(self, point, label) -> "LabeledSet":
        """Return a new LabeledSet with one extra labeled point."""
        point = np.asarray(point, dtype=float).reshape(1, -1)
        if len(self) and point.shape[1] != self.dim:
            raise ValueError(f"point has dimension {point.shape[1]}, expected {self.dim}")
        return LabeledSet(
            np.vstack([self._points, point]) if len(self) else point,
            np.append(self._labels, int(label)),
        )


def kernel_eval(x, x2, config: KernelConfig) -> float:
    """Evaluate ``exp(-||x - x2||_p / h)`` for a single pair of points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    if x.shape != x2.shape:
        raise ValueError(f"point shapes differ: {x.shape} vs {x2.shape}")
    dist = np.linalg.norm(x - x2, ord=config.exponent)
    return float(np.exp(-dist / config.bandwidth))


def kernel_matrix(X, Y, config: KernelConfig) -> np.ndarray:
    """Cross-kernel matrix ``[k(x_i, y_j)]`` of shape (len(X), len(Y))."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    if X.size == 0 or Y.size == 0:
        return np.zeros((X.shape[0], Y.shape[0]))
    return np.exp(-cdist(X, Y, metric="minkowski", p=config.exponent) / config.bandwidth)


class KernelInterpolator:
    """Minimum-norm kernel interpolant of a :class:`LabeledSet`.

    Instances are created by :func:`fit`, :func:`augmented_fit`, or
    :meth:`KernelInterpolator.empty`; the constructor is internal.  The empty
    model represents ``f == 0`` with ``norm_sq == 0``.
    """

    def __init__(self, base: LabeledSet, config: KernelConfig, chol: np.ndarray,
                 coefficients: np.ndarray, norm_sq: float, jitter: float):
        self.base = base
        self.config = config
        self.jitter = jitter
        self._chol = chol  # lower-triangular factor of K + jitter * I
        self.coefficients = coefficients
        self.norm_sq = float(norm_sq)

    @classmethod
    def empty(cls, config: KernelConfig, dim: int = 1) -> "KernelInterpolator":
        """The zero interpolant of an empty labeled set (``f == 0``)."""
        base = LabeledSet(np.empty((0, dim)), np.empty(0, dtype=int))
        return cls(base, config, np.empty((0, 0)), np.empty(0), 0.0, 0.0)

    def __len__(self) -> int:
        return len(self.base)

    def solve(self, B: np.ndarray) -> np.ndarray:
        """Apply ``(K + jitter*I)^{-1}`` to the columns of ``B``."""
        if len(self) == 0:
            return np.zeros_like(B)
        W = solve_triangular(self._chol, B, lower=True)
        return solve_triangular(self._chol.T, W, lower=False)

    def half_solve(self, B: np.ndarray) -> np.ndarray:
        """Apply ``L^{-1}`` where ``K + jitter*I = L L^T``."""
        return solve_triangular(self._chol, B, lower=True)

    def predict(self, X) -> np.ndarray:
        """Evaluate the interpolant at each row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if len(self) == 0:
            return np.zeros(X.shape[0])
        return kernel_matrix(X, self.base.points, self.config) @ self.coefficients

    def evaluate(self, x) -> float:
        """Evaluate the interpolant at a single point."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return float(self.predict(x[None, :])[0])


def fit(labeled: LabeledSet, config: KernelConfig) -> KernelInterpolator:
    """Fit the minimum-norm interpolant of a nonempty labeled set.

    Solves ``(K + jitter*I) alpha = y`` by Cholesky factorization with the
    escalating jitter ladder; the accepted solve satisfies
    ``max|K alpha - y| <= 1e-8``.

    Raises
    ------
    ValueError
        If the labeled set is empty (use :meth:`KernelInterpolator.empty`).
    ConditioningError
        If no jitter level yields an acceptable factorization.
    """
    if len(labeled) == 0:
        raise ValueError("fit requires a nonempty labeled set")
    K = kernel_matrix(labeled.points, labeled.points, config)
    y = labeled.labels.astype(float)
    last_cond = None
    for jitter in JITTER_LADDER:
        Kj = K + jitter * np.eye(len(K)) if jitter else K
        try:
            chol = np.linalg.cholesky(Kj)
        except np.linalg.LinAlgError:
            last_cond = float(np.linalg.cond(Kj))
            continue
        alpha = solve_triangular(chol.T, solve_triangular(chol, y, lower=True), lower=False)
        # Gate on the residual of the *unjittered* system: jitter may buy a
        # factorization, but the result must still interpolate the labels.
        if np.max(np.abs(K @ alpha - y)) <= SOLVE_RESIDUAL_TOL:
            return KernelInterpolator(labeled, config, chol, alpha,
                                      float(y @ alpha), jitter)
        last_cond = float(np.linalg.cond(Kj))
    raise ConditioningError(
        "kernel system solve failed beyond the jitter budget",
        condition=last_cond if last_cond is not None else float(np.linalg.cond(K)),
    )


def augmented_fit(model: KernelInterpolator, u, t: int) -> KernelInterpolator:
    """Fit of the model's labeled set extended by ``(u, t)``.

    Equivalent to refitting from scratch on the augmented set (same jitter),
    but performed in O(L^2) by extending the Cholesky factor.  The squared
    norm grows by exactly ``(1 - t*f(u))^2 / (1 - a_u^T K^{-1} a_u)``.

    Raises
    ------
    DuplicatePointError
        If ``u`` coincides with a labeled point, or its Schur complement
        falls below ``1e-12`` (numerically indistinguishable from one).
    """
    t = int(t)
    if t not in (-1, 1):
        raise ValueError(f"label must be +1 or -1, got {t}")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if len(model) == 0:
        return fit(model.base.append(u, t), model.config)
    if u.shape != (model.base.dim,):
        raise ValueError(f"point has shape {u.shape}, expected ({model.base.dim},)")

    a = kernel_matrix(u[None, :], model.base.points, model.config)[0]
    w = model.half_solve(a)
    schur = 1.0 + model.jitter - w @ w
    if schur < SCHUR_FLOOR:
        raise DuplicatePointError(
            "candidate is numerically indistinguishable from a labeled point"
        )
    f_u = w @ model.half_solve(model.base.labels.astype(float))

    L = model._chol
    n = len(model)
    chol = np.zeros((n + 1, n + 1))
    chol[:n, :n] = L
    chol[n, :n] = w
    chol[n, n] = np.sqrt(schur)

    gamma = (t - f_u) / schur
    coeff = np.empty(n + 1)
    coeff[:n] = model.coefficients - gamma * model.solve(a)
    coeff[n] = gamma
    norm_sq = model.norm_sq + (1.0 - t * f_u) ** 2 / schur
    return KernelInterpolator(model.base.append(u, t), model.config, chol,
                              coeff, norm_sq, model.jitter)
