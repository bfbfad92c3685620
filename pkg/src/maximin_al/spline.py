"""Minimal-knot linear-spline interpolation and its selection scores.

The model interpolates 1-D labeled points with the piecewise-linear function
whose roughness ``R(f) = max(integral |f''|, |f'(-inf) + f'(+inf)|)`` is
minimal — the variational limit of training a two-layer ReLU network with
weight decay.  We realize the minimizer by adding two artificial boundary
knots (at ``x_min - pad`` and ``x_max + pad`` with ``pad = max(1, span)``)
that replicate the extreme labels, which pins the boundary slopes to zero;
``R(f)`` then equals the total variation of ``f'``, reported *unsquared*
(it is already a norm).

Scores for a candidate ``u`` strictly between labeled neighbors
``(x_j, y_j), (x_{j+1}, y_{j+1})`` use the exact roughness change

    delta(t) = 2(1 - t y_j)/(u - x_j) + 2(1 - t y_{j+1})/(x_{j+1} - u)
               - 2(1 - y_j y_{j+1})/(x_{j+1} - x_j),

with the label ``t(u)`` minimizing it (ties at the exact midpoint go to +1):

* the function-norm score ``R(f) + min_t delta(t)`` peaks at the midpoint of
  an oppositely-labeled pair, preferring *narrower* such pairs, and is
  constant between equal labels;
* the data-based score integrates ``(f^u - f)^2`` against a density — exactly,
  since the difference is a hat function supported on one interval — and
  prefers *wider* oppositely-labeled pairs, vanishing between equal labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DuplicatePointError, EmptyPoolError, OutOfRangeError
from .scoring import TIE_TOLERANCE, ScoredCandidate


@dataclass(frozen=True)
class Uniform1D:
    """Uniform density on ``[lo, hi]`` (integrates to 1)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class Empirical1D:
    """Empirical density: the mean over a fixed set of 1-D points."""

    points: np.ndarray

    def __init__(self, points):
        pts = np.asarray(points, dtype=float).ravel()
        if pts.size == 0:
            raise EmptyPoolError("empirical density needs at least one point")
        object.__setattr__(self, "points", pts)


Density1D = Uniform1D | Empirical1D


class SplineInterpolator:
    """Minimal-roughness linear spline through labeled 1-D points.

    Attributes
    ----------
    positions, values : ndarray
        The sorted labeled data (without the artificial boundary knots).
    knots, knot_values : ndarray
        Full knot sequence including the two boundary knots.
    weight_norm : float
        Total variation of ``f'`` (boundary slopes are zero), unsquared.
    """

    def __init__(self, positions, values):
        positions = np.asarray(positions, dtype=float).ravel()
        values = np.asarray(values)
        if positions.size == 0:
            raise ValueError("need at least one labeled point")
        if values.shape != positions.shape:
            raise ValueError("positions and values must have equal length")
        if not np.all(np.isin(values, (-1, 1))):
            raise ValueError("values must be +1 or -1")
        order = np.argsort(positions)
        positions = positions[order]
        values = values[order].astype(float)
        if np.any(np.diff(positions) == 0):
            raise DuplicatePointError("labeled positions must be distinct")
        self.positions = positions
        self.values = values
        span = positions[-1] - positions[0]
        pad = max(1.0, span)
        self.knots = np.concatenate([[positions[0] - pad], positions,
                                     [positions[-1] + pad]])
        self.knot_values = np.concatenate([[values[0]], values, [values[-1]]])
        slopes = np.diff(self.knot_values) / np.diff(self.knots)
        self.slopes = slopes
        ext = np.concatenate([[0.0], slopes, [0.0]])
        self.weight_norm = float(np.sum(np.abs(np.diff(ext))))

    def __len__(self) -> int:
        return len(self.positions)

    def predict(self, x) -> np.ndarray:
        """Spline values at ``x`` (constant beyond the boundary knots)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.interp(x, self.knots, self.knot_values)

    def interval_of(self, u) -> np.ndarray:
        """Index ``j`` with ``positions[j] < u < positions[j+1]`` per candidate.

        Raises
        ------
        DuplicatePointError
            If any ``u`` equals a labeled position.
        OutOfRangeError
            If any ``u`` falls outside the open hull of the labeled positions.
        """
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if np.any(np.isin(u, self.positions)):
            raise DuplicatePointError("candidate coincides with a labeled position")
        if np.any((u < self.positions[0]) | (u > self.positions[-1])):
            raise OutOfRangeError("candidate lies outside the labeled hull")
        return np.searchsorted(self.positions, u) - 1


def fit_spline(positions, values) -> SplineInterpolator:
    """Fit the minimal-roughness linear spline through ``(positions, values)``."""
    return SplineInterpolator(positions, values)


def _roughness_deltas(m: SplineInterpolator, u: np.ndarray, j: np.ndarray):
    """Roughness change for labels +1 and -1 at each candidate."""
    xl, xr = m.positions[j], m.positions[j + 1]
    yl, yr = m.values[j], m.values[j + 1]
    shared = 2.0 * (1.0 - yl * yr) / (xr - xl)
    dplus = 2.0 * (1.0 - yl) / (u - xl) + 2.0 * (1.0 - yr) / (xr - u) - shared
    dminus = 2.0 * (1.0 + yl) / (u - xl) + 2.0 * (1.0 + yr) / (xr - u) - shared
    return dplus, dminus


def spline_score_pool(m: SplineInterpolator, us, kind,
                      density: Density1D | None = None):
    """Vectorized scores and estimated labels for 1-D candidates ``us``.

    ``kind`` follows :class:`maximin_al.scoring.ScoreKind` semantics:
    ``"function"``/FUNCTION_NORM or ``"data"``/DATA_NORM (the latter requires
    ``density``).  Candidates must lie strictly inside the labeled hull.
    """
    us = np.atleast_1d(np.asarray(us, dtype=float))
    j = m.interval_of(us)
    dplus, dminus = _roughness_deltas(m, us, j)
    labels = np.where(dplus <= dminus, 1, -1)
    kind_name = getattr(kind, "value", kind)
    if kind_name == "function":
        return m.weight_norm + np.minimum(dplus, dminus), labels
    if kind_name != "data":
        raise ValueError(f"unknown score kind {kind!r}")
    if density is None:
        raise ValueError("the data-based score requires a density")
    peak = labels - m.predict(us)
    scores = peak ** 2 * _hat_mean_sq(m, us, j, density)
    return scores, labels


def _hat_mean_sq(m: SplineInterpolator, u: np.ndarray, j: np.ndarray,
                 density: Density1D) -> np.ndarray:
    """Mean of ``hat(x)^2`` under the density, for the unit hat peaking at u.

    The hat rises linearly from 0 at ``positions[j]`` to 1 at ``u`` and falls
    back to 0 at ``positions[j+1]``; it is the shape of ``f^u - f`` up to the
    ``t - f(u)`` peak factor.
    """
    xl, xr = m.positions[j], m.positions[j + 1]
    if isinstance(density, Uniform1D):
        lo, hi = density.lo, density.hi
        weight = 1.0 / (hi - lo)
        left = _ramp_sq_integral(np.maximum(xl, lo), np.minimum(u, hi), xl, u)
        right = _ramp_sq_integral(np.maximum(u, lo), np.minimum(xr, hi), xr, u)
        return weight * (left + right)
    pts = density.points
    out = np.empty(len(u))
    for i in range(len(u)):
        rise = (pts > xl[i]) & (pts < u[i])
        fall = (pts >= u[i]) & (pts < xr[i])
        total = np.sum(((pts[rise] - xl[i]) / (u[i] - xl[i])) ** 2)
        total += np.sum(((xr[i] - pts[fall]) / (xr[i] - u[i])) ** 2)
        out[i] = total / len(pts)
    return out


def _ramp_sq_integral(a, b, x0, x1):
    """Exact ``integral_a^b ((x - x0)/(x1 - x0))^2 dx`` for each entry, 0 when b <= a.

    The ramp is 0 at ``x0`` and 1 at ``x1``; the antiderivative is cubic, so
    the piecewise-quadratic integrand is handled exactly.
    """
    a = np.minimum(np.maximum(a, np.minimum(x0, x1)), np.maximum(x0, x1))
    b = np.minimum(np.maximum(b, np.minimum(x0, x1)), np.maximum(x0, x1))
    width = x1 - x0
    ta = (a - x0) / width
    tb = (b - x0) / width
    raw = (tb ** 3 - ta ** 3) * width / 3.0
    return np.where(b > a, np.abs(raw), 0.0)


def spline_score_function_norm(m: SplineInterpolator, u) -> ScoredCandidate:
    """Roughness of the augmented spline with the norm-minimizing label at ``u``.

    Between equal labels the score is constantly ``weight_norm``; between
    opposite labels it is ``weight_norm - 4/(x_{j+1} - x_j)
    + min(4/(x_{j+1} - u), 4/(u - x_j))``, peaking at the midpoint.
    """
    scores, labels = spline_score_pool(m, [u], "function")
    return ScoredCandidate(None, int(labels[0]), float(scores[0]))


def spline_score_data_norm(m: SplineInterpolator, u,
                           density: Density1D) -> ScoredCandidate:
    """Integrated squared change of the spline after adding ``u``.

    ``f^u - f`` is a hat supported on the interval containing ``u`` with peak
    ``t - f(u)``, so the integral is evaluated exactly (piecewise quadratic)
    under a uniform density, or as the pool mean under an empirical one.
    """
    scores, labels = spline_score_pool(m, [u], "data", density)
    return ScoredCandidate(None, int(labels[0]), float(scores[0]))


def spline_select_next(m: SplineInterpolator, pool, kind, rng_seed,
                       density: Density1D | None = None) -> ScoredCandidate:
    """Pick the candidate with the largest spline score.

    ``pool`` is a 1-D array of candidates or an ``UnlabeledPool`` with d = 1.
    For the data-based score the pool itself is the default density.  Ties
    within ``1e-12`` absolute break uniformly at random under ``rng_seed``.
    """
    points = getattr(pool, "points", pool)
    us = np.asarray(points, dtype=float).ravel()
    if us.size == 0:
        raise EmptyPoolError("cannot select from an empty pool")
    kind_name = getattr(kind, "value", kind)
    if kind_name == "data" and density is None:
        density = Empirical1D(us)
    scores, labels = spline_score_pool(m, us, kind, density)
    best = np.max(scores)
    tied = np.flatnonzero(scores >= best - TIE_TOLERANCE)
    rng = np.random.default_rng(rng_seed)
    index = int(tied[rng.integers(len(tied))]) if len(tied) > 1 else int(tied[0])
    return ScoredCandidate(index, int(labels[index]), float(scores[index]))
