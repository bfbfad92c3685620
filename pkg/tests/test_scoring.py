"""Label estimation, the two selection scores, and argmax selection.

Oracle strategy: every score is checked against an explicit double refit
(augment with t = +1 and t = -1, take the relevant norm or pool difference),
and tie-breaking uniformity is checked with a chi-square test.
"""

import numpy as np
import pytest
from scipy.stats import chisquare

from maximin_al.exceptions import DuplicatePointError, EmptyPoolError
from maximin_al.kernel import (
    KernelConfig,
    KernelInterpolator,
    LabeledSet,
    augmented_fit,
    fit,
    kernel_eval,
)
from maximin_al.scoring import (
    ScoreKind,
    UnlabeledPool,
    estimate_label,
    score_data_norm,
    score_function_norm,
    score_pool,
    select_next,
)


def random_model(rng, max_n=20, max_d=3):
    n = int(rng.integers(1, max_n + 1))
    d = int(rng.integers(1, max_d + 1))
    cfg = KernelConfig(float(rng.uniform(0.2, 1.5)), float(rng.choice([1.0, 2.0])))
    pts = rng.uniform(0.0, 1.0, size=(n, d))
    labels = rng.choice([-1, 1], size=n)
    return fit(LabeledSet(pts, labels), cfg)


class TestUnlabeledPool:
    def test_hidden_labels_validated(self):
        with pytest.raises(ValueError):
            UnlabeledPool([[0.0], [1.0]], [1, 0])
        with pytest.raises(ValueError):
            UnlabeledPool([[0.0], [1.0]], [1])

    def test_subset_keeps_alignment(self):
        pool = UnlabeledPool([[0.0], [1.0], [2.0]], [1, -1, 1])
        sub = pool.subset([2, 0])
        assert np.array_equal(sub.points.ravel(), [2.0, 0.0])
        assert np.array_equal(sub.hidden_labels, [1, 1])

    def test_readonly(self):
        pool = UnlabeledPool([[0.0]])
        with pytest.raises(ValueError):
            pool.points[0, 0] = 1.0


class TestEstimateLabel:
    def test_sign_rule(self):
        m = fit(LabeledSet([[0.0]], [1]), KernelConfig(1.0, 1.0))
        assert estimate_label(m, [0.1]) == 1        # f > 0
        m2 = fit(LabeledSet([[0.0]], [-1]), KernelConfig(1.0, 1.0))
        assert estimate_label(m2, [0.1]) == -1      # f < 0

    def test_zero_goes_to_plus_one(self):
        # Far from every labeled point the kernel underflows to exactly zero,
        # so f(u) == 0.0 and the tie must resolve to +1.
        m = fit(LabeledSet([[-1.0], [1.0]], [1, -1]), KernelConfig(1.0, 1.0))
        assert m.evaluate([1e6]) == 0.0
        assert estimate_label(m, [1e6]) == 1

    def test_empty_model_gives_plus_one(self):
        m = KernelInterpolator.empty(KernelConfig(1.0), dim=1)
        assert estimate_label(m, [3.0]) == 1

    def test_matches_argmin_of_augmented_norms(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            m = random_model(rng)
            u = rng.uniform(size=m.base.dim)
            n_plus = augmented_fit(m, u, 1).norm_sq
            n_minus = augmented_fit(m, u, -1).norm_sq
            est = estimate_label(m, u)
            if abs(n_plus - n_minus) > 1e-10:
                assert est == (1 if n_plus < n_minus else -1)


class TestFunctionNormScore:
    def test_empty_model_scores_one(self):
        m = KernelInterpolator.empty(KernelConfig(0.5), dim=2)
        for u in ([0.0, 0.0], [3.0, -1.0]):
            assert score_function_norm(m, u).score == 1.0

    def test_isolated_pair_midpoint_value(self):
        # 4 / (1 - exp(-gap/h)) - 1 at the midpoint of an opposite pair.
        for gap, h in ((1.0, 0.5), (0.4, 0.1), (3.0, 1.0)):
            m = fit(LabeledSet([[0.0], [gap]], [1, -1]), KernelConfig(h, 1.0))
            got = score_function_norm(m, [gap / 2]).score
            want = 4.0 / (1.0 - np.exp(-gap / h)) - 1.0
            assert got == pytest.approx(want, rel=1e-12)

    def test_matches_min_of_double_refit(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            m = random_model(rng)
            u = rng.uniform(size=m.base.dim)
            cand = score_function_norm(m, u)
            both = (augmented_fit(m, u, 1).norm_sq, augmented_fit(m, u, -1).norm_sq)
            assert cand.score == pytest.approx(min(both), rel=1e-8)

    def test_never_below_current_norm(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            m = random_model(rng)
            u = rng.uniform(size=m.base.dim)
            assert score_function_norm(m, u).score >= m.norm_sq - 1e-12

    def test_duplicate_candidate_rejected(self):
        m = fit(LabeledSet([[0.0], [1.0]], [1, -1]), KernelConfig(0.5, 1.0))
        with pytest.raises(DuplicatePointError):
            score_function_norm(m, [1.0])


class TestDataNormScore:
    def test_empty_model_is_mean_squared_kernel(self):
        m = KernelInterpolator.empty(KernelConfig(0.7, 1.0), dim=1)
        pool = UnlabeledPool([[0.0], [0.5], [2.0]])
        got = score_data_norm(m, [0.25], pool).score
        want = np.mean([kernel_eval([0.25], x, m.config) ** 2 for x in pool.points])
        assert got == pytest.approx(want, rel=1e-14)

    def test_mirror_symmetry(self):
        # Mirror-image candidates under a mirror-symmetric configuration
        # receive exactly equal scores.
        m = fit(LabeledSet([[-1.0], [1.0]], [1, -1]), KernelConfig(0.5, 1.0))
        pool = UnlabeledPool([[-0.75], [-0.25], [0.25], [0.75]])
        left = score_data_norm(m, [-0.4], pool).score
        right = score_data_norm(m, [0.4], pool).score
        assert left == pytest.approx(right, rel=1e-12)

    def test_matches_explicit_double_fit_average(self):
        rng = np.random.default_rng(24)
        for _ in range(100):
            m = random_model(rng)
            d = m.base.dim
            pool = UnlabeledPool(rng.uniform(size=(int(rng.integers(2, 30)), d)))
            u = rng.uniform(size=d)
            got = score_data_norm(m, u, pool).score
            t = estimate_label(m, u)
            aug = augmented_fit(m, u, t)
            diff = aug.predict(pool.points) - m.predict(pool.points)
            want = float(np.mean(diff ** 2))
            assert got == pytest.approx(want, rel=1e-10, abs=1e-10)

    def test_empty_pool_rejected(self):
        m = fit(LabeledSet([[0.0]], [1]), KernelConfig(1.0))
        with pytest.raises(EmptyPoolError):
            score_data_norm(m, [0.5], UnlabeledPool(np.empty((0, 1))))


class TestScorePool:
    def test_matches_single_point_scores(self):
        rng = np.random.default_rng(25)
        for kind in ScoreKind:
            m = random_model(rng)
            pool = UnlabeledPool(rng.uniform(size=(15, m.base.dim)))
            scores, labels = score_pool(m, pool, kind)
            for i, u in enumerate(pool.points):
                if kind is ScoreKind.FUNCTION_NORM:
                    single = score_function_norm(m, u)
                else:
                    single = score_data_norm(m, u, pool)
                assert scores[i] == pytest.approx(single.score, rel=1e-10, abs=1e-12)
                assert labels[i] == single.label

    def test_labels_follow_sign_of_f(self):
        rng = np.random.default_rng(26)
        m = random_model(rng)
        pool = UnlabeledPool(rng.uniform(size=(20, m.base.dim)))
        _, labels = score_pool(m, pool, ScoreKind.FUNCTION_NORM)
        f = m.predict(pool.points)
        assert np.array_equal(labels, np.where(f >= 0, 1, -1))

    def test_dimension_mismatch(self):
        m = fit(LabeledSet([[0.0, 0.0]], [1]), KernelConfig(1.0))
        with pytest.raises(ValueError):
            score_pool(m, UnlabeledPool([[0.0]]), ScoreKind.FUNCTION_NORM)

    def test_duplicate_pool_point_rejected(self):
        m = fit(LabeledSet([[0.0], [1.0]], [1, -1]), KernelConfig(0.5))
        with pytest.raises(DuplicatePointError):
            score_pool(m, UnlabeledPool([[0.5], [1.0]]), ScoreKind.FUNCTION_NORM)


class TestSelectNext:
    def test_single_candidate(self):
        m = fit(LabeledSet([[0.0]], [1]), KernelConfig(1.0))
        got = select_next(m, UnlabeledPool([[0.7]]), ScoreKind.FUNCTION_NORM, 0)
        assert got.index == 0

    def test_empty_pool_rejected(self):
        m = fit(LabeledSet([[0.0]], [1]), KernelConfig(1.0))
        with pytest.raises(EmptyPoolError):
            select_next(m, UnlabeledPool(np.empty((0, 1))), ScoreKind.FUNCTION_NORM, 0)

    def test_grid_between_opposite_pair_picks_near_midpoint(self):
        m = fit(LabeledSet([[0.0], [1.0]], [1, -1]), KernelConfig(0.2, 1.0))
        grid = np.linspace(0.05, 0.95, 101)[:, None]
        got = select_next(m, UnlabeledPool(grid), ScoreKind.FUNCTION_NORM, 0)
        assert abs(grid[got.index, 0] - 0.5) <= (grid[1, 0] - grid[0, 0]) / 2 + 1e-12

    def test_deterministic_given_seed(self):
        m = KernelInterpolator.empty(KernelConfig(1.0), dim=1)
        pool = UnlabeledPool(np.linspace(0, 1, 50)[:, None])
        a = select_next(m, pool, ScoreKind.FUNCTION_NORM, 123)
        b = select_next(m, pool, ScoreKind.FUNCTION_NORM, 123)
        assert a == b

    def test_tie_break_is_uniform(self):
        # Empty model, function norm: all scores are exactly 1, so selection
        # frequencies over many draws must be uniform (chi-square p > 0.01).
        m = KernelInterpolator.empty(KernelConfig(1.0), dim=1)
        pool = UnlabeledPool(np.linspace(0, 1, 8)[:, None])
        rng = np.random.default_rng(27)
        counts = np.zeros(8, dtype=int)
        for _ in range(10_000):
            counts[select_next(m, pool, ScoreKind.FUNCTION_NORM, rng).index] += 1
        assert chisquare(counts).pvalue > 0.01

    def test_argmax_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(28)
        for _ in range(50):
            m = random_model(rng)
            pool = UnlabeledPool(rng.uniform(size=(25, m.base.dim)))
            scores, _ = score_pool(m, pool, ScoreKind.FUNCTION_NORM)
            assert int(np.argmax(scores)) == int(np.argmax(np.sqrt(scores)))

    def test_returned_score_and_label_match_pool_scoring(self):
        rng = np.random.default_rng(29)
        m = random_model(rng)
        pool = UnlabeledPool(rng.uniform(size=(30, m.base.dim)))
        got = select_next(m, pool, ScoreKind.DATA_NORM, 5)
        scores, labels = score_pool(m, pool, ScoreKind.DATA_NORM)
        assert got.score == scores[got.index]
        assert got.label == labels[got.index]
        assert scores[got.index] >= scores.max() - 1e-12
