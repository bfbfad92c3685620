"""Kernel evaluation, minimum-norm fitting, and the rank-one augmentation.

Oracle strategy: closed-form two-point norms, direct kernel-sum evaluation,
and full refits on the augmented set serve as independent references for the
incremental (Cholesky-extension) implementation.
"""

import numpy as np
import pytest

from maximin_al.exceptions import ConditioningError, DuplicatePointError
from maximin_al.kernel import (
    KernelConfig,
    KernelInterpolator,
    LabeledSet,
    augmented_fit,
    fit,
    kernel_eval,
    kernel_matrix,
)


def random_config(rng, max_n=50, max_d=5):
    """A random labeled set + candidate + config, well separated in [0, 1]^d."""
    n = int(rng.integers(1, max_n + 1))
    d = int(rng.integers(1, max_d + 1))
    p = float(rng.choice([1.0, 2.0]))
    h = float(rng.uniform(0.2, 2.0))
    pts = rng.uniform(0.0, 1.0, size=(n + 1, d))
    labels = rng.choice([-1, 1], size=n)
    return LabeledSet(pts[:n], labels), pts[n], KernelConfig(h, p)


class TestKernelConfig:
    def test_rejects_nonpositive_bandwidth(self):
        with pytest.raises(ValueError):
            KernelConfig(0.0)
        with pytest.raises(ValueError):
            KernelConfig(-1.0)
        with pytest.raises(ValueError):
            KernelConfig(float("nan"))

    def test_rejects_exponent_below_one(self):
        with pytest.raises(ValueError):
            KernelConfig(1.0, 0.5)
        with pytest.raises(ValueError):
            KernelConfig(1.0, float("inf"))

    def test_default_exponent_is_two(self):
        assert KernelConfig(1.0).exponent == 2.0


class TestKernelEval:
    def test_coincident_points_give_one(self):
        for cfg in (KernelConfig(0.3, 1), KernelConfig(2.0, 2), KernelConfig(1.0, 3)):
            assert kernel_eval([0.4, -1.2], [0.4, -1.2], cfg) == 1.0

    def test_unit_distance_formula(self):
        cfg = KernelConfig(1.0, 1.0)
        assert kernel_eval([0.0], [2.0], cfg) == pytest.approx(np.exp(-2.0), rel=1e-15)

    def test_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            d = int(rng.integers(1, 6))
            a, b = rng.normal(size=(2, d))
            cfg = KernelConfig(float(rng.uniform(0.1, 3)), float(rng.choice([1, 2, 4])))
            assert kernel_eval(a, b, cfg) == kernel_eval(b, a, cfg)

    def test_range_is_zero_one(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            a, b = rng.normal(scale=5, size=(2, 3))
            v = kernel_eval(a, b, KernelConfig(0.5, 2))
            assert 0.0 < v <= 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            kernel_eval([0.0], [0.0, 1.0], KernelConfig(1.0))


class TestKernelMatrix:
    def test_unit_diagonal_and_symmetry(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(12, 3))
        K = kernel_matrix(X, X, KernelConfig(0.7, 1.5))
        assert np.allclose(np.diag(K), 1.0)
        assert np.array_equal(K, K.T)

    def test_matches_pairwise_eval(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(5, 2))
        Y = rng.normal(size=(4, 2))
        cfg = KernelConfig(0.9, 1.0)
        K = kernel_matrix(X, Y, cfg)
        for i in range(5):
            for j in range(4):
                assert K[i, j] == pytest.approx(kernel_eval(X[i], Y[j], cfg), rel=1e-14)

    def test_empty_inputs(self):
        K = kernel_matrix(np.empty((0, 2)), np.ones((3, 2)), KernelConfig(1.0))
        assert K.shape == (0, 3)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            kernel_matrix(np.ones((2, 2)), np.ones((2, 3)), KernelConfig(1.0))


class TestLabeledSet:
    def test_duplicate_points_rejected(self):
        with pytest.raises(DuplicatePointError):
            LabeledSet([[0.0], [0.0]], [1, -1])

    def test_bad_labels_rejected(self):
        with pytest.raises(ValueError):
            LabeledSet([[0.0], [1.0]], [1, 0])
        with pytest.raises(ValueError):
            LabeledSet([[0.0]], [2])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            LabeledSet([[0.0], [1.0]], [1])

    def test_one_dimensional_input_promoted(self):
        s = LabeledSet([0.0, 1.0, 2.0], [1, -1, 1])
        assert s.points.shape == (3, 1)
        assert s.dim == 1

    def test_arrays_are_readonly(self):
        s = LabeledSet([[0.0], [1.0]], [1, -1])
        with pytest.raises(ValueError):
            s.points[0, 0] = 5.0
        with pytest.raises(ValueError):
            s.labels[0] = -1

    def test_append_leaves_original_untouched(self):
        s = LabeledSet([[0.0], [1.0]], [1, -1])
        s2 = s.append([2.0], 1)
        assert len(s) == 2 and len(s2) == 3
        assert s2.labels[-1] == 1
        assert np.array_equal(s2.points[:2], s.points)

    def test_append_dimension_mismatch(self):
        s = LabeledSet([[0.0, 0.0]], [1])
        with pytest.raises(ValueError):
            s.append([1.0], 1)


class TestFit:
    def test_single_point(self):
        m = fit(LabeledSet([[0.5]], [1]), KernelConfig(1.0, 1.0))
        assert np.array_equal(m.coefficients, [1.0])
        assert m.norm_sq == 1.0
        assert m.evaluate([1.5]) == pytest.approx(np.exp(-1.0), rel=1e-15)

    def test_two_point_opposite_norm(self):
        # closed form 2 / (1 - exp(-gap/h)) for labels (+1, -1)
        for gap, h in ((1.0, 1.0), (0.3, 0.1), (2.5, 0.7)):
            m = fit(LabeledSet([[0.0], [gap]], [1, -1]), KernelConfig(h, 1.0))
            want = 2.0 / (1.0 - np.exp(-gap / h))
            assert m.norm_sq == pytest.approx(want, rel=1e-12)

    def test_two_point_equal_norm(self):
        # closed form 2 / (1 + exp(-gap/h)) for labels (+1, +1)
        for gap, h in ((1.0, 1.0), (0.3, 0.1), (2.5, 0.7)):
            m = fit(LabeledSet([[0.0], [gap]], [1, 1]), KernelConfig(h, 1.0))
            want = 2.0 / (1.0 + np.exp(-gap / h))
            assert m.norm_sq == pytest.approx(want, rel=1e-12)

    def test_empty_set_rejected(self):
        empty = LabeledSet(np.empty((0, 1)), np.empty(0, dtype=int))
        with pytest.raises(ValueError):
            fit(empty, KernelConfig(1.0))

    def test_interpolation_constraint(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            labeled, _, cfg = random_config(rng)
            m = fit(labeled, cfg)
            preds = m.predict(labeled.points)
            assert np.max(np.abs(preds - labeled.labels)) <= 1e-8

    def test_norm_equals_y_dot_alpha(self):
        rng = np.random.default_rng(12)
        for _ in range(40):
            labeled, _, cfg = random_config(rng)
            m = fit(labeled, cfg)
            assert m.norm_sq == pytest.approx(
                float(labeled.labels @ m.coefficients), rel=1e-12, abs=1e-12)
            assert m.norm_sq >= 0.0

    def test_norm_against_dense_solve(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            labeled, _, cfg = random_config(rng, max_n=20)
            m = fit(labeled, cfg)
            K = kernel_matrix(labeled.points, labeled.points, cfg)
            y = labeled.labels.astype(float)
            want = float(y @ np.linalg.solve(K, y))
            assert m.norm_sq == pytest.approx(want, rel=1e-9, abs=1e-9)

    def test_singular_uninterpolatable_raises_with_condition(self):
        # Points whose kernel rows coincide to the last bit, labels (+1, -1):
        # no interpolant exists, so every jitter level must be refused.
        labeled = LabeledSet([[0.0], [1e-300]], [1, -1])
        with pytest.raises(ConditioningError) as exc:
            fit(labeled, KernelConfig(1.0, 1.0))
        assert exc.value.condition > 1e8

    def test_singular_but_consistent_labels_fit_via_jitter(self):
        labeled = LabeledSet([[0.0], [1e-300]], [1, 1])
        m = fit(labeled, KernelConfig(1.0, 1.0))
        K = kernel_matrix(labeled.points, labeled.points, m.config)
        assert np.max(np.abs(K @ m.coefficients - labeled.labels)) <= 1e-8
        assert m.jitter > 0


class TestEvaluate:
    def test_labeled_points_return_labels(self):
        rng = np.random.default_rng(14)
        labeled, _, cfg = random_config(rng, max_n=30)
        m = fit(labeled, cfg)
        for x, y in zip(labeled.points, labeled.labels):
            assert m.evaluate(x) == pytest.approx(float(y), abs=1e-8)

    def test_far_field_decay(self):
        rng = np.random.default_rng(15)
        labeled, _, cfg = random_config(rng, max_n=20, max_d=3)
        m = fit(labeled, cfg)
        far = labeled.points[0] + 40.0 * cfg.bandwidth  # distance >= 40 h
        direct = sum(a * kernel_eval(far, x, cfg)
                     for a, x in zip(m.coefficients, labeled.points))
        assert abs(m.evaluate(far)) < 1e-6
        assert m.evaluate(far) == pytest.approx(direct, abs=1e-12)

    def test_predict_matches_evaluate(self):
        rng = np.random.default_rng(16)
        labeled, _, cfg = random_config(rng)
        m = fit(labeled, cfg)
        X = rng.uniform(size=(20, labeled.dim))
        preds = m.predict(X)
        for i in range(20):
            assert preds[i] == pytest.approx(m.evaluate(X[i]), rel=1e-14, abs=1e-14)

    def test_empty_model_is_zero(self):
        m = KernelInterpolator.empty(KernelConfig(0.5), dim=3)
        assert m.norm_sq == 0.0
        assert np.array_equal(m.predict(np.ones((4, 3))), np.zeros(4))


class TestAugmentedFit:
    def test_empty_base_single_point_norm_one(self):
        m = KernelInterpolator.empty(KernelConfig(1.0), dim=2)
        m2 = augmented_fit(m, [0.3, 0.4], 1)
        assert m2.norm_sq == 1.0
        assert len(m2) == 1

    def test_matches_full_refit(self):
        # The O(L^2) Cholesky extension must agree with a from-scratch solve.
        rng = np.random.default_rng(17)
        for _ in range(200):
            labeled, u, cfg = random_config(rng)
            t = int(rng.choice([-1, 1]))
            base = fit(labeled, cfg)
            inc = augmented_fit(base, u, t)
            ref = fit(labeled.append(u, t), cfg)
            assert inc.norm_sq == pytest.approx(ref.norm_sq, rel=1e-8)
            np.testing.assert_allclose(inc.coefficients, ref.coefficients,
                                       rtol=1e-8, atol=1e-8)

    def test_rank_one_increment_formula(self):
        rng = np.random.default_rng(18)
        for _ in range(100):
            labeled, u, cfg = random_config(rng, max_n=25)
            t = int(rng.choice([-1, 1]))
            base = fit(labeled, cfg)
            K = kernel_matrix(labeled.points, labeled.points, cfg)
            a = kernel_matrix(u[None, :], labeled.points, cfg)[0]
            Kinv_a = np.linalg.solve(K, a)
            f_u = float(labeled.labels @ Kinv_a)
            want = base.norm_sq + (1.0 - t * f_u) ** 2 / (1.0 - a @ Kinv_a)
            got = augmented_fit(base, u, t).norm_sq
            assert got == pytest.approx(want, rel=1e-8)

    def test_norm_never_decreases(self):
        rng = np.random.default_rng(19)
        m = KernelInterpolator.empty(KernelConfig(0.4, 1.0), dim=2)
        prev = 0.0
        for _ in range(30):
            u = rng.uniform(size=2)
            m = augmented_fit(m, u, int(rng.choice([-1, 1])))
            assert m.norm_sq >= prev - 1e-12
            prev = m.norm_sq

    def test_interpolates_all_points(self):
        rng = np.random.default_rng(20)
        labeled, u, cfg = random_config(rng, max_n=20)
        t = int(rng.choice([-1, 1]))
        m = augmented_fit(fit(labeled, cfg), u, t)
        preds = m.predict(m.base.points)
        assert np.max(np.abs(preds - m.base.labels)) <= 1e-8

    def test_duplicate_candidate_rejected(self):
        labeled = LabeledSet([[0.0], [1.0]], [1, -1])
        m = fit(labeled, KernelConfig(0.5, 1.0))
        with pytest.raises(DuplicatePointError):
            augmented_fit(m, [1.0], 1)

    def test_bad_label_rejected(self):
        m = fit(LabeledSet([[0.0]], [1]), KernelConfig(1.0))
        with pytest.raises(ValueError):
            augmented_fit(m, [1.0], 0)

    def test_dimension_mismatch_rejected(self):
        m = fit(LabeledSet([[0.0, 0.0]], [1]), KernelConfig(1.0))
        with pytest.raises(ValueError):
            augmented_fit(m, [1.0], 1)
