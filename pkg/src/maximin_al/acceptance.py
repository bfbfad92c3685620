"""End-to-end behavioral checks runnable from the CLI (``check --suite ...``).

Each check reproduces one headline guarantee of the selection scores at desk
scale and reports a structured pass/fail.  The same functions back the
acceptance test module, so the CLI and the test suite cannot drift apart.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import laplace1d, scoring, spline, synthetic
from .harness import (ExperimentConfig, ModelConfig, load_csv_dataset,
                      run_experiment, write_dataset_csv)
from .kernel import KernelConfig, KernelInterpolator, LabeledSet, fit
from .scoring import ScoreKind, UnlabeledPool


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _run(task, model, score, budget, seed, **kw) -> "object":
    cfg = ExperimentConfig(task=task, model=model, score=score, budget=budget,
                           seed=seed, **kw)
    return run_experiment(cfg)


def check_bisection_label_complexity(base_seed: int = 0) -> CheckResult:
    """Threshold task (N=1024, k=5): zero training error within k(ceil(log2 N)+4)
    queries for 10/10 seeds, kernel (h=0.1, p=1) and spline models, under 60 s."""
    n, k = 1024, 5
    bound = k * (math.ceil(math.log2(n)) + 4)
    task = {"kind": "threshold", "n": n, "k": k}
    t0 = time.perf_counter()
    results = {}
    for name, model in (("kernel", ModelConfig("kernel", h=0.1, p=1)),
                        ("spline", ModelConfig("spline"))):
        queries = []
        for seed in range(base_seed, base_seed + 10):
            rec = _run(task, model, "function", bound, seed, stop_at_zero=True)
            queries.append(rec.queries_to_zero)
        results[name] = queries
    elapsed = time.perf_counter() - t0
    ok = all(q is not None and q <= bound for qs in results.values() for q in qs)
    ok = ok and elapsed < 60.0
    detail = (f"bound={bound}, kernel={results['kernel']}, "
              f"spline={results['spline']}, elapsed={elapsed:.1f}s")
    return CheckResult("bisection label complexity", ok, detail)


def check_midpoint_closed_forms(base_seed: int = 0) -> CheckResult:
    """Isolated labeled pair: on a 10^4-point grid the function-norm argmax is
    within one step of the midpoint and the max matches the closed form to 1e-9."""
    worst_pos, worst_rel = 0.0, 0.0
    ok = True
    for gap, h in ((0.6, 0.1), (1.0, 0.1), (1.0, 0.25)):
        for same in (False, True):
            x1, x2 = 0.2, 0.2 + gap
            labels = (1, 1) if same else (1, -1)
            model = fit(LabeledSet([[x1], [x2]], labels), KernelConfig(h, 1.0))
            grid = np.linspace(x1, x2, 10_000 + 1)[1:-1]
            scores, _ = scoring.score_pool(model, UnlabeledPool(grid), ScoreKind.FUNCTION_NORM)
            step = gap / 10_000
            mid = 0.5 * (x1 + x2)
            argmax = grid[int(np.argmax(scores))]
            d = math.exp(-gap / h)
            closed = 4.0 / (1.0 + math.sqrt(d)) - 1.0 if same else 4.0 / (1.0 - d) - 1.0
            rel = abs(np.max(scores) - closed) / abs(closed)
            worst_pos = max(worst_pos, abs(argmax - mid) / step)
            worst_rel = max(worst_rel, rel)
            ok = ok and abs(argmax - mid) <= step + 1e-12 and rel <= 1e-9
    detail = f"worst |argmax-mid|={worst_pos:.2f} steps, worst rel err={worst_rel:.2e}"
    return CheckResult("isolated-pair midpoint closed forms", ok, detail)


def check_rank_one_identity(base_seed: int = 0) -> CheckResult:
    """200 random configs (L<=50, d<=5, p in {1,2}): the Schur-formula score
    equals the full-refit augmented norm to 1e-8 relative, labels matching."""
    rng = np.random.default_rng(base_seed)
    worst = 0.0
    label_mismatches = 0
    for _ in range(200):
        L = int(rng.integers(1, 51))
        d = int(rng.integers(1, 6))
        p = float(rng.choice([1.0, 2.0]))
        h = float(rng.uniform(0.3, 2.0))
        pts = rng.uniform(0, 1, size=(L + 1, d))
        while len(np.unique(pts, axis=0)) != L + 1:  # pragma: no cover
            pts = rng.uniform(0, 1, size=(L + 1, d))
        labels = rng.choice([-1, 1], size=L)
        base = LabeledSet(pts[:L], labels)
        model = fit(base, KernelConfig(h, p))
        u = pts[L]
        cand = scoring.score_function_norm(model, u)
        norms = {t: fit(base.append(u, t), model.config).norm_sq for t in (1, -1)}
        best_t = min(norms, key=norms.get)
        rel = abs(cand.score - norms[best_t]) / abs(norms[best_t])
        worst = max(worst, rel)
        if not math.isclose(norms[1], norms[-1], rel_tol=1e-9):
            label_mismatches += cand.label != best_t
    ok = worst <= 1e-8 and label_mismatches == 0
    detail = f"worst rel err={worst:.2e}, label mismatches={label_mismatches}"
    return CheckResult("rank-one augmentation identity", ok, detail)


def check_tridiagonal_closed_forms(base_seed: int = 0) -> CheckResult:
    """100 sorted-1D trials (n<=20): tridiagonal inverse, closed-form norm, and
    closed-form coefficients agree with dense linear algebra to 1e-9
    (per-entry mixed tolerance, |delta| <= 1e-9 * (1 + |oracle|))."""
    rng = np.random.default_rng(base_seed)
    tol = 1e-9
    worst = 0.0  # worst |delta| / (1 + |oracle|); pass needs <= tol

    def rel(got, oracle):
        got, oracle = np.asarray(got), np.asarray(oracle)
        return float(np.max(np.abs(got - oracle) / (1.0 + np.abs(oracle))))

    for _ in range(100):
        n = int(rng.integers(1, 21))
        pos = np.sort(rng.uniform(0, 1, size=n))
        while n > 1 and np.min(np.diff(pos)) < 1e-4:  # keep K honestly invertible
            pos = np.sort(rng.uniform(0, 1, size=n))
        labels = rng.choice([-1, 1], size=n)
        h = float(rng.uniform(0.05, 1.0))
        s = laplace1d.SortedLabeled1D(pos, labels, h)
        K = np.exp(-np.abs(pos[:, None] - pos[None, :]) / h)
        K_inv = np.linalg.inv(K)
        y = labels.astype(float)
        worst = max(worst, rel(laplace1d.tridiagonal_inverse(s).to_dense(), K_inv))
        worst = max(worst, rel(laplace1d.norm_closed_form(s), y @ K_inv @ y))
        worst = max(worst, rel(laplace1d.interpolant_coefficients(s), K_inv @ y))
    return CheckResult("sorted-1D closed forms vs dense",
                       worst <= tol, f"worst scaled err={worst:.2e}")


def first_point_spec(h: float = 0.5) -> synthetic.ClusterSpec:
    """Five 2-D balls: r1 = h/2, others 0.6*r1, separation 1.2x the guarantee bound."""
    r1 = h / 2
    r2 = 0.6 * r1
    M, dim = 5, 2
    bound = 0.5 * h * (np.log(M) - np.log1p(-(r2 / r1) ** dim))
    D = 1.2 * bound
    side = D + 2 * r1
    R = side / (2 * np.sin(np.pi / M))
    angles = 2 * np.pi * np.arange(M) / M
    centers = R * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    counts = [250, 90, 90, 90, 90]  # proportional to ball volume (r^2)
    return synthetic.ClusterSpec(centers, [r1, r2, r2, r2, r2],
                                 [1, -1, 1, -1, 1], counts, p=2.0)


def check_first_point_largest_ball(base_seed: int = 0) -> CheckResult:
    """With no labels, the data-based score's first pick lands in the largest
    ball for 10/10 seeds (r1=h/2, r2=0.6 r1, d=2, M=5, D=1.2x bound)."""
    h = 0.5
    spec = first_point_spec(h)
    regime = synthetic.validate_theorem_regime(spec, h, "first_point")
    hits = []
    for seed in range(base_seed, base_seed + 10):
        pool = synthetic.gen_clusters(spec, seed)
        model = KernelInterpolator.empty(KernelConfig(h, 2.0), dim=2)
        chosen = scoring.select_next(model, pool, ScoreKind.DATA_NORM, seed)
        ball = int(spec.locate(pool.points[chosen.index][None, :])[0])
        hits.append(ball)
    ok = regime.ok and all(b == 0 for b in hits)
    return CheckResult("first pick in largest ball", ok,
                       f"regime ok={regime.ok}, balls={hits}")


def cluster_explore_spec(h: float = 0.1) -> synthetic.ClusterSpec:
    """Thirteen equal 2-D balls, r = h/4, separation 13 h ln(2M), mixed labels."""
    M = 13
    r = h / 4
    D = 13.0 * h * np.log(2 * M)
    spacing = D + 2 * r
    grid = [(i, j) for i in range(4) for j in range(4)][:M]
    centers = spacing * np.asarray(grid, dtype=float)
    labels = [1 if i % 2 == 0 else -1 for i in range(M)]
    return synthetic.ClusterSpec(centers, [r] * M, labels, [40] * M, p=2.0)


def check_cluster_exploration(base_seed: int = 0) -> CheckResult:
    """Data-based score: first 13 picks in 13 distinct balls for 10/10 seeds;
    function-norm score: at least one ball left unlabeled in a majority of seeds."""
    h = 0.1
    spec = cluster_explore_spec(h)
    regime = synthetic.validate_theorem_regime(spec, h, "cluster_explore")
    task = {"kind": "clusters", "centers": spec.centers.tolist(),
            "radii": spec.radii.tolist(), "labels": spec.labels.tolist(),
            "counts": spec.counts.tolist(), "p": 2.0}
    model = ModelConfig("kernel", h=h, p=2.0)
    data_distinct, fn_unlabeled = [], []
    for seed in range(base_seed, base_seed + 10):
        rec = _run(task, model, "data", spec.n_balls, seed)
        data_distinct.append(all(c <= 1 for c in rec.per_cluster_counts))
        rec = _run(task, model, "function", spec.n_balls, seed)
        fn_unlabeled.append(sum(c == 0 for c in rec.per_cluster_counts))
    data_ok = regime.ok and all(data_distinct)
    fn_ok = sum(u >= 1 for u in fn_unlabeled) > 5
    detail = (f"regime ok={regime.ok}, data distinct={sum(data_distinct)}/10, "
              f"function unlabeled counts={fn_unlabeled} (need >5 seeds with >=1)")
    return CheckResult("cluster exploration contrast", data_ok and fn_ok, detail)


def _random_spline_config(rng) -> spline.SplineInterpolator:
    n = int(rng.integers(2, 9))
    pos = np.sort(rng.uniform(0, 1, size=n))
    while np.min(np.diff(pos)) < 1e-3:
        pos = np.sort(rng.uniform(0, 1, size=n))
    return spline.fit_spline(pos, rng.choice([-1, 1], size=n))


def check_spline_properties(base_seed: int = 0) -> CheckResult:
    """All eight spline score properties on 500 random knot configurations:
    midpoint maximality, width-preference directions (narrower for the
    function score, wider for the data score), constancy/vanishing between
    equal labels, and cross-type dominance.  Zero violations allowed."""
    rng = np.random.default_rng(base_seed)
    tol = 1e-9
    violations = {name: 0 for name in
                  ("F-mid", "F-width", "F-const", "F-cross",
                   "D-mid", "D-width", "D-zero", "D-cross")}
    for _ in range(500):
        m = _random_spline_config(rng)
        dens = spline.Uniform1D(m.positions[0], m.positions[-1])
        opp, same = [], []
        for j in range(len(m) - 1):
            xl, xr = m.positions[j], m.positions[j + 1]
            grid = np.linspace(xl, xr, 21)[1:-1]
            grid = np.append(grid, 0.5 * (xl + xr))
            fs, _ = spline.spline_score_pool(m, grid, "function")
            ds, _ = spline.spline_score_pool(m, grid, "data", dens)
            entry = {"width": xr - xl, "f": fs, "d": ds,
                     "f_mid": fs[-1], "d_mid": ds[-1]}
            (same if m.values[j] == m.values[j + 1] else opp).append(entry)
        for e in opp:
            violations["F-mid"] += np.any(e["f"] > e["f_mid"] + tol)
            violations["D-mid"] += np.any(e["d"] > e["d_mid"] + tol)
        for a in opp:
            for b in opp:
                if a["width"] >= b["width"]:
                    violations["F-width"] += a["f_mid"] > b["f_mid"] + tol
                    violations["D-width"] += a["d_mid"] < b["d_mid"] - tol
        for e in same:
            violations["F-const"] += np.any(np.abs(e["f"] - m.weight_norm) > tol)
            violations["D-zero"] += np.any(np.abs(e["d"]) > 1e-12)
            for o in opp:
                violations["F-cross"] += np.any(e["f"][:, None] > o["f"][None, :] + tol)
                violations["D-cross"] += np.any(e["d"][:, None] > o["d"][None, :] + 1e-12)
    total = sum(int(v) for v in violations.values())
    detail = ", ".join(f"{k}={int(v)}" for k, v in violations.items())
    return CheckResult("spline score properties (8)", total == 0, detail)


def check_spline_data_norm_value(base_seed: int = 0) -> CheckResult:
    """Opposite pair at 0 and 1, uniform density: data score at 1/2 equals 1/3."""
    m = spline.fit_spline([0.0, 1.0], [1, -1])
    got = spline.spline_score_data_norm(m, 0.5, spline.Uniform1D(0.0, 1.0)).score
    err = abs(got - 1.0 / 3.0)
    return CheckResult("spline data score value 1/3", err <= 1e-6,
                       f"got {got:.9f}, |err|={err:.2e}")


def check_zero_crossing(base_seed: int = 0) -> CheckResult:
    """(+1, +1, -1) with separations >= 20 h^(1/p): the function-norm argmax on a
    grid between the opposite pair sits within one step of f's sign change."""
    rng = np.random.default_rng(base_seed)
    worst = 0.0
    ok = True
    for i in range(20):
        p = 1.0 if i % 2 == 0 else 2.0
        # The separation hypothesis fixes delta * h^(-1/p) = 20 for every h, so h
        # is free; pick it so the score scale near the crossing, exp(-g23/(2h)),
        # stays far above float64 ulp(score) and the grid argmax is well defined.
        h = float(rng.uniform(0.05, 0.3)) if p == 1.0 else float(rng.uniform(0.65, 1.0))
        delta = 20.0 * h ** (1.0 / p)
        g12 = delta * float(rng.uniform(1.0, 2.0))
        g23 = delta * float(rng.uniform(1.2, 2.0))
        x1 = float(rng.uniform(-1, 1))
        xs = np.array([x1, x1 + g12, x1 + g12 + g23])
        model = fit(LabeledSet(xs[:, None], [1, 1, -1]), KernelConfig(h, p))
        grid = np.linspace(xs[1] + delta / 2, xs[2] - delta / 2, 2001)
        step = grid[1] - grid[0]
        scores, _ = scoring.score_pool(model, UnlabeledPool(grid), ScoreKind.FUNCTION_NORM)
        f = model.predict(grid[:, None])
        flip = int(np.flatnonzero((f[:-1] >= 0) & (f[1:] < 0))[0])
        crossing = grid[flip] + step * f[flip] / (f[flip] - f[flip + 1])
        gap = abs(grid[int(np.argmax(scores))] - crossing)
        worst = max(worst, gap / step)
        ok = ok and gap <= step + 1e-12
    return CheckResult("score peak at the sign change", ok,
                       f"worst distance={worst:.2f} grid steps (20 geometries)")


def check_active_vs_random(base_seed: int = 0, tmp_dir=None) -> CheckResult:
    """Both active scores reach zero error in at most half the random baseline's
    median queries (20 seeds, k=5 task); plus a 200-row CSV round trip."""
    n, k = 1024, 5
    task = {"kind": "threshold", "n": n, "k": k}
    model = ModelConfig("kernel", h=0.1, p=1)
    medians = {}
    for score, budget in (("function", 2 * k * 14), ("data", 2 * k * 14),
                          ("random", n)):
        qs = []
        for seed in range(base_seed, base_seed + 20):
            rec = _run(task, model, score, budget, seed, stop_at_zero=True)
            qs.append(rec.queries_to_zero if rec.queries_to_zero is not None
                      else budget + 1)
        medians[score] = float(np.median(qs))
    halved = medians["random"] / 2.0
    ok = medians["function"] <= halved and medians["data"] <= halved

    # CSV round trip: generate -> ingest -> run -> trace length equals budget.
    _, pool = synthetic.gen_threshold_task(200, 3, base_seed)
    with tempfile.TemporaryDirectory(dir=tmp_dir) as td:
        csv_path = Path(td) / "round_trip.csv"
        write_dataset_csv(csv_path, pool.points, pool.hidden_labels)
        back_pts, back_labels = load_csv_dataset(csv_path)
        round_trip = (np.array_equal(back_pts, pool.points)
                      and np.array_equal(back_labels, pool.hidden_labels))
        rec = _run({"kind": "csv", "path": str(csv_path)}, model, "function",
                   25, base_seed)
        round_trip = round_trip and len(rec.steps) == 25
    ok = ok and round_trip
    detail = (f"medians: function={medians['function']}, data={medians['data']}, "
              f"random={medians['random']} (need <= {halved}); csv ok={round_trip}")
    return CheckResult("active halves the random baseline + csv round trip", ok, detail)


CRITERIA = (
    check_bisection_label_complexity,
    check_midpoint_closed_forms,
    check_rank_one_identity,
    check_tridiagonal_closed_forms,
    check_first_point_largest_ball,
    check_cluster_exploration,
    check_spline_properties,
    check_spline_data_norm_value,
    check_zero_crossing,
    check_active_vs_random,
)

SUITES = {
    "bisection": (check_bisection_label_complexity, check_active_vs_random),
    "clusters": (check_first_point_largest_ball, check_cluster_exploration),
    "splines": (check_spline_properties, check_spline_data_norm_value),
    "identities": (check_midpoint_closed_forms, check_rank_one_identity,
                   check_tridiagonal_closed_forms, check_zero_crossing),
}


def run_suite(name: str, base_seed: int = 0) -> list[CheckResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return [fn(base_seed) for fn in SUITES[name]]
