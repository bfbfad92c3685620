"""Sequential active-learning experiments: configs, runner, traces, summaries.

A run executes ``budget`` rounds of score -> select -> reveal -> refit on a
task's pool, recording per-step selections and the training error (sign
agreement of the current interpolant with the oracle over all task points,
labeled and unlabeled alike).  Everything is deterministic given the config:
the task sample, the tie-breaking stream, and the random baseline all derive
from ``seed`` through independent ``SeedSequence`` children, so replaying a
config reproduces the trace bit for bit.

Config JSON schema::

    {
      "task":  {"kind": "threshold", "n": 1024, "k": 5}
             | {"kind": "clusters", "centers": [[...], ...], "radii": [...],
                "labels": [...], "counts": [...], "p": 2}
             | {"kind": "csv", "path": "data.csv", "holdout": 0.2},
      "model": {"kind": "kernel", "h": 0.1, "p": 1} | {"kind": "spline"},
      "score": "function" | "data" | "random",
      "budget": 70,
      "seed": 3,
      "init": "auto" | "none" | "extremes",      # optional, default "auto"
      "stop_at_zero": false                        # optional
    }

``init: "extremes"`` labels the leftmost and rightmost pool points in the
first rounds (counted against the budget) — the natural bootstrap for 1-D
bisection, and mandatory for the spline model, whose scores are defined only
inside the labeled hull.  ``"auto"`` resolves to extremes for 1-D tasks and
to none otherwise; cluster guarantees need the empty start.

Outputs: ``trace.csv`` with columns ``step,index,t_u,true_label,score,
train_error`` and ``summary.json`` with ``queries_to_zero``, ``final_error``,
and per-cluster counts when the task is a cluster layout.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import scoring, spline
from .exceptions import IngestionError
from .kernel import KernelConfig, KernelInterpolator, augmented_fit
from .scoring import ScoreKind, UnlabeledPool
from .synthetic import ClusterSpec, gen_clusters, gen_threshold_task

SCORE_CHOICES = ("function", "data", "random")
INIT_CHOICES = ("auto", "none", "extremes")


@dataclass(frozen=True)
class ModelConfig:
    kind: str  # "kernel" | "spline"
    h: float = 0.1
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("kernel", "spline"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.h <= 0:
            raise ValueError("h must be positive")
        if self.p < 1:
            raise ValueError("p must be at least 1")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; see the module docstring for the JSON form."""

    task: dict
    model: ModelConfig
    score: str
    budget: int
    seed: int
    init: str = "auto"
    stop_at_zero: bool = False

    def __post_init__(self):
        if self.score not in SCORE_CHOICES:
            raise ValueError(f"score must be one of {SCORE_CHOICES}, got {self.score!r}")
        if self.init not in INIT_CHOICES:
            raise ValueError(f"init must be one of {INIT_CHOICES}, got {self.init!r}")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if not isinstance(self.seed, int):
            raise ValueError("seed is mandatory and must be an integer")
        kind = self.task.get("kind")
        if kind not in ("threshold", "clusters", "csv"):
            raise ValueError(f"unknown task kind {kind!r}")
        if self.model.kind == "spline" and self.init == "none":
            raise ValueError("the spline model requires extremes initialization")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        model_raw = dict(raw.pop("model"))
        kind = model_raw.pop("kind")
        model = ModelConfig(kind, **{k: model_raw[k] for k in ("h", "p") if k in model_raw})
        known = {"task", "score", "budget", "seed", "init", "stop_at_zero"}
        extras = set(raw) - known
        if extras:
            raise ValueError(f"unknown config keys: {sorted(extras)}")
        return cls(model=model, **raw)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return ExperimentConfig(self.task, self.model, self.score, self.budget,
                                int(seed), self.init, self.stop_at_zero)


@dataclass
class StepRecord:
    step: int
    index: int
    estimated_label: int
    true_label: int
    score: float
    train_error: float


@dataclass
class RunRecord:
    """Everything observed during one run."""

    config: ExperimentConfig
    task_kind: str
    steps: list[StepRecord] = field(default_factory=list)
    queries_to_zero: int | None = None
    final_error: float = float("nan")
    per_cluster_counts: list[int] | None = None
    cluster_state_ok: list[bool] | None = None
    test_errors: list[float] | None = None

    @property
    def train_errors(self) -> list[float]:
        return [s.train_error for s in self.steps]

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "index", "t_u", "true_label", "score",
                             "train_error"])
            for s in self.steps:
                writer.writerow([s.step, s.index, s.estimated_label, s.true_label,
                                 repr(s.score), repr(s.train_error)])

    def summary_dict(self) -> dict:
        out = {
            "queries_to_zero": self.queries_to_zero,
            "final_error": self.final_error,
        }
        if self.per_cluster_counts is not None:
            out["per_cluster_counts"] = self.per_cluster_counts
            ok = self.cluster_state_ok or []
            out["first_cluster_repeat_step"] = next(
                (i + 1 for i, good in enumerate(ok) if not good), None)
        if self.test_errors is not None:
            out["final_test_error"] = self.test_errors[-1]
        return out

    def write_summary(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary_dict(), fh, indent=2)
            fh.write("\n")


def load_csv_dataset(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``f0..f{d-1},label`` CSV; labels must be +-1, no missing fields."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError("empty file", row=0) from None
        header = [h.strip() for h in header]
        d = len(header) - 1
        if d < 1 or header[-1] != "label" or header[:-1] != [f"f{i}" for i in range(d)]:
            raise IngestionError(
                f"header must be f0..f{{d-1}},label, got {header}", row=0)
        points, labels = [], []
        for row_num, row in enumerate(reader, start=2):
            if len(row) != d + 1:
                raise IngestionError(
                    f"expected {d + 1} fields, got {len(row)}", row=row_num)
            try:
                feats = [float(v) for v in row[:-1]]
                label = float(row[-1])
            except ValueError:
                raise IngestionError(f"non-numeric value in {row}", row=row_num) from None
            if not all(np.isfinite(feats)) or label not in (-1.0, 1.0):
                raise IngestionError(
                    f"invalid feature or label in {row}", row=row_num)
            points.append(feats)
            labels.append(int(label))
    if not points:
        raise IngestionError("no data rows", row=1)
    return np.asarray(points), np.asarray(labels)


def write_dataset_csv(path, points: np.ndarray, labels: np.ndarray) -> None:
    """Write points and +-1 labels in the ``f0..f{d-1},label`` schema."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(points.shape[1])] + ["label"])
        for x, y in zip(points, labels):
            writer.writerow([repr(float(v)) for v in x] + [int(y)])


class _KernelLearner:
    """Kernel model state shared by the run loop."""

    def __init__(self, config: ModelConfig, dim: int):
        self.model = KernelInterpolator.empty(
            KernelConfig(bandwidth=config.h, exponent=config.p), dim=dim)

    def add(self, point, label) -> None:
        self.model = augmented_fit(self.model, point, int(label))

    def predict(self, points) -> np.ndarray:
        return self.model.predict(points)

    def scores(self, pool: UnlabeledPool, kind: ScoreKind):
        return scoring.score_pool(self.model, pool, kind)


class _SplineLearner:
    def __init__(self):
        self.positions: list[float] = []
        self.labels: list[int] = []
        self.model: spline.SplineInterpolator | None = None

    def add(self, point, label) -> None:
        self.positions.append(float(np.asarray(point).ravel()[0]))
        self.labels.append(int(label))
        self.model = spline.fit_spline(self.positions, self.labels)

    def predict(self, points) -> np.ndarray:
        return self.model.predict(np.asarray(points).ravel())

    def scores(self, pool: UnlabeledPool, kind: ScoreKind):
        us = pool.points.ravel()
        density = spline.Empirical1D(us) if kind is ScoreKind.DATA_NORM else None
        return spline.spline_score_pool(self.model, us, kind, density)


def _build_task(cfg: ExperimentConfig, task_seed):
    """Materialize (points, oracle_labels, cluster_spec_or_None, holdout_mask)."""
    task = cfg.task
    kind = task["kind"]
    if kind == "threshold":
        _, pool = gen_threshold_task(int(task["n"]), int(task["k"]), task_seed)
        return pool.points, pool.hidden_labels, None, None
    if kind == "clusters":
        spec = ClusterSpec(task["centers"], task["radii"], task["labels"],
                           task["counts"], task.get("p", 2.0))
        pool = gen_clusters(spec, task_seed)
        return pool.points, pool.hidden_labels, spec, None
    points, labels = load_csv_dataset(task["path"])
    holdout = float(task.get("holdout", 0.0))
    if not 0.0 <= holdout < 1.0:
        raise ValueError(f"holdout must be in [0, 1), got {holdout}")
    mask = None
    if holdout > 0.0:
        rng = np.random.default_rng(task_seed)
        n_test = int(round(holdout * len(points)))
        mask = np.zeros(len(points), dtype=bool)
        mask[rng.choice(len(points), size=n_test, replace=False)] = True
    return points, labels, None, mask


def run_experiment(cfg: ExperimentConfig) -> RunRecord:
    """Execute one configured run; see the module docstring for semantics."""
    root = np.random.SeedSequence(cfg.seed)
    task_ss, select_ss = root.spawn(2)
    points, oracle, cluster_spec, test_mask = _build_task(cfg, task_ss)
    n, dim = points.shape

    if test_mask is not None:
        test_points, test_labels = points[test_mask], oracle[test_mask]
        points, oracle = points[~test_mask], oracle[~test_mask]
        n = len(points)
    else:
        test_points = None

    if cfg.budget > n:
        raise ValueError(f"budget {cfg.budget} exceeds pool size {n}")

    init = cfg.init
    if init == "auto":
        init = "extremes" if dim == 1 else "none"
    if cfg.model.kind == "spline":
        if dim != 1:
            raise ValueError("the spline model is 1-D only")
        init = "extremes"
    if init == "extremes" and dim != 1:
        raise ValueError("extremes initialization requires a 1-D task")

    learner = (_SplineLearner() if cfg.model.kind == "spline"
               else _KernelLearner(cfg.model, dim))
    rng = np.random.default_rng(select_ss)
    kind = ScoreKind.FUNCTION_NORM if cfg.score == "function" else ScoreKind.DATA_NORM

    record = RunRecord(config=cfg, task_kind=cfg.task["kind"])
    if cluster_spec is not None:
        ball_of = cluster_spec.locate(points)
        record.per_cluster_counts = [0] * cluster_spec.n_balls
        record.cluster_state_ok = []
    if test_points is not None:
        record.test_errors = []

    unlabeled = np.ones(n, dtype=bool)
    forced = []
    if init == "extremes":
        x = points[:, 0]
        forced = [int(np.argmin(x)), int(np.argmax(x))]
        forced = list(dict.fromkeys(forced))[:cfg.budget]

    for step in range(1, cfg.budget + 1):
        pool_idx = np.flatnonzero(unlabeled)
        if len(pool_idx) == 0:
            break
        if forced:
            idx = forced.pop(0)
            est = _estimate(learner, points[idx])
            score_val = float("nan")
        elif cfg.score == "random":
            idx = int(rng.choice(pool_idx))
            est = _estimate(learner, points[idx])
            score_val = float("nan")
        else:
            pool = UnlabeledPool(points[pool_idx])
            if isinstance(learner, _KernelLearner):
                chosen = scoring.select_next(learner.model, pool, kind, rng)
            else:
                chosen = spline.spline_select_next(learner.model, pool, kind, rng)
            idx = int(pool_idx[chosen.index])
            est = chosen.label
            score_val = chosen.score

        truth = int(oracle[idx])
        learner.add(points[idx], truth)
        unlabeled[idx] = False

        pred = np.where(learner.predict(points) >= 0, 1, -1)
        err = float(np.mean(pred != oracle))
        record.steps.append(StepRecord(step, idx, est, truth, score_val, err))
        if record.queries_to_zero is None and err == 0.0:
            record.queries_to_zero = step
        if cluster_spec is not None:
            ball = int(ball_of[idx])
            if ball >= 0:
                record.per_cluster_counts[ball] += 1
            counts = np.asarray(record.per_cluster_counts)
            record.cluster_state_ok.append(bool(np.all(counts <= 1)))
        if test_points is not None:
            tpred = np.where(learner.predict(test_points) >= 0, 1, -1)
            record.test_errors.append(float(np.mean(tpred != test_labels)))
        if cfg.stop_at_zero and err == 0.0:
            break

    record.final_error = record.steps[-1].train_error if record.steps else float("nan")
    return record


def _estimate(learner, point) -> int:
    if isinstance(learner, _SplineLearner) and learner.model is None:
        return 1
    return 1 if float(learner.predict(np.atleast_2d(point))[0]) >= 0 else -1


@dataclass
class Summary:
    """Aggregate of several runs of the same task family."""

    task_kind: str
    n_runs: int
    steps: list[int]
    median_error: list[float]
    q25_error: list[float]
    q75_error: list[float]
    queries_to_zero: list[int | None]
    cluster_count_std: list[float] | None = None

    @property
    def median_queries_to_zero(self) -> float:
        reached = [q for q in self.queries_to_zero if q is not None]
        return float(np.median(reached)) if reached else float("nan")

    def to_dict(self) -> dict:
        out = {
            "task_kind": self.task_kind,
            "n_runs": self.n_runs,
            "steps": self.steps,
            "median_error": self.median_error,
            "q25_error": self.q25_error,
            "q75_error": self.q75_error,
            "queries_to_zero": self.queries_to_zero,
            "median_queries_to_zero": self.median_queries_to_zero,
            "unreached_runs": sum(q is None for q in self.queries_to_zero),
        }
        if self.cluster_count_std is not None:
            out["cluster_count_std"] = self.cluster_count_std
        return out

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def summarize(records: list[RunRecord]) -> Summary:
    """Per-step error quantiles and queries-to-zero across runs.

    All records must come from the same task family.  Error curves of unequal
    length (early stops) are extended by repeating their last value.
    """
    if not records:
        raise ValueError("no records to summarize")
    kinds = {r.task_kind for r in records}
    if len(kinds) != 1:
        raise ValueError(f"cannot mix task families in one summary: {sorted(kinds)}")
    longest = max(len(r.steps) for r in records)
    curves = np.array([
        r.train_errors + [r.train_errors[-1]] * (longest - len(r.steps))
        for r in records
    ])
    std = None
    if all(r.per_cluster_counts is not None for r in records):
        std = [float(np.std(r.per_cluster_counts)) for r in records]
    return Summary(
        task_kind=kinds.pop(),
        n_runs=len(records),
        steps=list(range(1, longest + 1)),
        median_error=np.median(curves, axis=0).tolist(),
        q25_error=np.quantile(curves, 0.25, axis=0).tolist(),
        q75_error=np.quantile(curves, 0.75, axis=0).tolist(),
        queries_to_zero=[r.queries_to_zero for r in records],
        cluster_count_std=std,
    )
