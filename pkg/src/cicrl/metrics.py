"""Evaluation protocol, curve smoothing, and the average-drawdown stability metric."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

CURVE_HEADER = ["step", "score"]
SUMMARY_HEADER = ["seed", "final_score", "avg_drawdown", "promotions"]
LAMBDA_HEADER = ["round", "lambda", "score2"]


@dataclass
class LearningCurve:
    """(env_steps, mean_score) sequence on a fixed evaluation grid."""

    steps: np.ndarray
    scores: np.ndarray
    eval_episodes: int = 20
    eval_interval: int = 5000

    def __post_init__(self):
        self.steps = np.asarray(self.steps, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.steps.shape != self.scores.shape or self.steps.ndim != 1:
            raise ValueError("steps and scores must be 1-D arrays of equal length")
        if self.steps.size and np.any(np.diff(self.steps) <= 0):
            raise ValueError("curve steps must be strictly increasing")

    def __len__(self):
        return self.steps.size


@dataclass
class RunSummary:
    seed: int
    final_score: float
    average_drawdown: float
    promotion_count: int


@dataclass
class RunResult:
    """Everything a single training run produces."""

    label: str
    env_name: str
    seed: int
    curve: LearningCurve
    final_score: float
    final_params: object
    env_steps: int
    warmup_env_steps: int
    updates: int
    rounds: int
    lambda_trace: Optional[list] = None  # (round, lambda, actor2 score) tuples
    promotions: Optional[list] = None

    def summary(self) -> RunSummary:
        return RunSummary(
            seed=self.seed,
            final_score=self.final_score,
            average_drawdown=average_drawdown(self.curve),
            promotion_count=len(self.promotions) if self.promotions is not None else 0,
        )


def eval_policy(policy, env_factory, episodes: int, seed) -> float:
    """Mean undiscounted return of the deterministic policy over fresh episodes.

    No replay writes, no training side effects; `seed` fully determines the
    episode initial states.
    """
    env = env_factory()
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(episodes):
        state = env.reset(seed=int(rng.integers(0, 2**63 - 1)))
        while True:
            res = env.step(policy.act(state))
            total += res.reward
            state = res.next_state
            if res.terminated or res.truncated:
                break
    return total / episodes


def eval_grid_points(t_prev: int, t_now: int, interval: int) -> list[int]:
    """Evaluation-grid multiples crossed when the step count moves past t_prev."""
    first = (t_prev // interval) + 1
    last = t_now // interval
    return [k * interval for k in range(first, last + 1)]


def smooth_curve(curve: LearningCurve, window: int) -> LearningCurve:
    """Centered moving average truncated at the boundaries; window=1 is identity."""
    if window < 1:
        raise ValueError("window must be >= 1")
    left = (window - 1) // 2
    right = window // 2
    n = len(curve)
    out = np.empty(n)
    for i in range(n):
        lo = max(0, i - left)
        hi = min(n, i + right + 1)
        out[i] = curve.scores[lo:hi].mean()
    return LearningCurve(curve.steps.copy(), out, curve.eval_episodes, curve.eval_interval)


def average_drawdown(curve: LearningCurve) -> float:
    """Mean gap between the running maximum score and the current score."""
    if len(curve) == 0:
        raise ValueError("curve must contain at least one point")
    running_max = np.maximum.accumulate(curve.scores)
    return float(np.mean(running_max - curve.scores))


def aggregate_runs(curves: list[LearningCurve]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pointwise mean and population std across runs sharing one step grid."""
    if not curves:
        raise ValueError("need at least one curve")
    grid = curves[0].steps
    for c in curves[1:]:
        if not np.array_equal(c.steps, grid):
            raise ValueError("curves do not share a common step grid")
    stacked = np.stack([c.scores for c in curves])
    return grid.copy(), stacked.mean(axis=0), stacked.std(axis=0)


# -- CSV schemas ------------------------------------------------------------


def _check_header(path, got, want):
    if got != want:
        raise ValueError(f"{path}: expected header {','.join(want)!r}, found {','.join(got)!r}")


def write_curve_csv(path, curve: LearningCurve) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CURVE_HEADER)
        for s, v in zip(curve.steps, curve.scores):
            w.writerow([int(s), repr(float(v))])


def read_curve_csv(path, eval_episodes: int = 20, eval_interval: int = 5000) -> LearningCurve:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty curve file")
    _check_header(path, rows[0], CURVE_HEADER)
    steps = [int(r[0]) for r in rows[1:]]
    scores = [float(r[1]) for r in rows[1:]]
    return LearningCurve(np.array(steps), np.array(scores), eval_episodes, eval_interval)


def write_summary_csv(path, summaries: list[RunSummary]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for s in summaries:
            w.writerow([s.seed, repr(s.final_score), repr(s.average_drawdown), s.promotion_count])


def read_summary_csv(path) -> list[RunSummary]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty summary file")
    _check_header(path, rows[0], SUMMARY_HEADER)
    return [RunSummary(int(r[0]), float(r[1]), float(r[2]), int(r[3])) for r in rows[1:]]


def write_lambda_csv(path, trace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(LAMBDA_HEADER)
        for rnd, lam, score2 in trace:
            w.writerow([int(rnd), repr(float(lam)), repr(float(score2))])


def read_lambda_csv(path) -> list[tuple[int, float, float]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty lambda trace file")
    _check_header(path, rows[0], LAMBDA_HEADER)
    return [(int(r[0]), float(r[1]), float(r[2])) for r in rows[1:]]
