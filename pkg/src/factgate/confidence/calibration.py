"""Calibration measurement and ensemble-weight learning.

ECE uses equal-width bins on [0,1] with a right-closed last bin. Weight
learning is an exhaustive search over the simplex grid (ECE is piecewise
constant in the weights, so grid search is exact at this scale); ties break
by higher accuracy at the decision threshold, then by lexicographically
smallest (alpha, beta, gamma). Hot loops run in the compiled kernel when
available (see backend.py).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from factgate.confidence.backend import get_kernels

DEFAULT_BINS = 15
DEFAULT_GRID_STEP = 0.05
DEFAULT_TAU = 0.7


class EmptyInput(ValueError):
    pass


@dataclass
class CalibrationReport:
    bin_edges: list[float]
    counts: list[int]
    mean_confidence: list[float]
    empirical_accuracy: list[float]
    ece: float
    learned_weights: tuple[float, float, float] | None = None

    @property
    def reliability_points(self) -> list[tuple[float, float]]:
        """(bin midpoint, empirical accuracy) for non-empty bins."""
        mids = [(a + b) / 2.0 for a, b in zip(self.bin_edges, self.bin_edges[1:])]
        return [
            (mid, acc)
            for mid, acc, count in zip(mids, self.empirical_accuracy, self.counts)
            if count > 0
        ]

    def to_csv(self) -> str:
        """Reliability diagram rows: bin_mid,mean_conf,accuracy,count."""
        lines = ["bin_mid,mean_conf,accuracy,count"]
        mids = [(a + b) / 2.0 for a, b in zip(self.bin_edges, self.bin_edges[1:])]
        for mid, mc, acc, count in zip(mids, self.mean_confidence, self.empirical_accuracy, self.counts):
            lines.append(f"{mid:.6g},{mc:.6g},{acc:.6g},{count}")
        return "\n".join(lines) + "\n"


def expected_calibration_error(
    predictions: Sequence[tuple[float, bool]],
    bins: int = DEFAULT_BINS,
    backend: str | None = None,
) -> CalibrationReport:
    """Binned gap between stated confidence and empirical accuracy."""
    if not predictions:
        raise EmptyInput("no predictions")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    conf = np.asarray([p[0] for p in predictions], dtype=np.float64)
    if conf.min() < 0.0 or conf.max() > 1.0:
        raise ValueError("confidences must lie in [0,1]")
    correct = np.asarray([1.0 if p[1] else 0.0 for p in predictions], dtype=np.float64)

    counts, conf_sum, acc_sum = get_kernels(backend).bin_stats(conf, correct, bins)
    n = len(predictions)
    mean_conf = [cs / c if c else 0.0 for cs, c in zip(conf_sum.tolist(), counts.tolist())]
    accuracy = [asum / c if c else 0.0 for asum, c in zip(acc_sum.tolist(), counts.tolist())]
    ece = sum(abs(cs - asum) for cs, asum in zip(conf_sum.tolist(), acc_sum.tolist())) / n
    return CalibrationReport(
        bin_edges=[i / bins for i in range(bins + 1)],
        counts=counts.tolist(),
        mean_confidence=mean_conf,
        empirical_accuracy=accuracy,
        ece=ece,
    )


def simplex_grid(grid_step: float) -> list[tuple[float, float, float]]:
    """All (alpha, beta, gamma) with components multiples of grid_step
    summing to 1, in ascending lexicographic order."""
    m = round(1.0 / grid_step)
    if m < 1 or abs(m * grid_step - 1.0) > 1e-9:
        raise ValueError(f"grid_step must divide 1: {grid_step}")
    points = []
    for i in range(m + 1):
        for j in range(m - i + 1):
            points.append((i / m, j / m, (m - i - j) / m))
    return points


def learn_weights(
    validation_set: Sequence[tuple[tuple[float, float, float], bool]],
    grid_step: float = DEFAULT_GRID_STEP,
    bins: int = DEFAULT_BINS,
    tau: float = DEFAULT_TAU,
    backend: str | None = None,
) -> tuple[float, float, float]:
    """Exhaustive simplex grid search minimizing ECE of the combined score.

    Deterministic: ties prefer higher accuracy at `tau`, then the smallest
    (alpha, beta, gamma) lexicographically.
    """
    if not validation_set:
        raise EmptyInput("empty validation set")
    m = round(1.0 / grid_step)
    if m < 1 or abs(m * grid_step - 1.0) > 1e-9:
        raise ValueError(f"grid_step must divide 1: {grid_step}")

    intrinsic = np.asarray([c[0][0] for c in validation_set], dtype=np.float64)
    external = np.asarray([c[0][1] for c in validation_set], dtype=np.float64)
    coherence = np.asarray([c[0][2] for c in validation_set], dtype=np.float64)
    for name, arr in (("intrinsic", intrinsic), ("external", external), ("coherence", coherence)):
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError(f"{name} components must lie in [0,1]")
    correct = np.asarray([1.0 if c[1] else 0.0 for c in validation_set], dtype=np.float64)

    ece, accuracy = get_kernels(backend).grid_scores(
        intrinsic, external, coherence, correct, m, bins, tau
    )
    points = simplex_grid(grid_step)
    best = min(range(len(points)), key=lambda p: (ece[p], -accuracy[p], points[p]))
    return points[best]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def fit_temperature(
    predictions: Sequence[tuple[float, bool]],
    t_range: tuple[float, float] = (0.05, 20.0),
    iterations: int = 80,
) -> float:
    """Post-hoc temperature for combined confidences, via golden-section
    search minimizing negative log-likelihood of logit(p)/T."""
    if not predictions:
        raise EmptyInput("no predictions")
    eps = 1e-6
    p = np.clip(np.asarray([c for c, _ in predictions], dtype=np.float64), eps, 1.0 - eps)
    y = np.asarray([1.0 if ok else 0.0 for _, ok in predictions], dtype=np.float64)
    logits = np.log(p / (1.0 - p))

    def nll(temperature: float) -> float:
        scaled = np.clip(_sigmoid(logits / temperature), eps, 1.0 - eps)
        return float(-(y * np.log(scaled) + (1.0 - y) * np.log(1.0 - scaled)).mean())

    phi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = t_range
    a, b = hi - phi * (hi - lo), lo + phi * (hi - lo)
    fa, fb = nll(a), nll(b)
    for _ in range(iterations):
        if fa <= fb:
            hi, b, fb = b, a, fa
            a = hi - phi * (hi - lo)
            fa = nll(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + phi * (hi - lo)
            fb = nll(b)
    return (lo + hi) / 2.0


def apply_temperature(confidence: float, temperature: float) -> float:
    eps = 1e-6
    p = min(max(confidence, eps), 1.0 - eps)
    z = math.log(p / (1.0 - p)) / temperature
    return 1.0 / (1.0 + math.exp(-z))
