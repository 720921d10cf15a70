"""Threshold-free binary classification metrics and run-level summaries."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, UndefinedMetricError


def _check_scored(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 1 or labels.ndim != 1 or scores.shape != labels.shape:
        raise InvalidArgumentError("scores and labels must be 1-D and the same length")
    if scores.size == 0:
        raise InvalidArgumentError("empty score vector")
    if not np.all(np.isfinite(scores)):
        raise InvalidArgumentError("scores contain non-finite entries")
    if not np.all((labels == 0) | (labels == 1)):
        raise InvalidArgumentError("labels must be 0 or 1")
    return scores, labels.astype(np.int64)


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    # 1-based ranks, ties assigned the average rank of their group.
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.size, dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def roc_auc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative.

    Ties count one half (the Mann-Whitney U formulation).
    """
    scores, labels = _check_scored(scores, labels)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("ROC-AUC needs both classes present")
    ranks = _average_ranks(scores)
    u = ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def pr_auc(scores, labels) -> float:
    """Average precision: sum over descending score thresholds of
    (recall increment) x (precision at that threshold), equal scores grouped.
    """
    scores, labels = _check_scored(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise UndefinedMetricError("PR-AUC needs at least one positive")
    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    ap = 0.0
    tp = 0
    seen = 0
    i = 0
    n = scores.size
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        group_pos = int(sorted_labels[i : j + 1].sum())
        tp += group_pos
        seen += j - i + 1
        if group_pos:
            precision = tp / seen
            ap += (group_pos / n_pos) * precision
        i = j + 1
    return ap


def mean_stderr(values) -> tuple[float, float]:
    """Mean and standard error (sample sd / sqrt(n)); stderr is 0 for n=1."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise InvalidArgumentError("need at least one value")
    mean = float(values.mean())
    if values.size == 1:
        return mean, 0.0
    sd = float(values.std(ddof=1))
    return mean, sd / math.sqrt(values.size)


@dataclass
class MetricsReport:
    """Per-run ROC-AUC / PR-AUC values plus their mean +/- standard error."""

    roc_auc_runs: list = field(default_factory=list)
    pr_auc_runs: list = field(default_factory=list)

    @property
    def run_count(self) -> int:
        return len(self.roc_auc_runs)

    def add_run(self, roc: float, pr: float) -> None:
        self.roc_auc_runs.append(float(roc))
        self.pr_auc_runs.append(float(pr))

    def summary(self) -> dict:
        roc_mean, roc_se = mean_stderr(self.roc_auc_runs)
        pr_mean, pr_se = mean_stderr(self.pr_auc_runs)
        return {
            "runs": self.run_count,
            "roc_auc_mean": roc_mean,
            "roc_auc_stderr": roc_se,
            "pr_auc_mean": pr_mean,
            "pr_auc_stderr": pr_se,
        }
