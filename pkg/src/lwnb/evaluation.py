"""Repeated stratified cross-validation and the corrected resampled t-test."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence, TextIO

import numpy as np
from scipy import stats

from .classifiers import ClassifierConfig
from .dataset import Dataset, stratified_folds

A_BETTER = "a_better"
B_BETTER = "b_better"
NO_DIFFERENCE = "no_difference"


def run_seed(seed: int, run: int) -> list[int]:
    """Seed material for the fold partition of run ``run``."""
    return [seed, run]


def _fold_accuracy(d: Dataset, cfg: ClassifierConfig, train_idx, test_idx) -> float:
    clf = cfg.build().fit(d.subset(train_idx))
    test = d.subset(test_idx)
    return float(np.mean(clf.predict(test.X) == test.y))


def _fold_jobs(d: Dataset, runs: int, folds: int, seed: int):
    for r in range(runs):
        for train_idx, test_idx in stratified_folds(d, folds, run_seed(seed, r)):
            yield train_idx, test_idx


def cross_validate(d: Dataset, cfg: ClassifierConfig, runs: int = 10, folds: int = 10, seed: int = 1,
                   workers: int = 1) -> np.ndarray:
    """Accuracy of every fold, in (run, fold) order.

    Partitions depend only on (d, folds, seed, run), so every classifier
    evaluated with the same arguments sees identical folds. Preprocessing is
    fitted inside each training fold by the classifier itself.
    """
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    jobs = list(_fold_jobs(d, runs, folds, seed))
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            accs = list(ex.map(_fold_accuracy, [d] * len(jobs), [cfg] * len(jobs),
                               [j[0] for j in jobs], [j[1] for j in jobs]))
    else:
        accs = [_fold_accuracy(d, cfg, tr, te) for tr, te in jobs]
    return np.array(accs)


@dataclass(frozen=True)
class TTestResult:
    t: float
    verdict: str
    degenerate: bool = False


def t_critical(alpha: float, df: int) -> float:
    return float(stats.t.ppf(1.0 - alpha / 2.0, df))


def corrected_resampled_ttest(acc_a: Sequence[float], acc_b: Sequence[float], train_fraction: float = 0.9,
                              alpha: float = 0.05) -> TTestResult:
    """Paired t-test over CV fold differences with the variance inflated by n_test/n_train.

    ``t = mean(d) / sqrt((1/J + rho) * var(d))`` with ``rho = (1 - f) / f``
    for training fraction ``f``; two-sided at level ``alpha`` on J - 1 df.
    Zero variance: no difference when the mean difference is zero, otherwise
    the side with the higher mean wins and the result is marked degenerate.
    """
    a = np.asarray(acc_a, dtype=float)
    b = np.asarray(acc_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("accuracy lists must be 1-D and of equal length")
    J = a.size
    if J < 2:
        raise ValueError("need at least two paired accuracies")
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    d = a - b
    mean = float(d.mean())
    var = float(d.var(ddof=1))
    if (d == d[0]).all():
        if d[0] == 0.0:
            return TTestResult(0.0, NO_DIFFERENCE)
        return TTestResult(math.copysign(math.inf, mean), A_BETTER if mean > 0 else B_BETTER, True)
    rho = (1.0 - train_fraction) / train_fraction
    t = mean / math.sqrt((1.0 / J + rho) * var)
    if abs(t) <= t_critical(alpha, J - 1):
        return TTestResult(t, NO_DIFFERENCE)
    return TTestResult(t, A_BETTER if t > 0 else B_BETTER)


@dataclass
class Arm:
    config: ClassifierConfig
    accuracies: np.ndarray
    vs_baseline: TTestResult | None = None

    @property
    def label(self) -> str:
        return self.config.label

    @property
    def mean(self) -> float:
        return float(self.accuracies.mean())

    @property
    def stdev(self) -> float:
        return float(self.accuracies.std(ddof=1)) if self.accuracies.size > 1 else 0.0

    @property
    def verdict(self) -> str:
        """``win``/``loss``/``draw`` against the baseline, ``-`` without one."""
        res = self.vs_baseline
        if res is None:
            return "-"
        if res.verdict == NO_DIFFERENCE:
            return "draw"
        mark = "win" if res.verdict == A_BETTER else "loss"
        return mark + "(zero-variance)" if res.degenerate else mark


@dataclass
class EvalReport:
    """Fold accuracies per arm, each optionally tested against a baseline arm."""

    dataset: str
    runs: int
    folds: int
    arms: list[Arm] = field(default_factory=list)
    baseline: Arm | None = None

    @property
    def train_fraction(self) -> float:
        return (self.folds - 1) / self.folds

    def pairwise(self, alpha: float = 0.05) -> dict[tuple[str, str], TTestResult]:
        """Corrected t-test for every pair of arms (baseline first, if present)."""
        arms = ([self.baseline] if self.baseline is not None else []) + self.arms
        return {
            (a.label, b.label): corrected_resampled_ttest(a.accuracies, b.accuracies, self.train_fraction, alpha)
            for a, b in combinations(arms, 2)
        }

    def rows(self) -> list[list[str]]:
        return [
            [self.dataset, a.label, "-" if a.config.k is None else str(a.config.k),
             f"{a.mean:.6f}", f"{a.stdev:.6f}", a.verdict]
            for a in self.arms
        ]

    def write_tsv(self, stream: TextIO) -> None:
        w = csv.writer(stream, delimiter="\t", lineterminator="\n")
        w.writerow(["dataset", "classifier", "k", "mean_acc", "stdev", "verdict_vs_baseline"])
        w.writerows(self.rows())


def evaluate(d: Dataset, configs: Sequence[ClassifierConfig], name: str = "data", runs: int = 10,
             folds: int = 10, seed: int = 1, baseline: ClassifierConfig | None = None,
             alpha: float = 0.05, workers: int = 1) -> EvalReport:
    """Cross-validate each config on shared partitions, testing each against ``baseline`` if given.

    Verdicts read from the config's side: ``a_better`` means it beat the baseline.
    """
    report = EvalReport(name, runs, folds)
    cache: dict[str, np.ndarray] = {}

    def accs(cfg):
        if cfg.label not in cache:
            cache[cfg.label] = cross_validate(d, cfg, runs, folds, seed, workers)
        return cache[cfg.label]

    if baseline is not None:
        report.baseline = Arm(baseline, accs(baseline))
    for cfg in configs:
        arm = Arm(cfg, accs(cfg))
        if report.baseline is not None:
            arm.vs_baseline = corrected_resampled_ttest(arm.accuracies, report.baseline.accuracies,
                                                        report.train_fraction, alpha)
        report.arms.append(arm)
    return report
