"""Average ranks with ties and the Friedman test over per-instance scores."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata


def average_ranks(values: Sequence[float], higher_is_better: bool = True) -> np.ndarray:
    """Rank scores so that 1 is best; tied scores share the mean of their positions.

    Args:
        values: One score per algorithm.
        higher_is_better: Whether larger scores are better (hypervolume) or worse.

    Raises:
        ValueError: If fewer than two scores are supplied or any score is NaN.
    """
    scores = np.asarray(values, dtype=float)
    if scores.ndim != 1 or len(scores) < 2:
        raise ValueError("ranking needs at least 2 scores")
    if np.isnan(scores).any():
        raise ValueError("cannot rank NaN scores")
    return rankdata(-scores if higher_is_better else scores, method="average")


@dataclass(frozen=True)
class RankTable:
    algorithms: tuple[str, ...]
    instances: tuple[str, ...]
    ranks: np.ndarray  # shape (instances, algorithms)

    def __post_init__(self) -> None:
        ranks = np.asarray(self.ranks, dtype=float)
        if ranks.shape != (len(self.instances), len(self.algorithms)):
            raise ValueError(
                f"rank matrix shape {ranks.shape} does not match "
                f"{len(self.instances)} instances x {len(self.algorithms)} algorithms"
            )
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "ranks", ranks)

    @classmethod
    def from_scores(cls, algorithms, instances, scores, higher_is_better: bool = True) -> "RankTable":
        """Rank every row of an (instances x algorithms) score matrix."""
        matrix = np.asarray(scores, dtype=float)
        if matrix.ndim != 2 or matrix.shape != (len(instances), len(algorithms)):
            raise ValueError("score matrix shape does not match the labels")
        ranks = np.array([average_ranks(row, higher_is_better) for row in matrix]).reshape(matrix.shape)
        return cls(tuple(algorithms), tuple(instances), ranks)


@dataclass(frozen=True)
class FriedmanResult:
    algorithms: tuple[str, ...]
    mean_ranks: np.ndarray
    statistic: float
    degrees_of_freedom: int
    n_instances: int

    def ranking(self) -> dict[str, float]:
        return {name: float(r) for name, r in zip(self.algorithms, self.mean_ranks)}


def friedman(table: RankTable) -> FriedmanResult:
    """Mean ranks and the Friedman chi-squared statistic in its mean-rank form.

    ``chi2 = 12 N / (k (k + 1)) * sum_j (Rbar_j - (k + 1) / 2) ** 2``
    """
    n, k = table.ranks.shape
    if n < 2 or k < 2:
        raise ValueError(f"Friedman test needs >= 2 instances and >= 2 algorithms, got {n}x{k}")
    mean_ranks = table.ranks.mean(axis=0)
    centre = (k + 1) / 2.0
    statistic = 12.0 * n / (k * (k + 1)) * float(np.sum((mean_ranks - centre) ** 2))
    return FriedmanResult(table.algorithms, mean_ranks, statistic, k - 1, n)
