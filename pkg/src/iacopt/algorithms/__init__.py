"""Solver pool: NSGA-II, NSGA-III, SPEA2, SMS-EMOA and MoCell on integer genotypes."""

from __future__ import annotations

import enum
import time
import warnings
from dataclasses import dataclass, field

from iacopt.algorithms import mocell, nsga2, nsga3, smsemoa, spea2
from iacopt.algorithms._common import Budget, final_front
from iacopt.algorithms.nsga3 import das_dennis_points, reference_division
from iacopt.algorithms.spea2 import spea2_fitness
from iacopt.core import Individual, VariationConfig, init_population, make_rng
from iacopt.problem import ProblemInstance

__all__ = [
    "AlgorithmId",
    "RunConfig",
    "RunResult",
    "das_dennis_points",
    "reference_division",
    "run",
    "select_algorithm",
    "spea2_fitness",
]


class AlgorithmId(str, enum.Enum):
    NSGA2 = "nsga2"
    NSGA3 = "nsga3"
    SPEA2 = "spea2"
    SMSEMOA = "smsemoa"
    MOCELL = "mocell"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    AlgorithmId.NSGA2: "NSGA-II",
    AlgorithmId.NSGA3: "NSGA-III",
    AlgorithmId.SPEA2: "SPEA2",
    AlgorithmId.SMSEMOA: "SMSEMOA",
    AlgorithmId.MOCELL: "MoCell",
}

_SOLVERS = {
    AlgorithmId.NSGA2: nsga2.evolve,
    AlgorithmId.NSGA3: nsga3.evolve,
    AlgorithmId.SPEA2: spea2.evolve,
    AlgorithmId.SMSEMOA: smsemoa.evolve,
    AlgorithmId.MOCELL: mocell.evolve,
}


def select_algorithm(n_objectives: int) -> AlgorithmId:
    """NSGA-II for two objectives, NSGA-III for three (and, with a warning, beyond)."""
    if n_objectives < 2:
        raise ValueError("at least two objectives are required")
    if n_objectives == 2:
        return AlgorithmId.NSGA2
    if n_objectives > 3:
        warnings.warn(
            f"no evidence for {n_objectives} objectives; falling back to NSGA-III",
            stacklevel=2,
        )
    return AlgorithmId.NSGA3


@dataclass(frozen=True)
class RunConfig:
    algorithm: AlgorithmId
    seed: int
    population_size: int = 50
    max_evaluations: int = 2500
    variation: VariationConfig | None = None  # None: defaults with mutation rate 1/L

    def __post_init__(self) -> None:
        object.__setattr__(self, "algorithm", AlgorithmId(self.algorithm))
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_evaluations < self.population_size:
            raise ValueError("max_evaluations must be >= population_size")
        if self.algorithm is AlgorithmId.MOCELL and self.population_size % mocell.GRID_ROWS:
            raise ValueError(f"MoCell needs a population size divisible by {mocell.GRID_ROWS}")


@dataclass
class RunResult:
    front: list[Individual]
    evaluations_used: int
    wall_time: float
    seed: int
    algorithm: AlgorithmId
    initial_front: list[Individual] = field(default_factory=list)


def run(problem: ProblemInstance, cfg: RunConfig) -> RunResult:
    """Run one seeded optimization and return the feasible nondominated set found."""
    started = time.perf_counter()
    variation = cfg.variation or VariationConfig.for_length(problem.n_slots)
    rng = make_rng(cfg.seed)
    budget = Budget(problem, cfg.max_evaluations)
    population = init_population(problem, cfg.population_size, rng)
    budget.used += len(population)
    survivors = _SOLVERS[cfg.algorithm](problem, population, cfg, variation, rng, budget)
    return RunResult(
        front=final_front(survivors),
        evaluations_used=budget.used,
        wall_time=time.perf_counter() - started,
        seed=cfg.seed,
        algorithm=cfg.algorithm,
        initial_front=final_front(population),
    )
