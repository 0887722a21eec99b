from __future__ import annotations

from typing import Sequence

from iacopt.core import (
    Individual,
    RandomSource,
    VariationConfig,
    objective_arrays,
    polynomial_mutation_integer,
    sbx_integer,
    sort_arrays,
)
from iacopt.problem import ProblemInstance, evaluate


class Budget:
    """Counts evaluations against the run's limit."""

    def __init__(self, problem: ProblemInstance, max_evaluations: int):
        self.problem = problem
        self.max_evaluations = max_evaluations
        self.used = 0

    @property
    def remaining(self) -> int:
        return self.max_evaluations - self.used

    def evaluate(self, genotype: tuple[int, ...]) -> Individual:
        if self.used >= self.max_evaluations:
            raise RuntimeError("evaluation budget exhausted")
        self.used += 1
        return Individual(genotype, evaluate(self.problem, genotype))


def make_children(
    first: Individual,
    second: Individual,
    problem: ProblemInstance,
    variation: VariationConfig,
    rng: RandomSource,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    upper = problem.upper
    c1, c2 = sbx_integer(first.genotype, second.genotype, upper, variation, rng)
    return (
        polynomial_mutation_integer(c1, upper, variation, rng),
        polynomial_mutation_integer(c2, upper, variation, rng),
    )


def final_front(candidates: Sequence[Individual]) -> list[Individual]:
    """Distinct-genotype nondominated set, restricted to feasible members when any exist."""
    seen = set()
    unique = []
    for ind in candidates:
        if ind.genotype not in seen:
            seen.add(ind.genotype)
            unique.append(ind)
    if any(ind.feasible for ind in unique):
        unique = [ind for ind in unique if ind.feasible]
    if not unique:
        return []
    first = sort_arrays(*objective_arrays(unique))[0]
    return [unique[i] for i in first]
