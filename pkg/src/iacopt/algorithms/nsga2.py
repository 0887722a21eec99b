"""Generational NSGA-II with constrained dominance."""

from __future__ import annotations

import numpy as np

from iacopt.algorithms._common import make_children
from iacopt.core import binary_tournament, crowding_distance_array, objective_arrays, sort_arrays


def survive(pop, size):
    """Rank-and-crowding truncation to ``size`` members.

    Returns the survivors with their front rank and crowding distance.
    """
    F, cv = objective_arrays(pop)
    chosen, ranks, crowd = [], [], []
    for rank, front in enumerate(sort_arrays(F, cv)):
        distance = crowding_distance_array(F[front])
        if len(chosen) + len(front) > size:
            order = np.argsort(-distance, kind="stable")[: size - len(chosen)]
            front = [front[i] for i in order]
            distance = distance[order]
        chosen.extend(front)
        ranks.extend([rank] * len(front))
        crowd.extend(distance.tolist())
        if len(chosen) >= size:
            break
    return [pop[i] for i in chosen], ranks, crowd


def evolve(problem, population, cfg, variation, rng, budget):
    size = cfg.population_size
    pop, ranks, crowd = survive(population, size)

    def better(i, j):
        return ranks[i] < ranks[j] or (ranks[i] == ranks[j] and crowd[i] > crowd[j])

    indices = range(size)
    while budget.remaining > 0:
        n_offspring = min(size, budget.remaining)
        offspring = []
        while len(offspring) < n_offspring:
            a = binary_tournament(indices, better, rng)
            b = binary_tournament(indices, better, rng)
            for child in make_children(pop[a], pop[b], problem, variation, rng):
                if len(offspring) < n_offspring:
                    offspring.append(budget.evaluate(child))
        pop, ranks, crowd = survive(pop + offspring, size)
    return pop
