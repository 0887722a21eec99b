"""SPEA2: strength/raw fitness with k-th nearest neighbor density and archive truncation."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from iacopt.algorithms._common import make_children
from iacopt.core import Individual, binary_tournament, dominance_matrix, objective_arrays


def _distances(F: np.ndarray) -> np.ndarray:
    diff = F[:, None, :] - F[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def fitness_arrays(F: np.ndarray, cv: np.ndarray) -> np.ndarray:
    n = len(F)
    if n == 0:
        return np.empty(0)
    D = dominance_matrix(F, cv)
    strength = D.sum(axis=1)
    raw = strength @ D
    dist = _distances(F)
    np.fill_diagonal(dist, np.inf)
    k = int(math.isqrt(n))
    if n > 1:
        sigma = np.sort(dist, axis=1)[:, min(k, n - 1) - 1]
    else:
        sigma = np.full(1, np.inf)
    return raw + 1.0 / (sigma + 2.0)


def spea2_fitness(pop: Sequence[Individual]) -> np.ndarray:
    """``F = R + D``: raw fitness (sum of dominators' strengths) plus density.

    Lower is better; nondominated members have ``F < 1``.
    """
    return fitness_arrays(*objective_arrays(pop))


def truncate(F: np.ndarray, size: int) -> list[int]:
    """Indices kept after repeatedly dropping the most crowded member.

    Crowding compares each member's ascending list of distances to the others
    lexicographically; ties go to the lowest index.
    """
    keep = list(range(len(F)))
    dist = _distances(F)
    np.fill_diagonal(dist, np.inf)
    while len(keep) > size:
        sub = np.sort(dist[np.ix_(keep, keep)], axis=1)
        victim = int(np.lexsort(sub.T[::-1])[0])
        keep.pop(victim)
    return keep


def environmental_selection(pool: list[Individual], size: int) -> tuple[list[Individual], np.ndarray]:
    F, cv = objective_arrays(pool)
    fit = fitness_arrays(F, cv)
    nondominated = np.flatnonzero(fit < 1.0)
    if len(nondominated) > size:
        kept = nondominated[truncate(F[nondominated], size)]
    elif len(nondominated) < size:
        order = np.argsort(fit, kind="stable")
        kept = np.sort(order[:size])
    else:
        kept = nondominated
    archive = [pool[i] for i in kept]
    return archive, fit[kept]


def evolve(problem, population, cfg, variation, rng, budget):
    size = cfg.population_size
    pop = list(population)
    archive: list[Individual] = []
    while budget.remaining > 0:
        archive, archive_fit = environmental_selection(pop + archive, size)
        fit = archive_fit.tolist()

        def better(i, j):
            return fit[i] < fit[j]

        indices = range(len(archive))
        n_offspring = min(size, budget.remaining)
        offspring = []
        while len(offspring) < n_offspring:
            a = binary_tournament(indices, better, rng)
            b = binary_tournament(indices, better, rng)
            for child in make_children(archive[a], archive[b], problem, variation, rng):
                if len(offspring) < n_offspring:
                    offspring.append(budget.evaluate(child))
        pop = offspring
    return pop + archive
