"""Steady-state SMS-EMOA: one offspring per step, hypervolume-based removal."""

from __future__ import annotations

import numpy as np

from iacopt.algorithms._common import make_children
from iacopt.core import binary_tournament, constrained_dominates, objective_arrays, sort_arrays
from iacopt.metrics import hv_contributions


def removal_index(F: np.ndarray, cv: np.ndarray) -> int:
    """Position (in ``F``) of the member to discard from a population of size n+1."""
    worst = sort_arrays(F, cv)[-1]
    if len(worst) == 1:
        return worst[0]
    W = F[worst]
    if np.all(cv[worst] == 0.0):
        # duplicates inside a Pareto front are the only members with zero contribution
        _, first, counts = np.unique(W, axis=0, return_index=True, return_counts=True)
        if np.any(counts > 1):
            duplicated = np.ones(len(W), dtype=bool)
            duplicated[first[counts == 1]] = False
            return worst[int(np.flatnonzero(duplicated)[-1])]
    contributions = hv_contributions(W, W.max(axis=0) + 1.0)
    smallest = np.flatnonzero(contributions == contributions.min())
    return worst[int(smallest[-1])]


def evolve(problem, population, cfg, variation, rng, budget):
    pop = list(population)
    F, cv = objective_arrays(pop)
    while budget.remaining > 0:
        a = binary_tournament(pop, constrained_dominates, rng)
        b = binary_tournament(pop, constrained_dominates, rng)
        child = budget.evaluate(make_children(a, b, problem, variation, rng)[0])
        pop.append(child)
        F = np.vstack([F, child.evaluation.objectives_min])
        cv = np.append(cv, child.evaluation.violation)
        victim = removal_index(F, cv)
        del pop[victim]
        F = np.delete(F, victim, axis=0)
        cv = np.delete(cv, victim)
    return pop
