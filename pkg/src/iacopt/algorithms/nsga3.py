"""Generational NSGA-III: nondominated sorting plus reference-point niching."""

from __future__ import annotations

from math import comb

import numpy as np

from iacopt.algorithms._common import make_children
from iacopt.core import binary_tournament, constrained_dominates, objective_arrays, sort_arrays

EPSILON = 1e-10


def das_dennis_points(m: int, p: int) -> np.ndarray:
    """All weight vectors on the unit simplex with components in steps of ``1/p``.

    Rows are in lexicographic order; there are ``C(m + p - 1, p)`` of them.
    """
    if m < 2 or p < 1:
        raise ValueError("need m >= 2 objectives and p >= 1 divisions")

    def compositions(parts, total):
        if parts == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for tail in compositions(parts - 1, total - head):
                yield (head,) + tail

    return np.array(list(compositions(m, p)), dtype=float) / p


def reference_division(m: int, population_size: int) -> int:
    """Smallest division count whose lattice has at least ``population_size`` points."""
    p = 1
    while comb(m + p - 1, p) < population_size:
        p += 1
    return p


def normalize(F: np.ndarray, ideal: np.ndarray, first_front: list[int]) -> np.ndarray:
    translated = F - ideal
    m = F.shape[1]
    weights = np.full((m, m), 1e-6) + np.eye(m) * (1.0 - 1e-6)
    asf = np.max(translated[:, None, :] / weights[None, :, :], axis=2)
    extremes = translated[np.argmin(asf, axis=0)]
    intercepts = None
    try:
        b = np.linalg.solve(extremes, np.ones(m))
        with np.errstate(divide="ignore"):
            candidate = 1.0 / b
        if np.all(np.isfinite(candidate)) and np.all(candidate > EPSILON):
            intercepts = candidate
    except np.linalg.LinAlgError:
        pass
    if intercepts is None:
        intercepts = translated[first_front].max(axis=0)
    return translated / np.maximum(intercepts, EPSILON)


def associate(normalized: np.ndarray, refs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest reference line (perpendicular distance) for every row."""
    unit = refs / np.linalg.norm(refs, axis=1, keepdims=True)
    projection = normalized @ unit.T
    sq = np.sum(normalized**2, axis=1, keepdims=True) - projection**2
    distance = np.sqrt(np.maximum(sq, 0.0))
    nearest = np.argmin(distance, axis=1)
    return nearest, distance[np.arange(len(normalized)), nearest]


def survive(pop, size, refs, ideal, rng):
    F, cv = objective_arrays(pop)
    fronts = sort_arrays(F, cv)
    selected: list[int] = []
    for front in fronts:
        if len(selected) + len(front) > size:
            last = front
            break
        selected.extend(front)
        if len(selected) == size:
            return [pop[i] for i in selected]
    else:
        return [pop[i] for i in selected]

    members = selected + last
    # the first front always occupies the leading positions of members
    normalized = normalize(F[members], ideal, list(range(len(fronts[0]))))
    niche, distance = associate(normalized, refs)
    n_sel = len(selected)
    rho = np.bincount(niche[:n_sel], minlength=len(refs))
    pending = {k: [] for k in range(len(refs))}
    for k in range(n_sel, len(members)):
        pending[int(niche[k])].append(k)
    available = np.ones(len(refs), dtype=bool)
    chosen = []
    while len(chosen) < size - n_sel:
        open_refs = np.flatnonzero(available)
        counts = rho[open_refs]
        minima = open_refs[counts == counts.min()]
        j = int(minima[rng.integers(len(minima))]) if len(minima) > 1 else int(minima[0])
        candidates = pending[j]
        if not candidates:
            available[j] = False
            continue
        if rho[j] == 0:
            pick = min(range(len(candidates)), key=lambda c: distance[candidates[c]])
        else:
            pick = int(rng.integers(len(candidates)))
        chosen.append(members[candidates.pop(pick)])
        rho[j] += 1
    return [pop[i] for i in selected + chosen]


def evolve(problem, population, cfg, variation, rng, budget):
    size = cfg.population_size
    m = problem.n_objectives
    refs = das_dennis_points(m, reference_division(m, size))
    F, _ = objective_arrays(population)
    ideal = F.min(axis=0)
    pop = list(population)
    while budget.remaining > 0:
        n_offspring = min(size, budget.remaining)
        offspring = []
        while len(offspring) < n_offspring:
            a = binary_tournament(pop, constrained_dominates, rng)
            b = binary_tournament(pop, constrained_dominates, rng)
            for child in make_children(a, b, problem, variation, rng):
                if len(offspring) < n_offspring:
                    offspring.append(budget.evaluate(child))
        ideal = np.minimum(ideal, objective_arrays(offspring)[0].min(axis=0))
        pop = survive(pop + offspring, size, refs, ideal, rng)
    return pop
