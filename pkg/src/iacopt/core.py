"""Evolutionary building blocks shared by every solver.

Objectives are always compared in minimization space. Dominance is Deb's
constrained dominance: feasible beats infeasible, two infeasible solutions
compare by total violation, two feasible ones by Pareto dominance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

from iacopt.problem import Evaluation, ProblemInstance, evaluate

RandomSource = np.random.Generator
T = TypeVar("T")


def make_rng(seed: int) -> RandomSource:
    """PCG64 stream; identical seeds give identical draws on every platform."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True, slots=True)
class Individual:
    genotype: tuple[int, ...]
    evaluation: Evaluation

    @property
    def objectives(self) -> tuple[float, ...]:
        return self.evaluation.objectives_min

    @property
    def violation(self) -> float:
        return self.evaluation.violation

    @property
    def feasible(self) -> bool:
        return self.evaluation.violation == 0.0


@dataclass(frozen=True)
class VariationConfig:
    crossover_probability: float = 0.9
    crossover_distribution_index: float = 20.0
    mutation_probability: float = 0.2
    mutation_distribution_index: float = 20.0

    def __post_init__(self) -> None:
        for name in ("crossover_probability", "mutation_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        for name in ("crossover_distribution_index", "mutation_distribution_index"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @classmethod
    def for_length(cls, length: int, **overrides) -> "VariationConfig":
        """Defaults with mutation probability 1/L for genotypes of ``length`` genes."""
        overrides.setdefault("mutation_probability", 1.0 / max(length, 1))
        return cls(**overrides)


# --------------------------------------------------------------------------- dominance


def pareto_dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    strictly = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strictly = True
    return strictly


def constrained_dominates(a: Individual, b: Individual) -> bool:
    if len(a.objectives) != len(b.objectives):
        raise ValueError("individuals have different objective counts")
    if a.feasible != b.feasible:
        return a.feasible
    if not a.feasible:
        return a.violation < b.violation
    return pareto_dominates(a.objectives, b.objectives)


def objective_arrays(pop: Sequence[Individual]) -> tuple[np.ndarray, np.ndarray]:
    """Stack minimization objectives (n x m) and violations (n,)."""
    if not pop:
        return np.empty((0, 0)), np.empty(0)
    F = np.array([ind.evaluation.objectives_min for ind in pop], dtype=float)
    cv = np.array([ind.evaluation.violation for ind in pop], dtype=float)
    return F, cv


def dominance_matrix(F: np.ndarray, cv: np.ndarray | None = None) -> np.ndarray:
    """``D[i, j]`` is True when row ``i`` constrained-dominates row ``j``."""
    columns = F.T
    le = columns[0][:, None] <= columns[0][None, :]
    lt = columns[0][:, None] < columns[0][None, :]
    for col in columns[1:]:
        le &= col[:, None] <= col[None, :]
        lt |= col[:, None] < col[None, :]
    D = le & lt
    if cv is None or not cv.any():
        return D
    feas = cv == 0.0
    both_feasible = feas[:, None] & feas[None, :]
    both_infeasible = ~feas[:, None] & ~feas[None, :]
    return (
        (both_feasible & D)
        | (feas[:, None] & ~feas[None, :])
        | (both_infeasible & (cv[:, None] < cv[None, :]))
    )


def fronts_from_dominance(D: np.ndarray) -> list[list[int]]:
    weights = D.astype(np.intp)
    dominated_by = weights.sum(axis=0)
    fronts = []
    while True:
        current = dominated_by == 0
        members = np.flatnonzero(current)
        if len(members) == 0:
            return fronts
        fronts.append(members.tolist())
        dominated_by -= current @ weights
        dominated_by[members] = -1


def sort_arrays(F: np.ndarray, cv: np.ndarray | None = None) -> list[list[int]]:
    if len(F) == 0:
        return []
    return fronts_from_dominance(dominance_matrix(F, cv))


def nondominated_sort(pop: Sequence[Individual]) -> list[list[int]]:
    """Partition ``pop`` into fronts of indices under constrained dominance."""
    return sort_arrays(*objective_arrays(pop))


def crowding_distance_array(F: np.ndarray) -> np.ndarray:
    n, m = F.shape if F.ndim == 2 else (len(F), 0)
    distance = np.zeros(n)
    if n <= 2:
        distance[:] = np.inf
        return distance
    for j in range(m):
        order = np.argsort(F[:, j], kind="stable")
        column = F[order, j]
        span = column[-1] - column[0]
        if span <= 0:
            continue
        distance[order[0]] = distance[order[-1]] = np.inf
        distance[order[1:-1]] += (column[2:] - column[:-2]) / span
    return distance


def crowding_distance(front: Sequence[Individual]) -> np.ndarray:
    F, _ = objective_arrays(front)
    return crowding_distance_array(F.reshape(len(front), -1))


# --------------------------------------------------------------------------- variation


def _round_clamp(value: float, upper: int) -> int:
    gene = math.floor(value + 0.5)
    return 0 if gene < 0 else upper if gene > upper else gene


def _sbx_betaq(rand: float, alpha: float, eta: float) -> float:
    if rand <= 1.0 / alpha:
        return (rand * alpha) ** (1.0 / (eta + 1.0))
    return (1.0 / (2.0 - rand * alpha)) ** (1.0 / (eta + 1.0))


def sbx_integer(
    p1: Sequence[int],
    p2: Sequence[int],
    upper: Sequence[int],
    cfg: VariationConfig,
    rng: RandomSource,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Bounded simulated binary crossover on index genes, rounded and clamped.

    ``upper[i]`` is the largest valid value of gene ``i`` (lower bound is 0).
    """
    if not len(p1) == len(p2) == len(upper):
        raise ValueError("parents and bounds must have equal lengths")
    c1, c2 = list(p1), list(p2)
    if rng.random() >= cfg.crossover_probability:
        return tuple(c1), tuple(c2)
    eta = cfg.crossover_distribution_index
    for i, yu in enumerate(upper):
        if rng.random() > 0.5 or p1[i] == p2[i]:
            continue
        y1, y2 = (p1[i], p2[i]) if p1[i] < p2[i] else (p2[i], p1[i])
        diff = y2 - y1
        rand = rng.random()
        beta = 1.0 + 2.0 * y1 / diff
        betaq = _sbx_betaq(rand, 2.0 - beta ** -(eta + 1.0), eta)
        low = 0.5 * ((y1 + y2) - betaq * diff)
        beta = 1.0 + 2.0 * (yu - y2) / diff
        betaq = _sbx_betaq(rand, 2.0 - beta ** -(eta + 1.0), eta)
        high = 0.5 * ((y1 + y2) + betaq * diff)
        low, high = _round_clamp(low, yu), _round_clamp(high, yu)
        if rng.random() <= 0.5:
            c1[i], c2[i] = high, low
        else:
            c1[i], c2[i] = low, high
    return tuple(c1), tuple(c2)


def polynomial_mutation_integer(
    g: Sequence[int], upper: Sequence[int], cfg: VariationConfig, rng: RandomSource
) -> tuple[int, ...]:
    """Bounded polynomial mutation over ``[0, upper[i]]``, rounded and clamped."""
    genes = list(g)
    eta = cfg.mutation_distribution_index
    power = 1.0 / (eta + 1.0)
    for i, yu in enumerate(upper):
        if rng.random() >= cfg.mutation_probability or yu == 0:
            continue
        y = genes[i]
        rnd = rng.random()
        if rnd < 0.5:
            xy = 1.0 - y / yu
            val = 2.0 * rnd + (1.0 - 2.0 * rnd) * xy ** (eta + 1.0)
            deltaq = val ** power - 1.0
        else:
            xy = 1.0 - (yu - y) / yu
            val = 2.0 * (1.0 - rnd) + 2.0 * (rnd - 0.5) * xy ** (eta + 1.0)
            deltaq = 1.0 - val ** power
        genes[i] = _round_clamp(y + deltaq * yu, yu)
    return tuple(genes)


# --------------------------------------------------------------------------- selection


def binary_tournament(
    pop: Sequence[T], better: Callable[[T, T], bool], rng: RandomSource
) -> T:
    """Draw two members with replacement; the second wins only if strictly better."""
    if not pop:
        raise ValueError("tournament on an empty population")
    first = pop[int(rng.integers(len(pop)))]
    second = pop[int(rng.integers(len(pop)))]
    return second if better(second, first) else first


def random_genotypes(problem: ProblemInstance, n: int, rng: RandomSource) -> list[tuple[int, ...]]:
    sizes = np.array([len(c) for c in problem.candidates])
    genes = rng.integers(0, sizes, size=(n, len(sizes)))
    return [tuple(int(v) for v in row) for row in genes]


def init_population(problem: ProblemInstance, n: int, rng: RandomSource) -> list[Individual]:
    if n < 1:
        raise ValueError("population size must be >= 1")
    return [Individual(g, evaluate(problem, g)) for g in random_genotypes(problem, n, rng)]
