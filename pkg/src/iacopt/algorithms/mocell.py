"""Synchronous cellular GA on a toroidal grid with a crowding-bounded external archive."""

from __future__ import annotations

from iacopt.algorithms._common import make_children
from iacopt.core import (
    Individual,
    binary_tournament,
    constrained_dominates,
    crowding_distance_array,
    objective_arrays,
)

GRID_ROWS = 5
FEEDBACK = 1


def moore_neighborhoods(rows: int, cols: int) -> list[list[int]]:
    """Cell indices of the 3x3 toroidal block around every cell (row-major, center included)."""
    return [
        [((r + dr) % rows) * cols + (c + dc) % cols for dr in (-1, 0, 1) for dc in (-1, 0, 1)]
        for r in range(rows)
        for c in range(cols)
    ]


class CrowdingArchive:
    """Bounded nondominated archive; overflow evicts the least crowded member."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.members: list[Individual] = []

    def __len__(self) -> int:
        return len(self.members)

    def add(self, candidate: Individual) -> bool:
        for member in self.members:
            if constrained_dominates(member, candidate):
                return False
            if member.evaluation == candidate.evaluation:
                return False
        self.members = [m for m in self.members if not constrained_dominates(candidate, m)]
        self.members.append(candidate)
        if len(self.members) > self.capacity:
            F, _ = objective_arrays(self.members)
            del self.members[int(crowding_distance_array(F).argmin())]
        return True


def evolve(problem, population, cfg, variation, rng, budget):
    cols = cfg.population_size // GRID_ROWS
    neighborhoods = moore_neighborhoods(GRID_ROWS, cols)
    grid = list(population)
    archive = CrowdingArchive(cfg.population_size)
    for ind in grid:
        archive.add(ind)
    while budget.remaining > 0:
        next_grid = list(grid)
        for cell, neighbors in enumerate(neighborhoods):
            if budget.remaining == 0:
                break
            block = [grid[k] for k in neighbors]
            a = binary_tournament(block, constrained_dominates, rng)
            b = binary_tournament(block, constrained_dominates, rng)
            child = budget.evaluate(make_children(a, b, problem, variation, rng)[0])
            if not constrained_dominates(grid[cell], child):
                next_grid[cell] = child
            archive.add(child)
        grid = next_grid
        for _ in range(FEEDBACK):
            grid[int(rng.integers(len(grid)))] = archive.members[int(rng.integers(len(archive)))]
    return grid + archive.members
