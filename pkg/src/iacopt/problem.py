"""Constrained multiobjective deployment problem over integer genotypes.

A genotype holds one index per deployment slot; gene ``i`` selects
``candidates[i][gene]``. Deployment metrics aggregate the chosen elements:

* cost: sum of element costs (EUR/month)
* availability: series system, ``100 * prod(a_i / 100)`` (percent)
* performance: arithmetic mean of element performance indices

Numeric bounds never reject a genotype; they add a normalized shortfall to the
total violation used by constrained dominance. Categorical requirements filter
the catalog before the search starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from iacopt.catalog import Catalog, CatalogElement, ElementType, filter_catalog
from iacopt.doml import Bound, ObjectiveSpec, OptimizationSpec

Genotype = tuple  # tuple[int, ...]


class InfeasibleModelError(ValueError):
    """Some deployment slot has no candidate element left after filtering."""


class GenotypeError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Evaluation:
    objectives_natural: tuple[float, ...]
    objectives_min: tuple[float, ...]
    violation: float

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0


def bound_violation(bound: Bound, actual: float) -> float:
    if bound.kind == "max":
        shortfall = actual - bound.value
    else:
        shortfall = bound.value - actual
    if shortfall <= 0:
        return 0.0
    scale = abs(bound.value)
    return shortfall / scale if scale > 0 else shortfall


@dataclass(frozen=True)
class ProblemInstance:
    slots: tuple[ElementType, ...]
    candidates: tuple[tuple[CatalogElement, ...], ...]
    objectives: tuple[ObjectiveSpec, ...]
    bounds: tuple[Bound, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "slots", tuple(self.slots))
        object.__setattr__(self, "candidates", tuple(tuple(c) for c in self.candidates))
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "bounds", tuple(self.bounds))
        if len(self.slots) != len(self.candidates):
            raise ValueError("one candidate list per slot required")
        for slot, cands in zip(self.slots, self.candidates):
            if not cands:
                raise InfeasibleModelError(f"no candidate elements for a {slot.value} slot")
        # per-slot attribute columns, read by evaluate
        object.__setattr__(
            self, "_columns",
            tuple(
                tuple((e.cost, e.availability / 100.0, e.performance) for e in cands)
                for cands in self.candidates
            ),
        )

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def n_objectives(self) -> int:
        return len(self.objectives)

    @property
    def upper(self) -> tuple[int, ...]:
        """Largest valid gene per slot."""
        return tuple(len(c) - 1 for c in self.candidates)

    def search_space_size(self) -> int:
        return math.prod(len(c) for c in self.candidates)


def build_problem(spec: OptimizationSpec, catalog: Catalog) -> ProblemInstance:
    """Apply categorical filters and lay out one candidate list per deployment slot.

    Raises:
        InfeasibleModelError: a slot type has no element left after filtering.
    """
    filtered = filter_catalog(catalog, [(c.property, c.allowed) for c in spec.categoricals])
    slots = spec.elements.slots
    missing = sorted({s.value for s in slots if not filtered.of_type(s)})
    if missing:
        raise InfeasibleModelError(
            f"no catalog element satisfies the requirements for slot type(s): {', '.join(missing)}"
        )
    return ProblemInstance(
        slots=slots,
        candidates=tuple(filtered.of_type(s) for s in slots),
        objectives=spec.objectives,
        bounds=spec.bounds,
    )


def check_genotype(problem: ProblemInstance, genotype: Sequence[int]) -> None:
    if len(genotype) != problem.n_slots:
        raise GenotypeError(f"genotype has {len(genotype)} genes, problem has {problem.n_slots} slots")
    for i, (gene, cands) in enumerate(zip(genotype, problem.candidates)):
        if not 0 <= gene < len(cands):
            raise GenotypeError(f"gene {i} = {gene} out of range [0, {len(cands)})")


def decode(problem: ProblemInstance, genotype: Sequence[int]) -> list[CatalogElement]:
    check_genotype(problem, genotype)
    return [cands[g] for g, cands in zip(genotype, problem.candidates)]


def evaluate(problem: ProblemInstance, genotype: Sequence[int]) -> Evaluation:
    check_genotype(problem, genotype)
    rows = [column[gene] for gene, column in zip(genotype, problem._columns)]
    # fsum and a sorted product keep the aggregates independent of slot order
    availability = 1.0
    for a in sorted(r[1] for r in rows):
        availability *= a
    values = {
        "cost": math.fsum(r[0] for r in rows),
        "availability": 100.0 * availability,
        "performance": math.fsum(r[2] for r in rows) / len(rows),
    }
    natural = tuple(values[o.metric] for o in problem.objectives)
    minimized = tuple(v if o.sense == "min" else -v for v, o in zip(natural, problem.objectives))
    violation = 0.0
    for bound in problem.bounds:
        violation += bound_violation(bound, values[bound.metric])
    return Evaluation(natural, minimized, violation)
