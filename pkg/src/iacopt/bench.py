"""Benchmark orchestration: instances x algorithms x seeded runs, hypervolume tables and rank reports.

Every (instance, algorithm, run) cell is independent and seeded by
:func:`stable_seed`, so the table does not depend on how many worker
processes execute the cells. Hypervolumes are computed after all cells of an
instance finish, on fronts min-max normalized by the bounds of every final
front of that instance, with reference point (1, ..., 1).
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from iacopt.algorithms import AlgorithmId, RunConfig, run
from iacopt.catalog import Catalog
from iacopt.core import Individual, VariationConfig
from iacopt.doml import DomlError, parse_doml, parse_instance_name
from iacopt.metrics import build_bounds, hypervolume, normalize
from iacopt.problem import InfeasibleModelError, ProblemInstance, build_problem
from iacopt.stats import FriedmanResult, RankTable, friedman

RESULTS_HEADER = ("instance", "algorithm", "run", "seed", "hypervolume", "evaluations", "wall_ms")
SEED_MASK = (1 << 63) - 1


class BenchmarkError(RuntimeError):
    """An instance could not be parsed or modelled."""

    def __init__(self, instance: str, cause: Exception):
        super().__init__(f"{instance}: {cause}")
        self.instance = instance
        self.cause = cause


def stable_seed(base_seed: int, instance: str, algorithm: str, run_index: int) -> int:
    """63-bit seed from BLAKE2b over ``"base|instance|algorithm|run"``.

    Stable across processes and Python versions, unlike ``hash()``.
    """
    key = f"{base_seed}|{instance}|{algorithm}|{run_index}".encode()
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return int.from_bytes(digest, "big") & SEED_MASK


@dataclass(frozen=True)
class BenchmarkPlan:
    instances: Mapping[str, str]  # name -> DOML text, in suite order
    catalog: Catalog
    algorithms: tuple[AlgorithmId, ...] = tuple(AlgorithmId)
    runs_per_cell: int = 10
    base_seed: int = 0
    population_size: int = 50
    max_evaluations: int = 2500
    variation: VariationConfig | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "instances", dict(self.instances))
        object.__setattr__(self, "algorithms", tuple(AlgorithmId(a) for a in self.algorithms))
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be >= 1")
        if not self.instances:
            raise ValueError("plan has no instances")
        if not self.algorithms:
            raise ValueError("plan has no algorithms")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("plan lists an algorithm twice")

    def build_problems(self) -> dict[str, ProblemInstance]:
        problems = {}
        for name, text in self.instances.items():
            try:
                problems[name] = build_problem(parse_doml(text), self.catalog)
            except (DomlError, InfeasibleModelError) as exc:
                raise BenchmarkError(name, exc) from exc
        return problems


@dataclass(frozen=True)
class ResultRow:
    instance: str
    algorithm: str
    run: int
    seed: int
    hypervolume: float
    evaluations: int
    wall_ms: float
    # not part of the CSV: hypervolume of the initial population's front, same normalization
    initial_hypervolume: float = field(default=float("nan"), compare=False)


@dataclass(frozen=True)
class ResultsTable:
    rows: tuple[ResultRow, ...]
    instances: tuple[str, ...]
    algorithms: tuple[str, ...]

    def __post_init__(self) -> None:
        keys = [(r.instance, r.algorithm, r.run) for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (instance, algorithm, run) rows")

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class AggregateMatrix:
    instances: tuple[str, ...]
    algorithms: tuple[str, ...]
    values: np.ndarray  # (instances, algorithms) mean hypervolume


# --------------------------------------------------------------------------- execution

_WORKER_PROBLEMS: dict[str, ProblemInstance] = {}


def _init_worker(problems: dict[str, ProblemInstance]) -> None:
    global _WORKER_PROBLEMS
    _WORKER_PROBLEMS = problems


def _feasible_objectives(front: Sequence[Individual], m: int) -> np.ndarray:
    points = [ind.objectives for ind in front if ind.feasible]
    return np.array(points, dtype=float).reshape(len(points), m)


def _run_cell(task):
    instance, algorithm, seed, population, evaluations, variation = task
    problem = _WORKER_PROBLEMS[instance]
    result = run(problem, RunConfig(algorithm, seed, population, evaluations, variation))
    m = problem.n_objectives
    return (
        _feasible_objectives(result.front, m),
        _feasible_objectives(result.initial_front, m),
        result.evaluations_used,
        result.wall_time * 1000.0,
    )


def _front_hypervolume(points: np.ndarray, bounds) -> float:
    if len(points) == 0:
        return 0.0
    return hypervolume(normalize(points, bounds), np.ones(points.shape[1]))


def run_benchmark(plan: BenchmarkPlan, workers: int = 1, record_timings: bool = True) -> ResultsTable:
    """Execute every cell of ``plan`` and return rows sorted by (instance, algorithm, run).

    Args:
        plan: What to run.
        workers: Worker processes; 1 runs everything in this process.
        record_timings: When False, ``wall_ms`` is written as 0 so the table is
            byte-reproducible.

    Raises:
        BenchmarkError: If an instance fails to parse or has no candidates for a slot.
    """
    problems = plan.build_problems()
    tasks = [
        (name, alg, stable_seed(plan.base_seed, name, alg.label, k), plan.population_size,
         plan.max_evaluations, plan.variation)
        for name in plan.instances
        for alg in plan.algorithms
        for k in range(plan.runs_per_cell)
    ]
    if workers <= 1:
        _init_worker(problems)
        outcomes = [_run_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(problems,)) as pool:
            outcomes = list(pool.map(_run_cell, tasks, chunksize=max(1, len(tasks) // (8 * workers))))

    rows = []
    n_cells = len(plan.algorithms) * plan.runs_per_cell
    for start in range(0, len(tasks), n_cells):
        block = outcomes[start:start + n_cells]
        finals = [o[0] for o in block]
        if any(len(f) for f in finals):
            bounds = build_bounds(finals)
        else:
            bounds = None  # no feasible solution anywhere: every hypervolume is 0
        for offset, (final, initial, used, wall_ms) in enumerate(block):
            name, alg, seed = tasks[start + offset][:3]
            rows.append(ResultRow(
                instance=name,
                algorithm=alg.label,
                run=offset % plan.runs_per_cell,
                seed=seed,
                hypervolume=_front_hypervolume(final, bounds) if bounds else 0.0,
                evaluations=used,
                wall_ms=round(wall_ms, 3) if record_timings else 0.0,
                initial_hypervolume=_front_hypervolume(initial, bounds) if bounds else 0.0,
            ))
    return ResultsTable(
        tuple(rows),
        tuple(plan.instances),
        tuple(a.label for a in plan.algorithms),
    )


# --------------------------------------------------------------------------- tables


def aggregate_table(results: ResultsTable) -> AggregateMatrix:
    """Mean hypervolume per (instance, algorithm) cell."""
    if not results.rows:
        raise ValueError("no results to aggregate")
    row_of = {name: i for i, name in enumerate(results.instances)}
    col_of = {name: j for j, name in enumerate(results.algorithms)}
    sums = np.zeros((len(row_of), len(col_of)))
    counts = np.zeros_like(sums)
    for r in results.rows:
        sums[row_of[r.instance], col_of[r.algorithm]] += r.hypervolume
        counts[row_of[r.instance], col_of[r.algorithm]] += 1
    if np.any(counts == 0):
        raise ValueError("some (instance, algorithm) cells have no runs")
    return AggregateMatrix(results.instances, results.algorithms, sums / counts)


def analyze_results(matrix: AggregateMatrix, split: str = "none") -> dict[str, FriedmanResult]:
    """Friedman test over all instances, or per objective count (the ``A`` in ``DOML_A_x-y-z``).

    Returns a mapping from group label (``"all"`` or ``"2 objectives"``...) to result.
    """
    if split == "none":
        groups = {"all": list(range(len(matrix.instances)))}
    elif split in ("by_objective_count", "by-objectives"):
        groups = {}
        for i, name in enumerate(matrix.instances):
            parsed = parse_instance_name(name)
            if parsed is None:
                raise ValueError(f"instance name {name!r} does not follow DOML_A_x-y-z")
            groups.setdefault(f"{parsed[0]} objectives", []).append(i)
        groups = dict(sorted(groups.items(), key=lambda kv: int(kv[0].split()[0])))
    else:
        raise ValueError(f"unknown split {split!r}")
    results = {}
    for label, rows in groups.items():
        if len(rows) < 2:
            raise ValueError(f"group {label!r} has fewer than 2 instances")
        table = RankTable.from_scores(
            matrix.algorithms,
            [matrix.instances[i] for i in rows],
            matrix.values[rows],
            higher_is_better=True,
        )
        results[label] = friedman(table)
    return results


# --------------------------------------------------------------------------- persistence


def _number(value: float) -> str:
    return repr(float(value))


def results_to_csv(results: ResultsTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for r in results.rows:
        writer.writerow([r.instance, r.algorithm, r.run, r.seed, _number(r.hypervolume),
                         r.evaluations, f"{r.wall_ms:.3f}"])
    return out.getvalue()


def aggregate_to_csv(matrix: AggregateMatrix) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["instance", *matrix.algorithms])
    for name, row in zip(matrix.instances, matrix.values):
        writer.writerow([name, *(_number(v) for v in row)])
    return out.getvalue()


class CsvFormatError(ValueError):
    pass


def _ordered_unique(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(items))


def read_results_csv(text: str) -> ResultsTable:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != RESULTS_HEADER:
        raise CsvFormatError(f"results header must be {','.join(RESULTS_HEADER)}")
    rows = []
    for lineno, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(RESULTS_HEADER):
            raise CsvFormatError(f"line {lineno}: expected {len(RESULTS_HEADER)} fields")
        try:
            rows.append(ResultRow(record[0], record[1], int(record[2]), int(record[3]),
                                  float(record[4]), int(record[5]), float(record[6])))
        except ValueError as exc:
            raise CsvFormatError(f"line {lineno}: {exc}") from exc
    if not rows:
        raise CsvFormatError("results CSV has no rows")
    try:
        return ResultsTable(
            tuple(rows),
            _ordered_unique(r.instance for r in rows),
            _ordered_unique(r.algorithm for r in rows),
        )
    except ValueError as exc:
        raise CsvFormatError(str(exc)) from exc


def read_aggregate_csv(text: str) -> AggregateMatrix:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[0] != "instance" or len(header) < 2:
        raise CsvFormatError("aggregate header must start with 'instance' followed by algorithm names")
    instances, values = [], []
    for lineno, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise CsvFormatError(f"line {lineno}: expected {len(header)} fields")
        try:
            values.append([float(v) for v in record[1:]])
        except ValueError as exc:
            raise CsvFormatError(f"line {lineno}: {exc}") from exc
        instances.append(record[0])
    if not instances:
        raise CsvFormatError("aggregate CSV has no rows")
    if not np.all(np.isfinite(values)):
        raise CsvFormatError("aggregate CSV contains non-finite values")
    return AggregateMatrix(tuple(instances), tuple(header[1:]), np.array(values))


def read_matrix_csv(text: str) -> AggregateMatrix:
    """Accept either a results CSV (aggregated on the fly) or an aggregate CSV."""
    first_line = text.split("\n", 1)[0].strip()
    if tuple(first_line.split(",")) == RESULTS_HEADER:
        return aggregate_table(read_results_csv(text))
    return read_aggregate_csv(text)


def format_rank_report(results: Mapping[str, FriedmanResult], reference: Mapping[str, Mapping[str, float]] | None = None) -> str:
    """Plain-text ranking tables, one per group, each followed by its chi-squared line."""
    lines = []
    for label, res in results.items():
        ref = (reference or {}).get(label)
        width = max(len("Algorithm"), *(len(a) for a in res.algorithms))
        lines.append(f"Friedman mean ranks: {label} (N={res.n_instances}, k={len(res.algorithms)})")
        head = f"{'Algorithm':<{width}}  Ranking"
        if ref:
            head += "  Reference  |diff|"
        lines.append(head)
        for name, rank in zip(res.algorithms, res.mean_ranks):
            line = f"{name:<{width}}  {rank:7.4f}"
            if ref and name in ref:
                line += f"  {ref[name]:9.4f}  {abs(rank - ref[name]):6.4f}"
            lines.append(line)
        lines.append(f"chi-squared = {res.statistic:.4f} (df = {res.degrees_of_freedom})")
        lines.append("")
    return "\n".join(lines)


def default_workers() -> int:
    return max(1, min(os.cpu_count() or 1, 8))


@dataclass(frozen=True)
class FixtureCheck:
    """Outcome of re-deriving the published rankings from the published scores."""

    results: dict[str, FriedmanResult]
    failures: tuple[str, ...]
    report: str

    @property
    def passed(self) -> bool:
        return not self.failures


def check_reference_fixture(split: str = "none") -> FixtureCheck:
    """Run the embedded published scores through ranking and the Friedman test.

    The full ranking must match within ``TOLERANCE_ALL`` for every algorithm and
    the three-objective ranking within ``TOLERANCE_THREE_OBJECTIVES``; in the
    two-objective group only the best method's rank is checked.
    """
    from iacopt import reference_results as ref

    matrix = AggregateMatrix(ref.INSTANCES, ref.ALGORITHMS, np.array(ref.HYPERVOLUMES))
    results = dict(analyze_results(matrix, "none"))
    split_results = analyze_results(matrix, "by_objective_count")
    failures = []

    def compare(label, got, expected, tolerance, names):
        for name in names:
            diff = abs(got.ranking()[name] - expected[name])
            if diff > tolerance:
                failures.append(f"{label} {name}: {got.ranking()[name]:.4f} vs {expected[name]} (> {tolerance})")

    compare("all", results["all"], ref.RANKINGS_ALL, ref.TOLERANCE_ALL, ref.ALGORITHMS)
    compare("3 objectives", split_results["3 objectives"], ref.RANKINGS_THREE_OBJECTIVES,
            ref.TOLERANCE_THREE_OBJECTIVES, ref.ALGORITHMS)
    two = split_results["2 objectives"]
    best = min(ref.RANKINGS_TWO_OBJECTIVES, key=ref.RANKINGS_TWO_OBJECTIVES.get)
    compare("2 objectives", two, ref.RANKINGS_TWO_OBJECTIVES, ref.TOLERANCE_TWO_OBJECTIVES_BEST, [best])
    got_best = two.algorithms[int(np.argmin(two.mean_ranks))]
    if got_best != best:
        failures.append(f"2 objectives: best method is {got_best}, expected {best}")

    references = {
        "all": ref.RANKINGS_ALL,
        "2 objectives": ref.RANKINGS_TWO_OBJECTIVES,
        "3 objectives": ref.RANKINGS_THREE_OBJECTIVES,
    }
    shown = results if split == "none" else dict(split_results)
    if split != "none":
        results.update(split_results)
    report = format_rank_report(shown, references)
    report += "fixture check: " + ("PASS" if not failures else "FAIL\n  " + "\n  ".join(failures)) + "\n"
    return FixtureCheck(results, tuple(failures), report)
