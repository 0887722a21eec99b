"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

The lines are also collected into the "acceptance criteria" section of the
pytest terminal summary.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from iacopt import reference_results as ref
from iacopt.algorithms import AlgorithmId, RunConfig, run, select_algorithm
from iacopt.bench import BenchmarkPlan, check_reference_fixture, results_to_csv, run_benchmark
from iacopt.catalog import Catalog, CatalogElement, generate_catalog
from iacopt.cli import main
from iacopt.core import sort_arrays
from iacopt.doml import generate_instance_suite, suite_specs
from iacopt.metrics import build_bounds, hv_grid_oracle, hypervolume, normalize
from iacopt.problem import build_problem

from conftest import SAMPLE_DOML, record_criterion
from oracles import exhaustive_front
from test_core import brute_fronts

README = Path(__file__).resolve().parents[1] / "README.md"


# --------------------------------------------------------------------------- 1


def test_criterion_1_friedman_pipeline_against_published_rankings(capsys):
    started = time.perf_counter()
    code = main(["analyze", "--fixture-check", "--split", "by-objectives"])
    capsys.readouterr()
    check = check_reference_fixture("by_objective_count")
    elapsed = time.perf_counter() - started

    full = check.results["all"].ranking()
    three = check.results["3 objectives"].ranking()
    worst_full = max(abs(full[a] - ref.RANKINGS_ALL[a]) for a in ref.ALGORITHMS)
    worst_three = max(abs(three[a] - ref.RANKINGS_THREE_OBJECTIVES[a]) for a in ref.ALGORITHMS)
    passed = (
        code == 0
        and check.passed
        and worst_full <= 0.25
        and worst_three <= 1e-3
        and elapsed < 1.0
    )
    record_criterion(1, passed, f"max |rank diff| all={worst_full:.4f} (<=0.25), "
                                f"3-obj={worst_three:.5f} (<=1e-3), {elapsed:.3f}s (<1s)")
    assert passed, check.failures


# --------------------------------------------------------------------------- 2


def test_criterion_2_published_hypervolumes_are_not_a_fresh_run_target():
    text = README.read_text()
    stated = "not reproducible" in text and "fixture" in text
    record_criterion(2, stated, "published hypervolume values are documented as not reproducible "
                                "by fresh runs; the fixture path validates the statistics instead")
    assert stated


# --------------------------------------------------------------------------- 3


def _hv_ratio_runs(spec, catalog, algorithm, true_points):
    bounds = build_bounds([true_points])
    ref_point = np.ones(true_points.shape[1])
    true_hv = hypervolume(normalize(true_points, bounds), ref_point)
    problem = build_problem(spec, catalog)
    ratios = []
    for seed in range(10):
        result = run(problem, RunConfig(algorithm, seed))
        points = np.array([m.objectives for m in result.front if m.feasible]).reshape(-1, len(ref_point))
        hv = hypervolume(normalize(points, bounds), ref_point) if len(points) else 0.0
        ratios.append(hv / true_hv)
    return ratios


def _tiny_instance():
    base = generate_catalog(5, (3, 3, 3))
    catalog = Catalog(tuple(CatalogElement(e.id, e.element_type, e.provider, "00EU", e.cost,
                                           e.availability, e.performance) for e in base))
    return suite_specs()["DOML_3_1-1-1"], catalog


def test_criterion_3_exhaustive_oracle_recovery(catalog):
    started = time.perf_counter()
    names = [n for n in suite_specs() if n.endswith("_1-1-1")]
    failures = []
    summary = []
    for name in names:
        spec = suite_specs()[name]
        ids, true_points = exhaustive_front(spec, catalog)
        assert len(ids) > 0
        for algorithm in AlgorithmId:
            ratios = _hv_ratio_runs(spec, catalog, algorithm, true_points)
            good = sum(r >= 0.95 for r in ratios)
            summary.append(f"{name}/{algorithm.label}:{good}/10")
            if good < 8:
                failures.append(f"{name} {algorithm.label}: {good}/10 runs >= 0.95 (min ratio {min(ratios):.3f})")

    spec, tiny = _tiny_instance()
    truth, _ = exhaustive_front(spec, tiny)
    problem = build_problem(spec, tiny)
    exact = 0
    for seed in range(10):
        front = run(problem, RunConfig(AlgorithmId.NSGA2, seed)).front
        found = {tuple(problem.candidates[i][g].id for i, g in enumerate(m.genotype)) for m in front}
        exact += found == set(truth)
    if exact != 10:
        failures.append(f"tiny instance: NSGA-II exact in {exact}/10 runs")
    elapsed = time.perf_counter() - started
    if elapsed >= 30:
        failures.append(f"took {elapsed:.1f}s (>= 30s)")
    passed = not failures
    record_criterion(3, passed, f"{len(names)} suite 1-1-1 instances (78,408 genotypes each), "
                                f"tiny 27-genotype NSGA-II exact {exact}/10, {elapsed:.1f}s; "
                                + (", ".join(failures) if failures else "all cells >= 8/10"))
    print("  " + " ".join(summary))
    assert passed, failures


# --------------------------------------------------------------------------- 4


def test_criterion_4_sorting_matches_brute_force():
    rng = np.random.default_rng(20240)
    mismatches = 0
    for k in range(200):
        n = int(rng.integers(1, 51))
        m = 2 + k % 2
        F = rng.integers(0, 8, size=(n, m)).astype(float)
        cv = np.where(rng.random(n) < 0.2, rng.choice([0.1, 0.3, 0.7], size=n), 0.0)
        mismatches += sort_arrays(F, cv) != brute_fronts(F, cv)
    passed = mismatches == 0
    record_criterion(4, passed, f"{mismatches} mismatches over 200 random populations (n<=50, m in {{2,3}})")
    assert passed


# --------------------------------------------------------------------------- 5


def test_criterion_5_hypervolume_exactness():
    closed = [
        abs(hypervolume([(0, 0)], (1, 1)) - 1.0),
        abs(hypervolume([(0.25, 0.75), (0.75, 0.25)], (1, 1)) - 0.3125),
        abs(hypervolume([(0, 0, 0)], (1, 1, 1)) - 1.0),
    ]
    rng = np.random.default_rng(77)
    worst_excess = -np.inf
    for k in range(100):
        m = 2 + k % 2
        resolution = 400 if m == 2 else 60
        front = rng.random((int(rng.integers(1, 21)), m))
        gap = abs(hypervolume(front, np.ones(m)) - hv_grid_oracle(front, np.ones(m), resolution))
        worst_excess = max(worst_excess, gap - 2.0 / resolution)
    passed = max(closed) <= 1e-12 and worst_excess <= 0
    record_criterion(5, passed, f"closed-form max error {max(closed):.1e} (<=1e-12); grid-oracle gap "
                                f"minus 2/resolution max {worst_excess:.2e} (<=0) over 100 fronts")
    assert passed


# --------------------------------------------------------------------------- 6 and 9 share one full benchmark


@pytest.fixture(scope="module")
def full_benchmark(catalog):
    plan = BenchmarkPlan(instances=generate_instance_suite(), catalog=catalog)
    started = time.perf_counter()
    table = run_benchmark(plan, workers=1)
    return plan, table, time.perf_counter() - started


def test_criterion_6_protocol_conformance(full_benchmark):
    plan, table, elapsed = full_benchmark
    csv_rows = results_to_csv(table).strip().splitlines()[1:]
    evaluations = {r.evaluations for r in table.rows}
    cells = {(r.instance, r.algorithm) for r in table.rows}
    runs = {c: sum(1 for r in table.rows if (r.instance, r.algorithm) == c) for c in cells}
    passed = (
        len(csv_rows) == 600
        and evaluations == {2500}
        and plan.population_size == 50
        and RunConfig(AlgorithmId.NSGA2, 0).population_size == 50
        and set(runs.values()) == {10}
        and len(cells) == 60
        and elapsed < 300
    )
    record_criterion(6, passed, f"{len(csv_rows)} CSV rows, evaluations per run {sorted(evaluations)}, "
                                f"population {plan.population_size}, 10 runs x {len(cells)} cells, "
                                f"wall time {elapsed:.1f}s (<300s)")
    assert passed


def test_criterion_9_final_front_improves_on_initial(full_benchmark):
    _, table, _ = full_benchmark
    failures = []
    worst = 10
    for instance in table.instances:
        for algorithm in table.algorithms:
            rows = [r for r in table.rows if r.instance == instance and r.algorithm == algorithm]
            good = sum(r.hypervolume >= r.initial_hypervolume for r in rows)
            worst = min(worst, good)
            if good < 9:
                failures.append(f"{instance}/{algorithm}: {good}/10")
    passed = not failures
    record_criterion(9, passed, f"worst cell {worst}/10 runs with final HV >= initial HV (need >= 9/10)"
                                + ("; " + ", ".join(failures) if failures else ""))
    assert passed


# --------------------------------------------------------------------------- 7


def test_criterion_7_selector_end_to_end(tmp_path, capsys):
    catalog_path = tmp_path / "catalog.json"
    assert main(["catalog", "generate", "--out", str(catalog_path)]) == 0
    mismatches = []
    for name, text in generate_instance_suite().items():
        doml = tmp_path / f"{name}.doml"
        doml.write_text(text)
        code = main(["optimize", "--doml", str(doml), "--catalog", str(catalog_path), "--algorithm", "auto"])
        chosen = json.loads(capsys.readouterr().out)["algorithm"] if code == 0 else f"exit {code}"
        expected = "nsga2" if name.startswith("DOML_2_") else "nsga3"
        if chosen != expected:
            mismatches.append(f"{name}: {chosen}")
    passed = (
        select_algorithm(2) is AlgorithmId.NSGA2
        and select_algorithm(3) is AlgorithmId.NSGA3
        and not mismatches
    )
    record_criterion(7, passed, "select_algorithm(2)=NSGA2, select_algorithm(3)=NSGA3; "
                                f"optimize --algorithm auto on 12 suite instances, {len(mismatches)} mismatches")
    assert passed, mismatches


# --------------------------------------------------------------------------- 8


def _invoke_twice(tmp_path, name, argv_for):
    outputs = []
    for k in range(2):
        path = tmp_path / f"{name}{k}"
        assert main(argv_for(path)) == 0, name
        if path.is_dir():
            outputs.append({p.name: p.read_bytes() for p in sorted(path.iterdir())})
        else:
            outputs.append(path.read_bytes())
    return outputs[0] == outputs[1]


def test_criterion_8_determinism(tmp_path, capsys):
    catalog_path = tmp_path / "catalog.json"
    main(["catalog", "generate", "--out", str(catalog_path)])
    sample = tmp_path / "sample.doml"
    sample.write_text(SAMPLE_DOML)
    suite = tmp_path / "suite"
    suite.mkdir()
    docs = generate_instance_suite()
    for name in ("DOML_2_0-4-4", "DOML_3_1-1-1", "DOML_3_6-0-0"):
        (suite / f"{name}.doml").write_text(docs[name])

    checks = {
        "catalog generate": _invoke_twice(
            tmp_path, "cat", lambda p: ["catalog", "generate", "--seed", "7", "--out", str(p)]),
        "instances generate": _invoke_twice(
            tmp_path, "inst", lambda p: ["instances", "generate", "--out-dir", str(p)]),
    }
    for algorithm in ["auto", *(a.value for a in AlgorithmId)]:
        checks[f"optimize {algorithm}"] = _invoke_twice(
            tmp_path, f"front-{algorithm}",
            lambda p, a=algorithm: ["optimize", "--doml", str(sample), "--catalog", str(catalog_path),
                                    "--algorithm", a, "--seed", "3", "--output", str(p)])

    benchmark_outputs = []
    for workers in (1, 2, 1):
        out = tmp_path / f"bench-w{workers}-{len(benchmark_outputs)}.csv"
        assert main(["benchmark", "--suite", str(suite), "--catalog", str(catalog_path), "--runs", "2",
                     "--base-seed", "5", "--workers", str(workers), "--no-timings", "--out", str(out)]) == 0
        aggregate = out.with_name(out.stem + "_aggregate.csv")
        benchmark_outputs.append((out.read_bytes(), aggregate.read_bytes()))
    checks["benchmark across 1/2 workers"] = len(set(benchmark_outputs)) == 1

    reports = []
    for _ in range(2):
        main(["analyze", str(tmp_path / "bench-w1-0.csv"), "--split", "by-objectives"])
        reports.append(capsys.readouterr().out)
    checks["analyze"] = reports[0] == reports[1]

    failed = [name for name, ok in checks.items() if not ok]
    passed = not failed
    record_criterion(8, passed, f"{len(checks)} commands byte-identical across repeated invocations "
                                "and worker counts (benchmark with --no-timings)"
                                + (f"; differing: {failed}" if failed else ""))
    assert passed, failed
