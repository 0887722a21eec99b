"""Command-line interface.

Exit codes: 0 success, 1 usage or parse error, 2 infeasible model, 3 internal error.
Data documents go to files or stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from iacopt.algorithms import AlgorithmId, RunConfig, run, select_algorithm
from iacopt.catalog import CatalogError, ElementCounts, generate_catalog, load_catalog, render_catalog
from iacopt.doml import DomlError, generate_instance_suite, parse_doml

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    """Bad arguments, unreadable input or malformed documents (exit 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        write_atomic(path, text)


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {what} {path!r}: {exc}") from exc


def _load_catalog_file(path: str):
    try:
        return load_catalog(_read_text(path, "catalog"))
    except CatalogError as exc:
        raise UsageError(f"invalid catalog {path!r}: {exc}") from exc


def _parse_counts(text: str) -> ElementCounts:
    try:
        values = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--counts must be three comma-separated integers, got {text!r}") from None
    if len(values) != 3 or any(v < 0 for v in values):
        raise UsageError(f"--counts must be three non-negative integers, got {text!r}")
    return ElementCounts(*values)


# --------------------------------------------------------------------------- commands


def front_document(spec, problem, result) -> dict:
    """JSON-ready description of a run's final front with decoded element ids."""
    from iacopt.problem import decode

    metrics = [o.metric for o in spec.objectives]
    solutions = []
    for ind in result.front:
        ev = ind.evaluation
        solutions.append({
            "indices": list(ind.genotype),
            "elements": [e.id for e in decode(problem, ind.genotype)],
            "objectives": dict(zip(metrics, ev.objectives_natural)),
            "objectives_min": dict(zip(metrics, ev.objectives_min)),
            "feasible": ev.feasible,
            "violation": ev.violation,
        })
    solutions.sort(key=lambda s: (s["objectives_min"][metrics[0]], s["indices"]))
    return {
        "instance": spec.name,
        "algorithm": result.algorithm.value,
        "seed": result.seed,
        "evaluations": result.evaluations_used,
        "solutions": solutions,
    }


def cmd_optimize(args) -> int:
    from iacopt.problem import build_problem

    try:
        spec = parse_doml(_read_text(args.doml, "DOML document"))
    except DomlError as exc:
        raise UsageError(f"{args.doml}: {exc}") from exc
    catalog = _load_catalog_file(args.catalog)
    problem = build_problem(spec, catalog)
    if args.algorithm == "auto":
        algorithm = select_algorithm(len(spec.objectives))
        _diag(f"auto-selected {algorithm.label} for {len(spec.objectives)} objectives")
    else:
        algorithm = AlgorithmId(args.algorithm)
    try:
        cfg = RunConfig(algorithm, args.seed, args.population, args.max_evaluations)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = run(problem, cfg)
    document = front_document(spec, problem, result)
    _emit(json.dumps(document, indent=2) + "\n", args.output)
    return EXIT_OK


def _suite_documents(suite: str) -> dict[str, str]:
    if suite == "table1":
        return generate_instance_suite()
    directory = Path(suite)
    if not directory.is_dir():
        raise UsageError(f"--suite must be 'table1' or a directory of .doml files, got {suite!r}")
    files = sorted(directory.glob("*.doml"))
    if not files:
        raise UsageError(f"no .doml files in {suite!r}")
    return {f.stem: _read_text(str(f), "DOML document") for f in files}


def _aggregate_path(out: str) -> str:
    path = Path(out)
    return str(path.with_name(f"{path.stem}_aggregate{path.suffix or '.csv'}"))


def cmd_benchmark(args) -> int:
    from iacopt.bench import BenchmarkPlan, aggregate_table, aggregate_to_csv, results_to_csv, run_benchmark

    catalog = _load_catalog_file(args.catalog)
    documents = _suite_documents(args.suite)
    try:
        plan = BenchmarkPlan(
            instances=documents,
            catalog=catalog,
            runs_per_cell=args.runs,
            base_seed=args.base_seed,
            population_size=args.population,
            max_evaluations=args.max_evaluations,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    results = run_benchmark(plan, workers=args.workers, record_timings=not args.no_timings)
    aggregate_out = args.aggregate_out or _aggregate_path(args.out)
    write_atomic(args.out, results_to_csv(results))
    write_atomic(aggregate_out, aggregate_to_csv(aggregate_table(results)))
    _diag(f"wrote {len(results)} rows to {args.out} and the aggregate to {aggregate_out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    from iacopt.bench import CsvFormatError, analyze_results, check_reference_fixture, format_rank_report, read_matrix_csv

    split = "none" if args.split == "none" else "by_objective_count"
    if args.fixture_check:
        check = check_reference_fixture(split)
        sys.stdout.write(check.report)
        if not check.passed:
            _diag("fixture check failed: " + "; ".join(check.failures))
            return EXIT_INTERNAL
        return EXIT_OK
    if args.csv is None:
        raise UsageError("analyze needs a CSV path or --fixture-check")
    try:
        matrix = read_matrix_csv(_read_text(args.csv, "CSV"))
        results = analyze_results(matrix, split)
    except (CsvFormatError, ValueError) as exc:
        raise UsageError(f"{args.csv}: {exc}") from exc
    sys.stdout.write(format_rank_report(results))
    return EXIT_OK


def cmd_catalog_generate(args) -> int:
    counts = _parse_counts(args.counts)
    text = render_catalog(generate_catalog(args.seed, counts))
    _emit(text, args.out)
    return EXIT_OK


def cmd_instances_generate(args) -> int:
    documents = generate_instance_suite()
    if args.out_dir is None:
        sys.stdout.write("\n".join(f"# {name}\n{text}" for name, text in documents.items()))
        return EXIT_OK
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in documents.items():
        write_atomic(out_dir / f"{name}.doml", text)
    _diag(f"wrote {len(documents)} instances to {out_dir}")
    return EXIT_OK


# --------------------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iacopt", description="Multiobjective IaC deployment optimizer")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    opt = sub.add_parser("optimize", help="optimize one DOML document")
    opt.add_argument("--doml", required=True)
    opt.add_argument("--catalog", required=True)
    opt.add_argument("--algorithm", default="auto", choices=[a.value for a in AlgorithmId] + ["auto"])
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--population", type=int, default=50)
    opt.add_argument("--max-evaluations", type=int, default=2500)
    opt.add_argument("--output", "-o", help="front document path (default: stdout)")
    opt.set_defaults(handler=cmd_optimize)

    bench = sub.add_parser("benchmark", help="run instances x algorithms x seeded runs")
    bench.add_argument("--suite", default="table1", help="'table1' or a directory of .doml files")
    bench.add_argument("--catalog", required=True)
    bench.add_argument("--runs", type=int, default=10)
    bench.add_argument("--base-seed", type=int, default=0)
    bench.add_argument("--population", type=int, default=50)
    bench.add_argument("--max-evaluations", type=int, default=2500)
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--no-timings", action="store_true",
                       help="write wall_ms as 0 so repeated runs are byte-identical")
    bench.add_argument("--out", required=True, help="results CSV path")
    bench.add_argument("--aggregate-out", help="aggregate CSV path (default: <out>_aggregate.csv)")
    bench.set_defaults(handler=cmd_benchmark)

    ana = sub.add_parser("analyze", help="Friedman ranks from a results or aggregate CSV")
    ana.add_argument("csv", nargs="?")
    ana.add_argument("--split", default="none", choices=["none", "by-objectives"])
    ana.add_argument("--fixture-check", action="store_true",
                     help="validate the statistics against the embedded published results")
    ana.set_defaults(handler=cmd_analyze)

    cat = sub.add_parser("catalog", help="catalog utilities")
    cat_sub = cat.add_subparsers(dest="catalog_command", required=True, parser_class=_Parser)
    gen = cat_sub.add_parser("generate", help="generate a synthetic catalog")
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--counts", default="99,24,33", help="VM,DB,Storage counts")
    gen.add_argument("--out", "-o", help="catalog path (default: stdout)")
    gen.set_defaults(handler=cmd_catalog_generate)

    inst = sub.add_parser("instances", help="benchmark suite utilities")
    inst_sub = inst.add_subparsers(dest="instances_command", required=True, parser_class=_Parser)
    igen = inst_sub.add_parser("generate", help="write the 12 suite DOML documents")
    igen.add_argument("--out-dir", help="directory for NAME.doml files (default: stdout)")
    igen.set_defaults(handler=cmd_instances_generate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    from iacopt.bench import BenchmarkError
    from iacopt.problem import InfeasibleModelError

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors (and --help) this way
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except UsageError as exc:
        _diag(f"error: {exc}")
        return EXIT_USAGE
    except InfeasibleModelError as exc:
        _diag(f"infeasible model: {exc}")
        return EXIT_INFEASIBLE
    except BenchmarkError as exc:
        _diag(f"benchmark instance failed: {exc}")
        return EXIT_INFEASIBLE
    except Exception as exc:  # noqa: BLE001 - the exit-code contract covers everything else
        _diag(f"internal error: {type(exc).__name__}: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
