"""Experiment runner CLI: seeded runs, CSV results, reproducibility manifest."""

from __future__ import annotations

import argparse
import copy
import math
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .config import ConfigError, ExperimentConfig, emit_config, parse_config
from .ecosystem import GenerationReport, epoch, initial_ecosystem
from .tasks import (
    DpbFixedTask,
    DpbGeneralizationTask,
    DpbParams,
    XorTask,
    generalization_test,
    recoverability_scan,
)


@dataclass
class RunResult:
    seed: int
    solved: bool
    generations: int
    evaluations: int
    solution_hidden: int | None
    solution_text: str | None
    reports: list[GenerationReport] = field(default_factory=list)


@dataclass
class ExperimentSummary:
    runs: int
    successes: int
    success_rate: float
    mean_evaluations: float | None  # over successful runs
    mean_hidden: float | None  # over solutions
    results: list[RunResult] = field(default_factory=list)


def _find_solution(eco):
    for ind in eco.individuals():
        if ind.solved:
            return ind
    return None


def _evolution_run(cfg: ExperimentConfig, run_seed: int) -> RunResult:
    rng = random.Random(run_seed)
    evo = copy.deepcopy(cfg.evolution)
    if cfg.experiment == "xor_fixed":
        evo.mutation_weights.add_neuron = 0.0
        evo.mutation_weights.delete_neuron = 0.0

    if cfg.experiment in ("xor_evolving", "xor_fixed"):
        task = XorTask()
        n_input, n_output = 2, 1
    elif cfg.experiment == "dpb_fixed":
        theta0 = rng.uniform(math.radians(-6.0), math.radians(6.0))
        task = DpbFixedTask(theta0)
        n_input, n_output = 6, 1
    elif cfg.experiment == "dpb_generalize":
        task = DpbGeneralizationTask(steps=cfg.generalization_steps)
        n_input, n_output = 6, 1
    else:
        raise ConfigError(f"{cfg.experiment} is not an evolution experiment")

    eco = initial_ecosystem(evo, n_input, n_output, cfg.initial_species, rng)
    reports = []
    for _ in range(cfg.generation_cap):
        report = epoch(eco, task, rng)
        reports.append(report)
        if report.solved:
            break
    solution = _find_solution(eco)
    return RunResult(
        seed=run_seed,
        solved=solution is not None,
        generations=len(reports),
        evaluations=eco.evaluation_count,
        solution_hidden=solution.genotype.n_hidden if solution else None,
        solution_text=solution.genotype.to_text() if solution else None,
        reports=reports,
    )


def run_experiment(cfg: ExperimentConfig, quiet: bool = False) -> ExperimentSummary:
    cfg.validate()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.txt").write_text(
        emit_config(cfg) + "run_seeds = " + " ".join(str(cfg.seed + i) for i in range(cfg.runs)) + "\n"
    )

    if cfg.experiment == "recoverability":
        table = recoverability_scan(DpbParams())
        lines = ["x0_m,max_recoverable_deg"]
        lines += [f"{x0:g},{deg}" for x0, deg in table]
        (out / "recoverability.csv").write_text("\n".join(lines) + "\n")
        if not quiet:
            print(f"recoverability table written to {out / 'recoverability.csv'}")
        return ExperimentSummary(1, 1, 1.0, None, None, [])

    results = []
    for i in range(cfg.runs):
        result = _evolution_run(cfg, cfg.seed + i)
        results.append(result)
        run_csv = [GenerationReport.CSV_HEADER] + [r.csv_row() for r in result.reports]
        (out / f"run_{i:03d}.csv").write_text("\n".join(run_csv) + "\n")
        if result.solution_text is not None:
            (out / f"run_{i:03d}_solution.txt").write_text(result.solution_text)
        if not quiet:
            status = "solved" if result.solved else "failed"
            print(
                f"run {i}: {status} after {result.generations} generations, "
                f"{result.evaluations} evaluations"
            )

    solved = [r for r in results if r.solved]
    summary = ExperimentSummary(
        runs=cfg.runs,
        successes=len(solved),
        success_rate=len(solved) / cfg.runs,
        mean_evaluations=(sum(r.evaluations for r in solved) / len(solved)) if solved else None,
        mean_hidden=(sum(r.solution_hidden for r in solved) / len(solved)) if solved else None,
        results=results,
    )
    _write_summary(out, cfg, summary)
    if cfg.experiment == "dpb_generalize":
        _write_generalization_details(out, cfg, results)
    if not quiet:
        print(
            f"{cfg.experiment}: {summary.successes}/{summary.runs} runs solved"
            + (
                f", mean evaluations {summary.mean_evaluations:.1f}"
                if summary.mean_evaluations is not None
                else ""
            )
        )
    return summary


def _write_summary(out: Path, cfg: ExperimentConfig, summary: ExperimentSummary) -> None:
    lines = ["run,seed,solved,generations,evaluations,solution_hidden"]
    for i, r in enumerate(summary.results):
        hidden = "" if r.solution_hidden is None else str(r.solution_hidden)
        lines.append(f"{i},{r.seed},{int(r.solved)},{r.generations},{r.evaluations},{hidden}")
    (out / "runs.csv").write_text("\n".join(lines) + "\n")

    mean_ev = "" if summary.mean_evaluations is None else f"{summary.mean_evaluations:.17g}"
    mean_h = "" if summary.mean_hidden is None else f"{summary.mean_hidden:.17g}"
    (out / "summary.csv").write_text(
        "experiment,runs,successes,success_rate,mean_evaluations,mean_hidden\n"
        f"{cfg.experiment},{summary.runs},{summary.successes},"
        f"{summary.success_rate:.17g},{mean_ev},{mean_h}\n"
    )


def _write_generalization_details(out: Path, cfg: ExperimentConfig, results) -> None:
    from .genotype import Genotype

    for i, r in enumerate(results):
        if r.solution_text is None:
            continue
        g = Genotype.from_text(r.solution_text)
        _, conditions = generalization_test(g, DpbParams(), cfg.generalization_steps)
        lines = ["x0_m,theta0_deg,steps_survived,passed"]
        lines += [f"{x0:g},{deg},{steps},{int(ok)}" for x0, deg, steps, ok in conditions]
        (out / f"run_{i:03d}_generalization.csv").write_text("\n".join(lines) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="neuroevo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("config", help="path to a key = value config file")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--out", help="override the output directory")
    run_p.add_argument("--runs", type=int, help="override the number of runs")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(Path(args.config).read_text())
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.evolution.seed = args.seed
        if args.out is not None:
            cfg.output_dir = args.out
        if args.runs is not None:
            cfg.runs = args.runs
        cfg.validate()
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        run_experiment(cfg)
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit code 2
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
