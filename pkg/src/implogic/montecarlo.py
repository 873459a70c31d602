"""Variation-aware yield estimation for step programs.

Each trial reruns the program with thresholds resampled per step from an
independent substream, so trials are reproducible given the seed and could
be evaluated in any order or in parallel with identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from . import device as dev
from .device import MemristorSpec
from .program import (ExecutionTrace, ImpStep, StepProgram, WriteStep,
                      execute)
from .topology import ImpConfig, StackTopology

__all__ = ["YieldReport", "TrialOutcome", "estimate_yield"]


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    passed: bool
    failed_step: int | None


@dataclass(frozen=True)
class YieldReport:
    """Pass statistics over seeded trials of one program."""

    trials: int
    passes: int
    yield_fraction: float
    failure_histogram: dict[int, int]
    degraded_ratio_fraction: float
    seed: int
    per_trial: tuple[TrialOutcome, ...] | None = None

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "passes": self.passes,
            "yield": self.yield_fraction,
            "failure_histogram": {str(k): v for k, v in
                                  sorted(self.failure_histogram.items())},
            "degraded_ratio_fraction": self.degraded_ratio_fraction,
            "seed": self.seed,
        }

    def per_trial_rows(self) -> list[dict]:
        if self.per_trial is None:
            raise ValueError("run estimate_yield with collect_outcomes=True")
        return [{"trial": t.trial, "passed": int(t.passed),
                 "failed_step": "" if t.failed_step is None else t.failed_step}
                for t in self.per_trial]


def _program_input_values(program: StepProgram) -> dict[str, int]:
    """Input values as loaded by the program's own write steps."""
    by_cell: dict[str, int] = {}
    for step in program.steps:
        if isinstance(step, WriteStep) and step.cell not in by_cell:
            by_cell[step.cell] = step.value
    return {var: by_cell[cell]
            for var, cell in program.declared_inputs.items()
            if cell in by_cell}


def _first_divergent_step(trace: ExecutionTrace,
                          reference: ExecutionTrace) -> int:
    for rec, ref in zip(trace.steps, reference.steps):
        if rec.states_after != ref.states_after:
            return rec.index
    return len(trace.steps) - 1


def estimate_yield(program: StepProgram, topology: StackTopology,
                   specs: dict[str, MemristorSpec],
                   configs: dict[str, ImpConfig],
                   oracle: Callable[[dict[str, int]], Mapping[str, int]] | Mapping[str, int],
                   trials: int, seed: int = 0,
                   partial_reset_factor: float = dev.PARTIAL_RESET_FACTOR,
                   ratio_degradation_threshold: float = 0.9,
                   collect_outcomes: bool = False) -> YieldReport:
    """Run seeded variation trials and report the pass rate.

    ``oracle`` maps the program's declared input values to the expected
    declared output bits (or is that mapping directly). A trial passes iff
    every declared output decodes to its expected value. Failures are
    attributed to the first step whose post-step device states diverge from
    the zero-variation reference trace. The degraded-ratio fraction counts
    implication steps after which a driven cell's conductance scale sits
    below ``ratio_degradation_threshold``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    expected = oracle(_program_input_values(program)) if callable(oracle) else oracle
    expected = dict(expected)
    unknown = set(expected) - set(program.declared_outputs)
    if unknown:
        raise ValueError(f"oracle names undeclared outputs {sorted(unknown)}")

    reference = execute(program, topology, specs, configs, variation="off",
                        partial_reset_factor=partial_reset_factor)

    imp_indices = [i for i, s in enumerate(program.steps) if isinstance(s, ImpStep)]
    passes = 0
    degraded_steps = 0
    histogram: dict[int, int] = {}
    outcomes: list[TrialOutcome] = []
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        trace = execute(program, topology, specs, configs, variation="seeded",
                        rng=rng, partial_reset_factor=partial_reset_factor)
        got = trace.output_bits(program)
        ok = all(got[var] == expected[var] for var in expected)
        failed_step = None
        if ok:
            passes += 1
        else:
            failed_step = _first_divergent_step(trace, reference)
            histogram[failed_step] = histogram.get(failed_step, 0) + 1
        if collect_outcomes:
            outcomes.append(TrialOutcome(trial, ok, failed_step))
        for i in imp_indices:
            rec = trace.steps[i]
            step = program.steps[i]
            after = rec.states_after
            if (after[step.p][1] < ratio_degradation_threshold
                    or after[step.q][1] < ratio_degradation_threshold):
                degraded_steps += 1

    total_imps = trials * len(imp_indices)
    return YieldReport(
        trials=trials,
        passes=passes,
        yield_fraction=passes / trials,
        failure_histogram=histogram,
        degraded_ratio_fraction=(degraded_steps / total_imps) if total_imps else 0.0,
        seed=seed,
        per_trial=tuple(outcomes) if collect_outcomes else None,
    )
