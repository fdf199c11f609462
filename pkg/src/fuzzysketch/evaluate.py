"""FRR / FAR evaluation of enroll + verify over simulated channels."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .channel import ChannelKind, ChannelModel, random_template, sample_pair
from .minsum import DEFAULT_MAX_ITERATIONS, ProductCode
from .sketch import DEFAULT_ROTATIONS, Template, enroll, verify

CSV_HEADER = ("trial", "kind", "accepted", "rotation", "iterations", "status")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    kind: ChannelKind
    accepted: bool
    rotation: int | None
    iterations: int
    status: str

    def row(self) -> tuple:
        rotation = "" if self.rotation is None else self.rotation
        return (self.trial, self.kind.value, int(self.accepted), rotation, self.iterations, self.status)


@dataclass(frozen=True)
class EvalReport:
    frr: Fraction
    far: Fraction
    trials_matching: int
    trials_non_matching: int
    records: list[TrialRecord] = field(repr=False)

    def summary(self) -> str:
        return "\n".join(
            [
                f"trials_matching={self.trials_matching}",
                f"trials_non_matching={self.trials_non_matching}",
                f"frr={self.frr.numerator}/{self.frr.denominator} ({float(self.frr):.6f})",
                f"far={self.far.numerator}/{self.far.denominator} ({float(self.far):.6f})",
            ]
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(r.row() for r in self.records)
        return buf.getvalue()


@dataclass(frozen=True)
class TrialConfig:
    code_params: tuple[int, int]
    rotations: tuple[int, ...] = DEFAULT_ROTATIONS
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    interleave: bool = True
    seed: int = 0
    templates: tuple[Template, ...] = ()


def _kind_index(kind: ChannelKind) -> int:
    return 0 if kind is ChannelKind.MATCHING else 1


def run_trial(config: TrialConfig, model: ChannelModel, trial: int) -> TrialRecord:
    """One enroll/verify round; the random stream depends only on (seed, kind, trial)."""
    pc = ProductCode.from_params(*config.code_params)
    rng = np.random.default_rng([config.seed, _kind_index(model.kind), trial])
    if config.templates:
        base = config.templates[trial % len(config.templates)]
    else:
        base = random_template(pc.length, rng)
    probe = sample_pair(model, base, rng)
    sketch = enroll(base, pc, int(rng.integers(0, 1 << 63)), interleave=config.interleave)
    result = verify(sketch, probe, pc, config.rotations, config.max_iterations)
    return TrialRecord(trial, model.kind, result.accepted, result.rotation, result.iterations, result.status.value)


def _run_batch(args) -> list[TrialRecord]:
    config, model, trials = args
    return [run_trial(config, model, t) for t in trials]


def run_trials(config: TrialConfig, model: ChannelModel, trials: int, jobs: int = 1) -> list[TrialRecord]:
    if jobs <= 1 or trials < 2:
        return [run_trial(config, model, t) for t in range(trials)]
    chunks = [range(start, trials, jobs) for start in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        records = [r for batch in pool.map(_run_batch, [(config, model, c) for c in chunks]) for r in batch]
    return sorted(records, key=lambda r: r.trial)


def evaluate(
    config: TrialConfig,
    matching: ChannelModel,
    non_matching: ChannelModel,
    trials_matching: int,
    trials_non_matching: int,
    jobs: int = 1,
) -> EvalReport:
    """Run the matching trials, then the non-matching ones, and count outcomes."""
    if trials_matching < 1 or trials_non_matching < 0:
        raise ValueError("need at least one matching trial and a nonnegative non-matching count")
    m_records = run_trials(config, matching, trials_matching, jobs)
    nm_records = run_trials(config, non_matching, trials_non_matching, jobs) if trials_non_matching else []
    rejected = sum(not r.accepted for r in m_records)
    accepted = sum(r.accepted for r in nm_records)
    far = Fraction(accepted, trials_non_matching) if trials_non_matching else Fraction(0)
    return EvalReport(Fraction(rejected, trials_matching), far, trials_matching, trials_non_matching, m_records + nm_records)


def paired_interleaver_trials(
    pc: ProductCode, model: ChannelModel, trials: int, seed: int, max_iterations: int = DEFAULT_MAX_ITERATIONS
) -> list[tuple[bool, bool]]:
    """Decode the same channel draw with a random and with the identity interleaver.

    Returns ``(random_ok, identity_ok)`` per trial; verification uses shift 0 only.
    """
    out = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        base = random_template(pc.length, rng)
        probe = sample_pair(model, base, rng)
        enroll_seed = int(rng.integers(0, 1 << 63))
        pair = tuple(
            verify(enroll(base, pc, enroll_seed, interleave=flag), probe, pc, (0,), max_iterations).accepted
            for flag in (True, False)
        )
        out.append(pair)
    return out


def sign_test_pvalue(pairs: Sequence[tuple[bool, bool]]) -> float:
    """One-sided sign test that the first method succeeds more often than the second."""
    wins = sum(a and not b for a, b in pairs)
    losses = sum(b and not a for a, b in pairs)
    if wins + losses == 0:
        return 1.0
    return float(binomtest(wins, wins + losses, 0.5, alternative="greater").pvalue)
