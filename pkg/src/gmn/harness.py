"""Seeded Monte Carlo replay of the experiment and its significance statistics.

Each variation gets two private random streams derived from the master seed
and the variation's position in :func:`enumerate_valid_variations`: one for
detector clicks, one for measurement outcomes. Valid round ``k`` of a variation
always uses the ``k``-th uniform of its measurement stream, so results do not
depend on worker count or on how many rounds detector losses threw away.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import DomainError
from .noise import NoiseModel, detection_block, prepare_noisy_ghz
from .protocol import AppleVariation, Parity, enumerate_valid_variations, parity, round_distribution
from .qsim import index_to_bits, sample_indices

SCHEMA = "gmn-report/1"
CLASSICAL_BOUND = 0.75
MAX_BLOCK = 1 << 20

CSV_COLUMNS = (
    "variation_a_halfunits",
    "variation_b_halfunits",
    "variation_c_halfunits",
    "parity",
    "played",
    "correct",
    "win_probability",
    "std_error",
    "zscore",
)

# diagonal-basis outcome labels in outcome-index order: bit 0 -> '+', bit 1 -> '-'
OUTCOME_LABELS = tuple("".join("+-"[b] for b in index_to_bits(i, 3)) for i in range(8))


@dataclass(frozen=True)
class RunConfig:
    rounds_per_variation: int = 1000
    noise: NoiseModel = field(default_factory=NoiseModel)
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if int(self.rounds_per_variation) < 1:
            raise DomainError("rounds_per_variation must be at least 1")
        if not 0 <= int(self.master_seed) < 2**64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")
        if int(self.workers) < 1:
            raise DomainError("workers must be at least 1")


@dataclass(frozen=True)
class CountsTable:
    """Coincidence counts N_{+++} ... N_{---}, in outcome-index order."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != 8 or any(c < 0 for c in counts):
            raise ValueError("a counts table holds eight nonnegative integers")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_labels(cls, **by_label) -> "CountsTable":
        """Build from labels such as ``{"+++": 10}``; missing labels count zero."""
        unknown = set(by_label) - set(OUTCOME_LABELS)
        if unknown:
            raise ValueError(f"unknown outcome labels {sorted(unknown)}")
        return cls(tuple(by_label.get(label, 0) for label in OUTCOME_LABELS))

    def __getitem__(self, label: str) -> int:
        return self.counts[OUTCOME_LABELS.index(label)]

    def __add__(self, other: "CountsTable") -> "CountsTable":
        return CountsTable(tuple(a + b for a, b in zip(self.counts, other.counts)))


def parity_counts(table: CountsTable) -> tuple[int, int]:
    """Rounds answered "even" and "odd": outcomes with an even or odd number of minus signs."""
    n_even = table["+++"] + table["+--"] + table["-+-"] + table["--+"]
    n_odd = table["-++"] + table["+-+"] + table["++-"] + table["---"]
    return n_even, n_odd


def stats_from_totals(correct: int, incorrect: int) -> tuple[float, float, float]:
    """Win rate, its binomial standard error, and the z-score against the 3/4 bound.

    The standard error uses the measured rate; a rate of exactly 0 or 1 gives
    zero error and an infinite z-score.
    """
    n = correct + incorrect
    if correct < 0 or incorrect < 0 or n < 1:
        raise DomainError("need at least one round and nonnegative counts")
    p = correct / n
    se = math.sqrt(p * (1 - p) / n)
    diff = p - CLASSICAL_BOUND
    if se > 0:
        z = diff / se
    else:
        z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return p, se, z


@dataclass(frozen=True)
class VariationStats:
    variation: AppleVariation
    played: int
    correct: int
    counts: CountsTable
    discarded: int = 0

    @property
    def win_probability(self) -> float:
        return stats_from_totals(self.correct, self.played - self.correct)[0]

    @property
    def std_error(self) -> float:
        return stats_from_totals(self.correct, self.played - self.correct)[1]

    @property
    def zscore_vs_classical(self) -> float:
        return stats_from_totals(self.correct, self.played - self.correct)[2]


@dataclass(frozen=True)
class ExperimentReport:
    per_variation: tuple[VariationStats, ...]
    config: RunConfig
    version: str = __version__

    @property
    def seed(self) -> int:
        return self.config.master_seed

    @property
    def pooled_correct(self) -> int:
        return sum(s.correct for s in self.per_variation)

    @property
    def pooled_total(self) -> int:
        return sum(s.played for s in self.per_variation)

    @property
    def discarded_rounds(self) -> int:
        return sum(s.discarded for s in self.per_variation)

    def _pooled(self):
        return stats_from_totals(self.pooled_correct, self.pooled_total - self.pooled_correct)

    @property
    def pooled_probability(self) -> float:
        return self._pooled()[0]

    @property
    def pooled_std_error(self) -> float:
        return self._pooled()[1]

    @property
    def pooled_zscore(self) -> float:
        return self._pooled()[2]

    @property
    def pooled_counts(self) -> CountsTable:
        total = CountsTable((0,) * 8)
        for s in self.per_variation:
            total = total + s.counts
        return total


def variation_streams(master_seed: int, index: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Detection and measurement generators for variation ``index``."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    det, meas = seq.spawn(2)
    return np.random.default_rng(det), np.random.default_rng(meas)


def _count_discards(model: NoiseModel, rng: np.random.Generator, needed: int) -> int:
    """Draw detector clicks until ``needed`` valid rounds have occurred; return the losses."""
    p_valid = model.valid_round_probability
    discarded = 0
    while needed > 0:
        size = int(min(MAX_BLOCK, max(1024, math.ceil(1.2 * needed / p_valid))))
        valid = detection_block(model, rng, size)
        hits = np.flatnonzero(valid)
        if hits.size >= needed:
            discarded += int(hits[needed - 1]) + 1 - needed
            return discarded
        discarded += size - hits.size
        needed -= hits.size
    return discarded


def play_variation(
    v: AppleVariation, model: NoiseModel, rounds: int, det_rng: np.random.Generator, meas_rng: np.random.Generator
) -> VariationStats:
    """Play ``rounds`` valid rounds of one variation.

    Every round measures a fresh copy of the same noisy source state, so the
    outcome law is computed once and sampled by inverse CDF.
    """
    discarded = _count_discards(model, det_rng, rounds)
    probs = round_distribution(v, prepare_noisy_ghz(model))
    outcomes = sample_indices(probs, meas_rng.random(rounds))
    table = CountsTable(tuple(np.bincount(outcomes, minlength=8)))
    n_even, n_odd = parity_counts(table)
    correct = n_even if parity(v) is Parity.EVEN else n_odd
    return VariationStats(v, rounds, correct, table, discarded)


def _run_one(args) -> VariationStats:
    index, v, config = args
    det, meas = variation_streams(config.master_seed, index)
    return play_variation(v, config.noise, config.rounds_per_variation, det, meas)


def run_experiment(config: RunConfig) -> ExperimentReport:
    """Play every variation ``rounds_per_variation`` times and collect statistics."""
    jobs = [(i, v, config) for i, v in enumerate(enumerate_valid_variations())]
    if config.workers == 1:
        stats = [_run_one(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            stats = list(pool.map(_run_one, jobs))
    return ExperimentReport(tuple(stats), config)


# -- serialization ----------------------------------------------------------


def _json_float(x: float):
    return x if math.isfinite(x) else None


def report_to_dict(report: ExperimentReport) -> dict:
    cfg = report.config
    return {
        "schema": SCHEMA,
        "version": report.version,
        "seed": cfg.master_seed,
        "config": {
            "rounds_per_variation": cfg.rounds_per_variation,
            "visibility": cfg.noise.visibility,
            "white_noise": cfg.noise.white_noise,
            "detector_efficiency": list(cfg.noise.detector_efficiency),
        },
        "pooled": {
            "correct": report.pooled_correct,
            "total": report.pooled_total,
            "probability": report.pooled_probability,
            "std_error": report.pooled_std_error,
            "zscore": _json_float(report.pooled_zscore),
        },
        "variations": [
            {
                "a": s.variation.n_a.half_units,
                "b": s.variation.n_b.half_units,
                "c": s.variation.n_c.half_units,
                "parity": str(parity(s.variation)),
                "played": s.played,
                "correct": s.correct,
                "probability": s.win_probability,
                "std_error": s.std_error,
                "zscore": _json_float(s.zscore_vs_classical),
            }
            for s in report.per_variation
        ],
        "discarded_rounds": report.discarded_rounds,
    }


def _fmt(x: float) -> str:
    return f"{x:#.6g}"


def emit_report(report: ExperimentReport, format: str = "json") -> bytes:
    """Serialize a report as JSON (one object) or CSV (header plus one row per variation)."""
    if format == "json":
        text = json.dumps(report_to_dict(report), indent=2) + "\n"
        return text.encode()
    if format != "csv":
        raise DomainError(f"unknown report format {format!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in report.per_variation:
        writer.writerow(
            [
                *s.variation.half_units,
                str(parity(s.variation)),
                s.played,
                s.correct,
                _fmt(s.win_probability),
                _fmt(s.std_error),
                _fmt(s.zscore_vs_classical),
            ]
        )
    return buf.getvalue().encode()


def parse_report(data: bytes, format: str = "json") -> list[dict]:
    """Per-variation rows (half-units, parity, played, correct) from emitted bytes."""
    text = data.decode()
    if format == "json":
        return [
            {"half_units": (r["a"], r["b"], r["c"]), "parity": r["parity"], "played": r["played"], "correct": r["correct"]}
            for r in json.loads(text)["variations"]
        ]
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        {
            "half_units": tuple(int(r[f"variation_{k}_halfunits"]) for k in "abc"),
            "parity": r["parity"],
            "played": int(r["played"]),
            "correct": int(r["correct"]),
        }
        for r in rows
    ]
