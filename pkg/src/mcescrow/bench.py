"""Recovery-cost sweep: how long one prime-side logarithm takes as keys grow.

Each trial builds a fresh form prime whose subgroup order (p-1)/2 has the
requested bit length, draws a uniform exponent, and times one solve. Group
operation counts are recorded next to wall time so the square-root scaling
can be checked without trusting the clock.
"""

from __future__ import annotations

import csv
import io
import random
import statistics
import time
from dataclasses import dataclass

from .dlog import Algorithm, DlogInstance, OpCounter, solve
from .keygen import GENERATOR, Residue, SystemParams, generate_form_prime

CSV_HEADER = ("subgroup_bits", "algorithm", "trial", "wall_time_ms", "group_ops")


@dataclass(frozen=True)
class BenchRecord:
    subgroup_bits: int
    algorithm: str
    trial: int
    wall_time_ms: float
    group_ops: int


def make_instance(subgroup_bits: int, rng: random.Random) -> tuple[DlogInstance, int]:
    """Random instance in the order-(p-1)/2 subgroup of 16 mod a fresh form prime."""
    params = SystemParams(modulus_bits=max(8, 2 * (subgroup_bits + 1)), strict_plus_form=False)
    p = generate_form_prime(subgroup_bits + 1, Residue.P3MOD8, params, rng)
    order = (p - 1) // 2
    exponent = rng.randrange(order)
    return DlogInstance(GENERATOR % p, pow(GENERATOR, exponent, p), p, order), exponent


def run_partiality(
    bits: list[int],
    trials: int,
    algorithm: Algorithm,
    seed: int | None = None,
) -> list[BenchRecord]:
    rng = random.Random(seed)
    records = []
    for b in bits:
        for trial in range(trials):
            inst, exponent = make_instance(b, rng)
            counter = OpCounter()
            solver_rng = random.Random(rng.getrandbits(64))
            start = time.perf_counter()
            found = solve(inst, algorithm, solver_rng, counter)
            elapsed = time.perf_counter() - start
            if found != exponent:
                raise AssertionError(f"solver returned {found}, expected {exponent}")
            records.append(BenchRecord(b, algorithm.value, trial, elapsed * 1000.0, max(counter.group_ops, 1)))
    return records


def medians(records: list[BenchRecord]) -> dict[int, tuple[float, float]]:
    """Per subgroup size: (median wall time in ms, median group ops)."""
    by_bits: dict[int, list[BenchRecord]] = {}
    for rec in records:
        by_bits.setdefault(rec.subgroup_bits, []).append(rec)
    return {
        b: (statistics.median(r.wall_time_ms for r in recs), statistics.median(r.group_ops for r in recs))
        for b, recs in sorted(by_bits.items())
    }


def to_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow((rec.subgroup_bits, rec.algorithm, rec.trial, f"{rec.wall_time_ms:.6f}", rec.group_ops))
    return buf.getvalue()
