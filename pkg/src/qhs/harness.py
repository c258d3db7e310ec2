"""Batch execution, aggregation and reporting.

Per-trial seeds are ``derive_seed(master_seed, index)``: the first 64-bit
word of ``numpy.random.SeedSequence([master_seed, index])``. Serial and
parallel runs therefore produce identical logs.

Run log (``trials.jsonl``): one TrialRecord per line with fields in the
order algorithm, config, seed, outcomes, result, success, retry, elapsed_s.
Only ``elapsed_s`` varies between executions of the same config.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .algorithms import PIPELINES, TrialRecord, replay

CSV_HEADER = ["index", "algorithm", "seed", "success", "retry", "first_outcome", "result"]
LOG_NAME = "trials.jsonl"


class TrialError(RuntimeError):
    def __init__(self, index: int, cause: BaseException):
        self.index, self.cause = index, cause
        super().__init__(f"trial {index} failed: {cause!r}")

    def __reduce__(self):
        return (TrialError, (self.index, self.cause))


class ReportError(OSError):
    pass


def derive_seed(master_seed: int, index: int) -> int:
    ss = np.random.SeedSequence([master_seed, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def dumps_record(record: TrialRecord, timing: bool = True) -> str:
    return json.dumps(record.to_dict(timing=timing), separators=(",", ":"))


def read_log(path) -> list[TrialRecord]:
    with open(path) as fh:
        return [TrialRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


def log_status(path, expected: int) -> tuple[int, bool]:
    """(records present, complete?) for a run log."""
    try:
        with open(path) as fh:
            count = sum(1 for line in fh if line.strip())
    except FileNotFoundError:
        count = 0
    return count, count == expected


# --- aggregation -------------------------------------------------------------


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def first_outcome(record: TrialRecord) -> str:
    if not record.outcomes:
        return "none"
    x = record.outcomes[0]
    if isinstance(x, dict):
        return str(x["j"])
    if isinstance(x, list):
        return " ".join(map(str, x))
    return str(x)


@dataclass
class SummaryStats:
    trials: int = 0
    successes: int = 0
    success_rate: Optional[float] = None
    ci95: Optional[tuple[float, float]] = None
    retries: int = 0
    histogram: dict = field(default_factory=dict)
    mean_samples: Optional[float] = None
    coprimality_rate: Optional[float] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["ci95"] is not None:
            d["ci95"] = list(d["ci95"])
        return d


def summarize(records: Iterable[TrialRecord]) -> SummaryStats:
    """Aggregate statistics; independent of record order."""
    records = list(records)
    n = len(records)
    s = SummaryStats(trials=n)
    if n == 0:
        return s
    s.successes = sum(r.success for r in records)
    s.success_rate = s.successes / n
    s.ci95 = wilson_interval(s.successes, n)
    s.retries = sum(r.retry for r in records)
    hist: dict[str, int] = {}
    for r in records:
        key = first_outcome(r)
        hist[key] = hist.get(key, 0) + 1
    s.histogram = dict(sorted(hist.items(), key=lambda kv: (len(kv[0]), kv[0])))
    algs = {r.algorithm for r in records}
    if algs == {"alg-subspace"}:
        s.mean_samples = sum(r.result["samples_used"] for r in records) / n
    if algs == {"alg-circle"}:
        # gcd of the sampled multiples equals a exactly when the multipliers are coprime
        s.coprimality_rate = sum(r.result["gcd"] == r.config["a"] for r in records) / n
    return s


# --- reports -----------------------------------------------------------------


def emit_report(records: Iterable[TrialRecord], fmt: str, destination) -> None:
    """Write a summary report. Timing fields are left out so reports diff cleanly.

    json: an object with "summary" and "trials" (one entry per record).
    csv: header CSV_HEADER and one row per record.
    """
    records = list(records)
    dest = Path(destination)
    try:
        if fmt == "json":
            body = {
                "summary": summarize(records).to_dict(),
                "trials": [r.to_dict(timing=False) for r in records],
            }
            dest.write_text(json.dumps(body, indent=1) + "\n")
        elif fmt == "csv":
            with open(dest, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(CSV_HEADER)
                for i, r in enumerate(records):
                    w.writerow(
                        [i, r.algorithm, r.seed, int(r.success), int(r.retry), first_outcome(r),
                         json.dumps(r.result, separators=(",", ":"))]
                    )
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    except OSError as exc:
        raise ReportError(f"cannot write report to {dest}: {exc}") from exc


# --- execution ---------------------------------------------------------------


def _execute(job: tuple[int, str, dict, int]) -> TrialRecord:
    index, algorithm, params, seed = job
    try:
        return PIPELINES[algorithm](params, seed)
    except Exception as exc:
        raise TrialError(index, exc) from exc


def iter_trials(cfg):
    jobs = [(i, alg, params, derive_seed(cfg.master_seed, i)) for i, (alg, params) in enumerate(cfg.trial_params())]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            yield from pool.map(_execute, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers)))
    else:
        for job in jobs:
            yield _execute(job)


def run_experiment(cfg, out_dir=None) -> SummaryStats:
    """Run every trial of ``cfg``, streaming records to the run log.

    ``out_dir`` (or ``cfg.out_dir``) receives ``trials.jsonl`` and
    ``summary.json`` / ``summary.csv``. With no output directory nothing is
    written and only the statistics are returned.
    """
    out = out_dir if out_dir is not None else cfg.out_dir
    records: list[TrialRecord] = []
    if out is None:
        records.extend(iter_trials(cfg))
        return summarize(records)
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        log = open(out / LOG_NAME, "w")
    except OSError as exc:
        raise ReportError(f"cannot open run log in {out}: {exc}") from exc
    with log:
        for rec in iter_trials(cfg):
            log.write(dumps_record(rec) + "\n")
            log.flush()
            records.append(rec)
    emit_report(records, cfg.format, out / f"summary.{cfg.format}")
    return summarize(records)


def replay_log(path) -> tuple[int, list[int]]:
    """Re-execute every record of a run log; returns (count, mismatched indices)."""
    records = read_log(path)
    bad = [
        i for i, r in enumerate(records)
        if replay(r).to_dict(timing=False) != r.to_dict(timing=False)
    ]
    return len(records), bad
