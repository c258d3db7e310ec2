"""End-to-end pipelines: oracle -> simulated measurement -> classical recovery.

Every pipeline takes ``rng`` as either an integer seed or a numpy Generator
(from which a 64-bit seed is drawn), and returns a TrialRecord carrying the
seed so the trial can be replayed exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .groups import Grid, element_at, index_of, rational_str
from .oracle import (
    OracleError,
    OracleInstance,
    Period,
    Subspace,
    make_periodic_oracle,
    make_subspace_oracle,
)
from .postprocess import SubspaceAccumulator, SubspaceBasis, gcd_recover, recover_rational, recover_subspace
from .simulator import bin_frequency, left_marginal, measure


class ConfigError(ValueError):
    """Violated algorithm precondition; ``violations`` lists every failure."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


SEED_BITS = 64


@dataclass
class TrialRecord:
    algorithm: str
    config: dict
    seed: int
    outcomes: list
    result: Any
    success: bool
    retry: bool = False
    elapsed_s: float = field(default=0.0, compare=False)

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("elapsed_s")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        return cls(**d)


def _seeded(rng) -> tuple[int, np.random.Generator]:
    if isinstance(rng, np.random.Generator):
        seed = int(rng.integers(0, 2**63, dtype=np.int64))
    else:
        seed = int(rng)
        if not 0 <= seed < 2**SEED_BITS:
            raise ConfigError(f"seed must lie in [0, 2^{SEED_BITS})")
    return seed, np.random.default_rng(seed)


# --- ground-truth scoring (the only readers of oracle.ground_truth) ---------


def _true_period(o: OracleInstance) -> int:
    truth = o.ground_truth
    assert isinstance(truth, Period)
    return truth.d


def _true_subspace(o: OracleInstance) -> SubspaceBasis:
    truth = o.ground_truth
    assert isinstance(truth, Subspace)
    return truth.basis


# --- Alg on a grid over R ----------------------------------------------------


def check_alg_r(P: int, R: int, T: int, Q: int) -> list[str]:
    errors = []
    for name, val in (("P", P), ("R", R), ("T", T), ("Q", Q)):
        if val < 1:
            errors.append(f"{name} >= 1 violated")
    if errors:
        return errors
    if T % P:
        errors.append("P divides T violated")
    if Q < 2 * P * P:
        errors.append("Q >= 2*P^2 violated")
    return errors


def _is_period(o: OracleInstance, shift: int) -> bool:
    return bool(np.array_equal(np.roll(o.table, -shift), o.table))


def run_alg_r(P: int, R: int, T: int, Q: int, rng, max_rounds: int = 32) -> TrialRecord:
    """Period finding on a window of T units of the real line, R samples per unit.

    Each round measures one grid frequency, bins it to m/Q and recovers the
    best convergent with denominator <= floor(sqrt(Q/2)). The running period
    candidate is the lcm of the recovered denominators; a round ends the
    trial once the candidate is confirmed by querying the oracle at a shift
    of candidate*R samples. ``max_rounds=1`` gives the single-shot variant.
    """
    errors = check_alg_r(P, R, T, Q)
    if max_rounds < 1:
        errors.append("max_rounds >= 1 violated")
    if errors:
        raise ConfigError(errors)
    t0 = time.perf_counter()
    seed, gen = _seeded(rng)
    config = {"P": P, "R": R, "T": T, "Q": Q, "max_rounds": max_rounds}
    M = T * R
    o = make_periodic_oracle(M, P * R, injective=True, rng=gen, grid=Grid(R))
    dist = left_marginal(o)
    bound = math.isqrt(Q // 2)

    outcomes, fractions = [], []
    candidate, confirmed = 1, False
    for _ in range(max_rounds):
        j = measure(dist, gen)
        b = bin_frequency(j, o.domain, Q)
        frac = recover_rational(b, bound)
        outcomes.append({"j": j, "m": b.m})
        fractions.append(None if frac is None else rational_str(frac))
        if frac is not None:
            candidate = math.lcm(candidate, frac.denominator)
        if _is_period(o, (candidate * R) % M):
            confirmed = True
            break
    period = candidate if confirmed else None
    return TrialRecord(
        "alg-r",
        config,
        seed,
        outcomes,
        {"fractions": fractions, "period": period},
        success=period is not None and period * R == _true_period(o),
        elapsed_s=time.perf_counter() - t0,
    )


# --- dual-Shor / circle ------------------------------------------------------


def check_alg_circle(Q: int, a: int, runs: int) -> list[str]:
    errors = []
    if Q < 1:
        errors.append("Q >= 1 violated")
    if a < 1:
        errors.append("a >= 1 violated")
    if runs < 2:
        errors.append("runs >= 2 violated")
    if Q >= 1 and a >= 1 and Q % a:
        errors.append(f"a divides Q violated ({a} does not divide {Q})")
    return errors


def run_alg_circle(Q: int, a: int, runs: int, rng) -> TrialRecord:
    """Recover a from `runs` samples on Z_Q of an oracle with period Q/a.

    Every sampled index is a multiple of a; the estimate is their gcd. An
    all-zero draw yields 0 and is recorded as a failure with ``retry`` set.
    """
    errors = check_alg_circle(Q, a, runs)
    if errors:
        raise ConfigError(errors)
    t0 = time.perf_counter()
    seed, gen = _seeded(rng)
    o = make_periodic_oracle(Q, Q // a, injective=True, rng=gen)
    dist = left_marginal(o)
    samples = [int(x) for x in measure(dist, gen, size=runs)]
    g = gcd_recover(samples)
    return TrialRecord(
        "alg-circle",
        {"Q": Q, "a": a, "runs": runs},
        seed,
        samples,
        {"gcd": g},
        success=g != 0 and g == Q // _true_period(o),
        retry=g == 0,
        elapsed_s=time.perf_counter() - t0,
    )


def run_dual_shor_sweep(Q: int, divisor_set: Sequence[int], trials: int, rng, runs: int = 2) -> list[TrialRecord]:
    bad = [a for a in divisor_set if a < 1 or Q % a]
    if bad:
        raise ConfigError([f"a divides Q violated ({a} does not divide {Q})" for a in bad])
    _, gen = _seeded(rng)
    return [run_alg_circle(Q, a, runs, gen) for a in divisor_set for _ in range(trials)]


# --- hidden subspace of Z_p^n -----------------------------------------------


def run_alg_subspace(
    p: int,
    n: int,
    V: Sequence[Sequence[int]],
    max_samples: int,
    rng,
    patience: Optional[int] = None,
    verify: bool = True,
) -> TrialRecord:
    """Recover the hidden subspace V from samples of its orthogonal complement.

    With ``verify`` (default) each candidate is checked with one oracle
    query per basis vector b (is phi(b) == phi(0)?) and sampling stops as
    soon as it passes. With ``verify=False`` the patience rule alone decides.
    """
    if max_samples < 1:
        raise ConfigError("max_samples >= 1 violated")
    t0 = time.perf_counter()
    seed, gen = _seeded(rng)
    try:
        o = make_subspace_oracle(p, n, V, rng=gen)
    except (OracleError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    dist = left_marginal(o)
    zero = o.query(0)
    outcomes: list[list[int]] = []

    def stream():
        while True:
            v = list(element_at(measure(dist, gen), o.domain))
            outcomes.append(v)
            yield v

    def check(candidate: SubspaceBasis) -> bool:
        return all(o.query(index_of(b, o.domain)) == zero for b in candidate.vectors)

    acc = SubspaceAccumulator(p, n)
    found = recover_subspace(
        p, n, stream(), max_samples, patience=patience, verify=check if verify else None, accumulator=acc
    )
    result = {
        "basis": None if found is None else [list(v) for v in found.vectors],
        "samples_used": acc.samples_seen,
        "stabilized_at": acc.stabilized_at,
    }
    return TrialRecord(
        "alg-subspace",
        {"p": p, "n": n, "V": [list(v) for v in V], "max_samples": max_samples, "patience": patience, "verify": verify},
        seed,
        outcomes,
        result,
        success=found is not None and found == _true_subspace(o),
        elapsed_s=time.perf_counter() - t0,
    )


PIPELINES = {
    "alg-r": lambda c, seed: run_alg_r(c["P"], c["R"], c["T"], c["Q"], seed, max_rounds=c.get("max_rounds", 32)),
    "alg-circle": lambda c, seed: run_alg_circle(c["Q"], c["a"], c["runs"], seed),
    "alg-subspace": lambda c, seed: run_alg_subspace(
        c["p"], c["n"], c["V"], c["max_samples"], seed, patience=c.get("patience"), verify=c.get("verify", True)
    ),
}


def replay(record: TrialRecord) -> TrialRecord:
    """Re-run a trial from its config snapshot and seed."""
    return PIPELINES[record.algorithm](record.config, record.seed)
