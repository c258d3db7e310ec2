"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line."""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE
from oracles import all_subspaces, basis_of, perp_set
from qhs.algorithms import run_alg_r, run_alg_subspace
from qhs.config import parse_config
from qhs.groups import Cyclic, element_at
from qhs.harness import run_experiment
from qhs.oracle import make_periodic_oracle, make_subspace_oracle
from qhs.postprocess import SubspaceBasis
from qhs.simulator import BinnedOutcome, full_state_evolve, left_marginal, state_marginal
from qhs.postprocess import recover_rational
from qhs.spectral import AmplitudeVector, dft

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(key, title, budget_s):
    t0 = time.perf_counter()
    detail = {}
    try:
        yield detail
    except BaseException:
        ACCEPTANCE[key] = f"FAIL {key} {title} {detail.get('msg', '')}".rstrip()
        raise
    elapsed = time.perf_counter() - t0
    ok = elapsed < budget_s
    ACCEPTANCE[key] = f"{'PASS' if ok else 'FAIL'} {key} {title} ({elapsed:.1f}s < {budget_s}s) {detail.get('msg', '')}".rstrip()
    assert ok, f"{key} took {elapsed:.1f}s, budget {budget_s}s"


def exact_coprime_probability(count):
    ells = range(count)
    hits = sum(1 for a in ells for b in ells if math.gcd(a, b) == 1)
    return hits / count**2


def test_c1_zeta2_reproduction():
    with criterion("C1", "zeta(2)^-1 two-run gcd success", 60) as info:
        Q, a, trials = 4096, 16, 20_000
        exact = exact_coprime_probability(Q // a)
        cfg = parse_config(
            {"algorithm": "alg-circle", "Q": Q, "a": a, "runs": 2, "trials": trials, "master_seed": 2024}
        )
        stats = run_experiment(cfg)
        info["msg"] = f"empirical={stats.success_rate:.4f} exact={exact:.5f} 6/pi^2={6 / math.pi**2:.4f}"
        assert abs(stats.success_rate - exact) <= 0.01
        assert abs(exact - 0.6079) <= 0.03


def test_c2_continued_fraction_guarantee():
    with criterion("C2", "continued-fraction recovery, P in [2,100]", 10) as info:
        failures, checked = 0, 0
        for P in range(2, 101):
            Q = 2 * P * P
            for n in range(1, P):
                if math.gcd(n, P) != 1:
                    continue
                checked += 1
                got = recover_rational(BinnedOutcome(Q * n // P, Q), P)
                failures += got is None or (got.numerator, got.denominator) != (n, P)
        info["msg"] = f"checked={checked} failures={failures}"
        assert failures == 0


def test_c3_spectral_comb_law():
    with criterion("C3", "spectral comb law, M <= 64", 30) as info:
        rng = np.random.default_rng(3)
        cases = 0
        for M in range(1, 65):
            for d in (d for d in range(1, M + 1) if M % d == 0):
                o = make_periodic_oracle(M, d, injective=True, rng=rng)
                prob = left_marginal(o).prob
                comb = np.zeros(M, bool)
                comb[:: M // d] = True
                assert np.all(np.abs(prob[comb] - 1 / d) < 1e-12)
                assert np.all(prob[~comb] < 1e-12)
                assert np.all(np.abs(prob - state_marginal(full_state_evolve(o))) < 1e-12)
                cases += 1
        info["msg"] = f"cases={cases}"


def test_c4_alg_r_always_succeeds():
    with criterion("C4", "Alg_R end-to-end success, P in [2,30] x 100 seeds", 60) as info:
        failures = 0
        for P in range(2, 31):
            for seed in range(100):
                failures += not run_alg_r(P, 1, 21 * P, 2 * P * P, seed).success
        info["msg"] = f"trials=2900 failures={failures}"
        assert failures == 0


def test_c5_hidden_subspace():
    with criterion("C5", "hidden subspace of Z_2^n, n <= 4", 120) as info:
        subspaces, worst_tv = 0, 0.0
        for n in range(1, 5):
            for S in all_subspaces(2, n):
                basis = basis_of(2, n, S)
                perp = perp_set(2, n, basis)
                o = make_subspace_oracle(2, n, basis, rng=0)
                prob = left_marginal(o).prob
                uniform = np.array([1 / len(perp) if element_at(i, o.domain) in perp else 0 for i in range(2**n)])
                tv = 0.5 * np.abs(prob - uniform).sum()
                worst_tv = max(worst_tv, tv)
                assert tv < 1e-12
                target = SubspaceBasis.span(2, n, basis)
                used = []
                for seed in range(100):
                    rec = run_alg_subspace(2, n, basis, 256, seed)
                    assert rec.success, (n, basis, seed)
                    assert SubspaceBasis.span(2, n, rec.result["basis"]) == target
                    used.append(rec.result["samples_used"])
                assert np.mean(used) <= (n - len(basis)) + n + 1
                subspaces += 1
        info["msg"] = f"subspaces={subspaces} worst_tv={worst_tv:.1e}"


def _primes_upto(n):
    sieve = np.ones(n + 1, bool)
    sieve[:2] = False
    for k in range(2, int(n**0.5) + 1):
        sieve[k * k :: k] = False
    return np.flatnonzero(sieve)


def test_c6_numerical_hygiene():
    with criterion("C6", "DFT unitarity / inverse / fast==direct", 60) as info:
        rng = np.random.default_rng(6)
        primes = _primes_upto(4096)
        sizes = sorted({2, 3, 4, 7, 97, 509, 1021, 4093, *[2**k for k in range(1, 13)], 6, 60, 360, 1000, 2310, 4095, 3000, *rng.choice(primes, 5).tolist()})
        worst = 0.0
        for M in sizes:
            v = rng.normal(size=M) + 1j * rng.normal(size=M)
            v /= np.linalg.norm(v)
            av = AmplitudeVector(v, Cyclic(int(M)))
            f = dft(av)
            err = abs(f.norm() - 1.0)
            worst = max(worst, err)
            assert err < 1e-12
            back = dft(f, "inverse").entries
            assert np.max(np.abs(back - v)) < 1e-12
            if M <= 512:
                direct = dft(av, method="direct").entries
                assert np.max(np.abs(direct - f.entries)) < 1e-12
        info["msg"] = f"sizes={len(sizes)} worst_norm_err={worst:.1e}"


def test_c7_reproducible_run_logs(tmp_path, capsys):
    from qhs.cli import main

    def strip(path):
        lines = []
        for line in path.read_text().splitlines():
            d = json.loads(line)
            d.pop("elapsed_s")
            lines.append(json.dumps(d, separators=(",", ":")))
        return "\n".join(lines).encode()

    with criterion("C7", "byte-identical run logs across executions", 60) as info:
        configs = {
            "alg-r": {"algorithm": "alg-r", "P": 7, "T": 147, "Q": 98, "trials": 200, "master_seed": 11},
            "alg-circle": {"algorithm": "alg-circle", "Q": 1024, "a": 16, "trials": 500, "master_seed": 42},
            "alg-subspace": {"algorithm": "alg-subspace", "p": 3, "n": 3, "V": [[1, 2, 0]], "trials": 200, "master_seed": 5},
            "dual-shor-sweep": {"algorithm": "dual-shor-sweep", "Q": 256, "divisors": [2, 4, 8], "trials": 50, "master_seed": 8},
        }
        for name, body in configs.items():
            cfg = tmp_path / f"{name}.json"
            cfg.write_text(json.dumps(body))
            logs = []
            for run in ("first", "second"):
                out = tmp_path / name / run
                assert main([name, "--config", str(cfg), "--out", str(out)]) == 0
                logs.append(strip(out / "trials.jsonl"))
                assert (out / "summary.json").exists()
            assert logs[0] == logs[1]
            assert (tmp_path / name / "first" / "summary.json").read_bytes() == (
                tmp_path / name / "second" / "summary.json"
            ).read_bytes()
        capsys.readouterr()
        info["msg"] = f"configs={len(configs)}"
