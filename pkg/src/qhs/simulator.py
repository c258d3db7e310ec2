"""Exact left-register statistics for the inverse-DFT / oracle / DFT sandwich.

Two routes compute the same distribution. ``left_marginal`` groups the
domain by label and transforms one indicator vector per label; this is the
production path. ``full_state_evolve`` runs the steps literally on the dense
bipartite state and exists as a cross-check.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np

from .groups import Cyclic, DomainError, DomainSpec, Product, element_at, rational_str
from .oracle import OracleInstance, apply_oracle_unitary
from .tolerances import TOL


class SimulationError(RuntimeError):
    pass


def _label_transform(domain: DomainSpec, table: np.ndarray, L: int) -> np.ndarray:
    """Forward DFT of the scaled label indicators, shape (L, domain size)."""
    N = domain.size
    ind = np.zeros((L, N))
    ind[table, np.arange(N)] = 1.0 / np.sqrt(N)
    if isinstance(domain, Product):
        axes = tuple(range(1, domain.n + 1))
        out = np.fft.fftn(ind.reshape((L,) + domain.shape), axes=axes, norm="ortho")
        return out.reshape(L, N)
    return np.fft.fft(ind, axis=1, norm="ortho")


def _canonical_labels(table: np.ndarray) -> np.ndarray:
    """Relabel by order of first appearance."""
    _, first, inverse = np.unique(table, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.size)
    return rank[inverse.reshape(-1)]


@lru_cache(maxsize=128)
def _prob_for_partition(domain: DomainSpec, canon: bytes) -> np.ndarray:
    table = np.frombuffer(canon, dtype=np.int64)
    omega = _label_transform(domain, table, int(table.max()) + 1)
    prob = np.sum(np.abs(omega) ** 2, axis=0)
    prob.setflags(write=False)
    return prob


class SpectralDistribution:
    """Measurement distribution of the left register after the Fourier sandwich.

    ``prob[j]`` is the probability of frequency index j. ``omega[j]`` is the
    vector over labels whose squared norm is ``prob[j]``; it is computed on
    first access.
    """

    def __init__(self, domain: DomainSpec, prob: np.ndarray, oracle: Optional[OracleInstance] = None):
        self.domain = domain
        self.prob = np.asarray(prob, dtype=float)
        self._oracle = oracle

    @cached_property
    def omega(self) -> np.ndarray:
        """Shape (domain size, L)."""
        if self._oracle is None:
            raise SimulationError("no oracle attached; omega is unavailable")
        o = self._oracle
        return _label_transform(o.domain, o.table, o.label_count).T

    @cached_property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.prob)

    def total(self) -> float:
        return float(self.prob.sum())

    def frequency(self, j: int):
        if isinstance(self.domain, Cyclic):
            return self.domain.frequency(j)
        return element_at(j, self.domain)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "frequency", "probability"])
            for j, pj in enumerate(self.prob):
                f = self.frequency(j)
                fs = rational_str(f) if isinstance(self.domain, Cyclic) else " ".join(map(str, f))
                w.writerow([j, fs, repr(float(pj))])


def left_marginal(o: OracleInstance) -> SpectralDistribution:
    # The marginal depends only on the partition of the domain by label, so
    # results are cached on a canonical relabeling of the table.
    canon = _canonical_labels(o.table)
    prob = _prob_for_partition(o.domain, canon.tobytes())
    return SpectralDistribution(o.domain, prob, o)


def full_state_evolve(o: OracleInstance) -> np.ndarray:
    """Dense |psi_3> as an array of shape (domain size, L)."""
    N, L = o.domain.size, o.label_count
    if N * L > TOL.max_dense_entries:
        raise SimulationError(
            f"dense state would need {N * L} entries (limit {TOL.max_dense_entries}); "
            "use left_marginal instead"
        )
    psi = np.zeros((N, L), dtype=complex)
    psi[0, 0] = 1.0
    psi = _left_transform(psi, o.domain, inverse=True)
    psi = apply_oracle_unitary(psi, o)
    return _left_transform(psi, o.domain, inverse=False)


def _left_transform(psi: np.ndarray, domain: DomainSpec, inverse: bool) -> np.ndarray:
    if isinstance(domain, Product):
        f = np.fft.ifftn if inverse else np.fft.fftn
        L = psi.shape[1]
        shaped = psi.reshape(domain.shape + (L,))
        return f(shaped, axes=tuple(range(domain.n)), norm="ortho").reshape(-1, L)
    f = np.fft.ifft if inverse else np.fft.fft
    return f(psi, axis=0, norm="ortho")


def state_marginal(psi: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(psi) ** 2, axis=1)


def measure(dist: SpectralDistribution, rng, size: Optional[int] = None):
    """Inverse-CDF sample of frequency indices; one int, or an array if ``size``."""
    cdf = dist.cdf
    if cdf.size == 0 or cdf[-1] <= 0:
        raise SimulationError("cannot sample from an empty distribution")
    u = rng.random(size) * cdf[-1]
    j = np.searchsorted(cdf, u, side="right")
    j = np.minimum(j, cdf.size - 1)
    return int(j) if size is None else j.astype(np.int64)


@dataclass(frozen=True)
class BinnedOutcome:
    m: int
    Q: int

    def __post_init__(self):
        if self.Q < 1 or not 0 <= self.m < self.Q:
            raise ValueError(f"binned outcome needs 0 <= m < Q, got m={self.m}, Q={self.Q}")


def bin_frequency(j: int, d: DomainSpec, Q: int) -> BinnedOutcome:
    """m = floor(Q * y) for the grid frequency y = j*R/M, taken mod Q.

    The integer part of y carries no information about a period's
    denominator, so frequencies at or above one cycle per unit are folded
    back into [0, 1) before binning. Pure integer arithmetic.
    """
    if not isinstance(d, Cyclic) or d.grid is None:
        raise DomainError("bin_frequency needs a cyclic domain with a grid")
    if Q < 1:
        raise ValueError("Q must be positive")
    R = d.grid.samples_per_unit
    return BinnedOutcome((Q * j * R // d.M) % Q, Q)
