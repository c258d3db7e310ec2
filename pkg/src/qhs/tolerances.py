"""Numerical tolerance constants used across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    amplitude: float = 1e-12
    probability_sum: float = 1e-12
    support: float = 1e-12
    # dense bipartite states are refused above this many entries
    max_dense_entries: int = 2**20


TOL = Tolerances()
