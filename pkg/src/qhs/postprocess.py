"""Classical recovery: continued fractions, gcd folding and linear algebra mod p."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Optional, Sequence

from .groups import gcd, is_prime


# --- continued fractions -----------------------------------------------------


@dataclass(frozen=True)
class ContinuedFraction:
    quotients: tuple[int, ...]

    def __post_init__(self):
        q = tuple(int(a) for a in self.quotients)
        if not q:
            raise ValueError("a continued fraction needs at least one quotient")
        if q[0] < 0 or any(a < 1 for a in q[1:]):
            raise ValueError(f"invalid quotients {q}")
        if len(q) > 1 and q[-1] < 2:
            raise ValueError(f"non-canonical expansion {q}: last quotient must be >= 2")
        object.__setattr__(self, "quotients", q)

    def value(self) -> Fraction:
        x = Fraction(self.quotients[-1])
        for a in reversed(self.quotients[:-1]):
            x = a + 1 / x
        return x

    def __str__(self):
        head, *tail = self.quotients
        return f"[{head}; {', '.join(map(str, tail))}]" if tail else f"[{head}]"


def cf_expand(m: int, Q: int) -> ContinuedFraction:
    """Canonical continued fraction of m/Q by Euclid's algorithm."""
    if Q < 1 or m < 0:
        raise ValueError("cf_expand needs m >= 0 and Q >= 1")
    quotients = []
    while Q:
        a, r = divmod(m, Q)
        quotients.append(a)
        m, Q = Q, r
    return ContinuedFraction(tuple(quotients))


def convergents(cf: ContinuedFraction) -> list[Fraction]:
    h_prev, h = 1, cf.quotients[0]
    k_prev, k = 0, 1
    out = [Fraction(h, k)]
    for a in cf.quotients[1:]:
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        out.append(Fraction(h, k))
    return out


def recover_rational(outcome, denom_bound: int) -> Optional[Fraction]:
    """Best convergent of m/Q with denominator at most ``denom_bound``.

    ``outcome`` is anything with integer attributes ``m`` and ``Q``. When
    Q >= 2 * denom_bound**2 the returned fraction is the unique n/P with
    P <= denom_bound lying within 1/Q of m/Q. Returns None if only 0/1
    qualifies for a nonzero m.
    """
    if denom_bound < 1:
        raise ValueError("denom_bound must be positive")
    m, Q = outcome.m, outcome.Q
    best = None
    for c in convergents(cf_expand(m, Q)):
        if c.denominator > denom_bound:
            break
        best = c
    if best == 0 and m != 0:
        return None
    return best


def gcd_recover(outcomes: Sequence[int]) -> int:
    """gcd of all outcomes; 0 means every outcome was 0 and the caller should retry."""
    if not outcomes:
        raise ValueError("gcd_recover needs at least one outcome")
    return reduce(gcd, (int(x) for x in outcomes), 0)


# --- linear algebra over Z_p -------------------------------------------------


def rref_mod_p(rows: Iterable[Sequence[int]], p: int, n: int) -> list[tuple[int, ...]]:
    """Reduced row-echelon form mod p, zero rows dropped."""
    work = [[int(x) % p for x in r] for r in rows]
    for r in work:
        if len(r) != n:
            raise ValueError(f"vector {r} does not have length {n}")
    pivot_row = 0
    for col in range(n):
        pivot = next((i for i in range(pivot_row, len(work)) if work[i][col]), None)
        if pivot is None:
            continue
        work[pivot_row], work[pivot] = work[pivot], work[pivot_row]
        inv = pow(work[pivot_row][col], -1, p)
        work[pivot_row] = [(x * inv) % p for x in work[pivot_row]]
        for i in range(len(work)):
            f = work[i][col]
            if i != pivot_row and f:
                work[i] = [(a - f * b) % p for a, b in zip(work[i], work[pivot_row])]
        pivot_row += 1
        if pivot_row == len(work):
            break
    return [tuple(r) for r in work[:pivot_row]]


def rank_mod_p(rows: Iterable[Sequence[int]], p: int, n: int) -> int:
    return len(rref_mod_p(rows, p, n))


@dataclass(frozen=True)
class SubspaceBasis:
    """Subspace of Z_p^n held in canonical reduced row-echelon form.

    Two instances compare equal iff they span the same subspace.
    """

    p: int
    n: int
    vectors: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        canon = tuple(rref_mod_p(self.vectors, self.p, self.n))
        if len(canon) != len(self.vectors):
            raise ValueError("basis vectors are linearly dependent mod p")
        object.__setattr__(self, "vectors", canon)

    @classmethod
    def span(cls, p: int, n: int, vectors: Iterable[Sequence[int]]) -> "SubspaceBasis":
        return cls(p, n, tuple(rref_mod_p(vectors, p, n)))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def contains(self, v: Sequence[int]) -> bool:
        return rank_mod_p(list(self.vectors) + [v], self.p, self.n) == self.dim


def orthogonal_complement(b: SubspaceBasis) -> SubspaceBasis:
    """Basis of {y : x . y == 0 mod p for all x in span(b)}."""
    p, n = b.p, b.n
    pivots = [next(i for i, x in enumerate(row) if x) for row in b.vectors]
    free = [c for c in range(n) if c not in pivots]
    out = []
    for f in free:
        y = [0] * n
        y[f] = 1
        for row, pc in zip(b.vectors, pivots):
            y[pc] = (-row[f]) % p
        out.append(y)
    return SubspaceBasis.span(p, n, out)


class SubspaceAccumulator:
    """Streaming span builder for samples drawn from an unknown subspace.

    Single owner; not safe to share while accumulating.
    """

    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        self.rows: list[tuple[int, ...]] = []
        self.samples_seen = 0
        self.stabilized_at = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def add(self, v: Sequence[int]) -> bool:
        """Add one sample; True if it raised the rank."""
        v = tuple(int(x) for x in v)
        if len(v) != self.n or any(not 0 <= x < self.p for x in v):
            raise ValueError(f"sample {v} is not an element of Z_{self.p}^{self.n}")
        self.samples_seen += 1
        new = rref_mod_p(self.rows + [v], self.p, self.n)
        if len(new) > len(self.rows):
            self.rows = new
            self.stabilized_at = self.samples_seen
            return True
        return False

    def span(self) -> SubspaceBasis:
        return SubspaceBasis(self.p, self.n, tuple(self.rows))

    def candidate(self) -> SubspaceBasis:
        return orthogonal_complement(self.span())


def recover_subspace(
    p: int,
    n: int,
    samples: Iterable[Sequence[int]],
    max_samples: int,
    patience: Optional[int] = None,
    verify: Optional[Callable[[SubspaceBasis], bool]] = None,
    accumulator: Optional[SubspaceAccumulator] = None,
) -> Optional[SubspaceBasis]:
    """Recover V from samples of its orthogonal complement.

    Without ``verify``, the complement of the running span is returned once
    ``patience`` consecutive samples (default n) add no rank. With
    ``verify``, the candidate is checked each time the span changes (and
    before the first sample) and returned as soon as it passes. None if
    ``max_samples`` run out first.
    """
    acc = accumulator if accumulator is not None else SubspaceAccumulator(p, n)
    patience = n if patience is None else patience
    if verify is not None and verify(acc.candidate()):
        return acc.candidate()
    idle = 0
    it = iter(samples)
    while acc.samples_seen < max_samples:
        v = next(it, None)
        if v is None:
            break
        grew = acc.add(v)
        if verify is not None:
            if grew and verify(acc.candidate()):
                return acc.candidate()
            continue
        idle = 0 if grew else idle + 1
        # a full-rank span cannot grow further
        if idle >= patience or acc.rank == n:
            return acc.candidate()
    return None
