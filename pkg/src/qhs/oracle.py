"""Hidden-structure functions as total lookup tables.

An oracle maps every domain element to a label in [0, L). Its hidden
structure (a period on Z_M, or a subspace of Z_p^n) rides along in
``ground_truth`` for scoring and verification only; the algorithm pipelines
never read it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .groups import Cyclic, DomainError, DomainSpec, Grid, Product, domain_from_dict
from .postprocess import SubspaceBasis, rank_mod_p


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class Period:
    d: int


@dataclass(frozen=True)
class Subspace:
    basis: SubspaceBasis


HiddenStructure = Union[Period, Subspace]


@dataclass(frozen=True, eq=False)
class OracleInstance:
    domain: DomainSpec
    table: np.ndarray
    label_count: int
    ground_truth: HiddenStructure = field(repr=False)
    injective: bool = True

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64).reshape(-1)
        if table.size != self.domain.size:
            raise OracleError(f"table has {table.size} entries, domain has {self.domain.size}")
        if self.label_count < 1:
            raise OracleError("label_count must be positive")
        if table.size and (table.min() < 0 or table.max() >= self.label_count):
            raise OracleError(f"labels must lie in [0, {self.label_count})")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def query(self, index: int) -> int:
        return int(self.table[index])


def _default_rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def _period_of(table: np.ndarray) -> int:
    M = table.size
    for d in range(1, M + 1):
        if M % d == 0 and np.array_equal(table[d:], table[:-d]):
            return d
    return M


def make_periodic_oracle(
    M: int,
    d: int,
    injective: bool = True,
    rng=None,
    grid: Optional[Grid] = None,
) -> OracleInstance:
    """Oracle on Z_M with minimal period exactly d.

    Injective oracles label the d residues by a random permutation of
    range(d). Otherwise labels are drawn from fewer than d values (at least
    two) and redrawn until the minimal period is d.
    """
    if d < 1 or M < 1:
        raise OracleError("M and d must be positive")
    if M % d:
        raise OracleError(f"period must divide domain size ({d} does not divide {M})")
    rng = _default_rng(rng)
    domain = Cyclic(M, grid)
    if injective or d == 1:
        block = rng.permutation(d)
        L = d
    else:
        L = max(2, d // 2)
        for _ in range(10_000):
            block = rng.integers(0, L, size=d)
            if _period_of(block) == d:
                break
        else:
            raise OracleError(f"could not draw a non-injective block of period {d}")
    table = np.tile(block, M // d)
    return OracleInstance(domain, table, L, Period(d), injective=injective or d == 1)


def _coset_representatives(basis: SubspaceBasis) -> np.ndarray:
    """Flat index of the canonical coset representative of every element."""
    p, n = basis.p, basis.n
    coords = np.indices((p,) * n).reshape(n, -1).T.copy()
    for row in basis.vectors:
        c = next(i for i, x in enumerate(row) if x)
        coords = (coords - coords[:, c : c + 1] * np.asarray(row)) % p
    weights = p ** np.arange(n - 1, -1, -1)
    return coords @ weights


def make_subspace_oracle(p: int, n: int, basis: Sequence[Sequence[int]], rng=None) -> OracleInstance:
    """Oracle on Z_p^n constant on cosets of span(basis), distinct across them."""
    domain = Product(p, n)
    basis = [tuple(int(x) % p for x in v) for v in basis]
    if rank_mod_p(basis, p, n) != len(basis):
        raise OracleError("basis vectors are linearly dependent mod p")
    V = SubspaceBasis.span(p, n, basis)
    rng = _default_rng(rng)
    reps = _coset_representatives(V)
    uniq, inverse = np.unique(reps, return_inverse=True)
    labels = rng.permutation(uniq.size)
    return OracleInstance(domain, labels[inverse], int(uniq.size), Subspace(V), injective=True)


def minimal_period(o: OracleInstance) -> int:
    if not isinstance(o.domain, Cyclic):
        raise DomainError("minimal_period needs a cyclic domain")
    return _period_of(o.table)


def verify_hidden_structure(o: OracleInstance) -> bool:
    """True iff the table factors through the cosets of the claimed structure.

    When the oracle claims injectivity, distinct cosets must also carry
    distinct labels.
    """
    truth = o.ground_truth
    table = o.table
    if isinstance(truth, Period):
        if not isinstance(o.domain, Cyclic):
            return False
        M, d = o.domain.M, truth.d
        if d < 1 or M % d:
            return False
        if not np.array_equal(table, np.tile(table[:d], M // d)):
            return False
        if _period_of(table) != d:
            return False
        if o.injective and np.unique(table[:d]).size != d:
            return False
        return True
    if isinstance(truth, Subspace):
        V = truth.basis
        if not isinstance(o.domain, Product) or (V.p, V.n) != (o.domain.p, o.domain.n):
            return False
        reps = _coset_representatives(V)
        if not np.array_equal(table, table[reps]):
            return False
        if o.injective and np.unique(table[np.unique(reps)]).size != np.unique(reps).size:
            return False
        return True
    return False


def apply_oracle_unitary(state: np.ndarray, o: OracleInstance) -> np.ndarray:
    """|x>|y> -> |x>|y + table(x) mod L> on a dense (domain size, L) array."""
    state = np.asarray(state)
    N, L = o.domain.size, o.label_count
    if state.shape != (N, L):
        raise OracleError(f"state has shape {state.shape}, oracle needs ({N}, {L})")
    out = np.zeros_like(state)
    rows = np.arange(N)[:, None]
    cols = (np.arange(L)[None, :] + o.table[:, None]) % L
    out[rows, cols] = state
    return out


# --- serialization -----------------------------------------------------------


def oracle_to_dict(o: OracleInstance) -> dict:
    truth = o.ground_truth
    if isinstance(truth, Period):
        gt = {"kind": "period", "d": truth.d}
    else:
        gt = {"kind": "subspace", "basis": [list(v) for v in truth.basis.vectors]}
    return {
        "domain": o.domain.to_dict(),
        "table": o.table.tolist(),
        "label_count": o.label_count,
        "injective": o.injective,
        "ground_truth": gt,
    }


def oracle_from_dict(data: dict) -> OracleInstance:
    domain = domain_from_dict(data["domain"])
    gt = data["ground_truth"]
    if gt["kind"] == "period":
        truth: HiddenStructure = Period(int(gt["d"]))
    elif gt["kind"] == "subspace":
        if not isinstance(domain, Product):
            raise OracleError("subspace ground truth needs a product domain")
        truth = Subspace(SubspaceBasis.span(domain.p, domain.n, gt["basis"]))
    else:
        raise OracleError(f"unknown ground truth kind {gt['kind']!r}")
    return OracleInstance(
        domain,
        np.asarray(data["table"]),
        int(data["label_count"]),
        truth,
        injective=bool(data.get("injective", True)),
    )


def dumps(o: OracleInstance) -> str:
    return json.dumps(oracle_to_dict(o))


def loads(text: str) -> OracleInstance:
    return oracle_from_dict(json.loads(text))
