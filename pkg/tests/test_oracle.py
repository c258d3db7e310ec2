import json

import numpy as np
import pytest

from qhs.groups import Cyclic, Product, index_of
from qhs.oracle import (
    OracleError,
    OracleInstance,
    Period,
    Subspace,
    apply_oracle_unitary,
    dumps,
    loads,
    make_periodic_oracle,
    make_subspace_oracle,
    minimal_period,
    oracle_to_dict,
    verify_hidden_structure,
)
from qhs.postprocess import SubspaceBasis
from oracles import all_subspaces, all_vectors, basis_of, span_set


def brute_minimal_period(table):
    M = len(table)
    return min(d for d in range(1, M + 1) if M % d == 0 and all(table[(k + d) % M] == table[k] for k in range(M)))


def test_periodic_oracle_structure():
    o = make_periodic_oracle(8, 4, injective=True, rng=0)
    t = o.table
    assert sorted(t[:4]) == [0, 1, 2, 3]
    assert all(t[k] == t[k % 4] for k in range(8))
    assert o.label_count == 4


def test_constant_oracle():
    o = make_periodic_oracle(6, 1, rng=0)
    assert set(o.table) == {0}
    assert minimal_period(o) == 1


def test_period_must_divide():
    with pytest.raises(OracleError, match="divide"):
        make_periodic_oracle(8, 3)


def test_minimal_period_examples():
    assert minimal_period(OracleInstance(Cyclic(4), [0, 1, 0, 1], 2, Period(2))) == 2
    o = make_periodic_oracle(12, 4, injective=True, rng=5)
    assert minimal_period(o) == 4 == brute_minimal_period(list(o.table))


def test_generated_oracles_verify():
    rng = np.random.default_rng(7)
    count = 0
    for M in range(1, 61):
        for d in [d for d in range(1, M + 1) if M % d == 0]:
            for injective in (True, False):
                o = make_periodic_oracle(M, d, injective=injective, rng=rng)
                assert verify_hidden_structure(o)
                assert minimal_period(o) == d == brute_minimal_period(list(o.table))
                count += 1
    for n in range(1, 5):
        for S in all_subspaces(2, n):
            for _ in range(5):
                o = make_subspace_oracle(2, n, basis_of(2, n, S), rng=rng)
                assert verify_hidden_structure(o)
                count += 1
    for p, n in [(3, 2), (3, 3), (5, 2)]:
        for _ in range(30):
            k = int(rng.integers(0, n + 1))
            vecs = [tuple(int(x) for x in rng.integers(0, p, n)) for _ in range(k)]
            o = make_subspace_oracle(p, n, basis_of(p, n, span_set(p, n, vecs)), rng=rng)
            assert verify_hidden_structure(o)
            count += 1
    assert count >= 1000


def test_subspace_oracle_examples():
    o = make_subspace_oracle(2, 2, [(1, 1)], rng=1)
    assert o.label_count == 2
    for v in all_vectors(2, 2):
        w = ((v[0] + 1) % 2, (v[1] + 1) % 2)
        assert o.table[index_of(v, o.domain)] == o.table[index_of(w, o.domain)]
    assert len(set(o.table)) == 2
    o = make_subspace_oracle(2, 2, [], rng=1)
    assert sorted(o.table) == [0, 1, 2, 3]
    with pytest.raises(OracleError):
        make_subspace_oracle(2, 2, [(1, 0), (1, 0)])


def test_verify_rejects_broken_tables():
    assert not verify_hidden_structure(OracleInstance(Cyclic(4), [0, 1, 0, 2], 3, Period(2)))
    V = SubspaceBasis.span(2, 2, [(1, 1)])
    assert not verify_hidden_structure(OracleInstance(Product(2, 2), [0, 0, 0, 0], 1, Subspace(V)))
    # claimed period is not minimal
    assert not verify_hidden_structure(OracleInstance(Cyclic(4), [0, 1, 0, 1], 2, Period(4)))


def test_apply_oracle_unitary_examples():
    o = OracleInstance(Cyclic(1), [3], 4, Period(1))
    state = np.zeros((1, 4), complex)
    state[0, 0] = 1
    out = apply_oracle_unitary(state, o)
    assert out[0, 3] == 1 and np.sum(np.abs(out)) == 1

    const = make_periodic_oracle(4, 1)
    rng = np.random.default_rng(0)
    s = rng.normal(size=(4, 1)) + 0j
    assert np.array_equal(apply_oracle_unitary(s, const), s)

    o = OracleInstance(Cyclic(4), [0, 1, 0, 1], 2, Period(2))
    s = np.zeros((4, 2), complex)
    s[:, 0] = 0.5
    out = apply_oracle_unitary(s, o)
    expected = np.zeros((4, 2))
    for x in range(4):
        expected[x, x % 2] = 0.5
    assert np.array_equal(out, expected)


def test_apply_oracle_unitary_preserves_norm():
    rng = np.random.default_rng(4)
    for _ in range(50):
        o = make_periodic_oracle(24, int(rng.choice([1, 2, 3, 4, 6, 8, 12, 24])), rng=rng)
        s = rng.normal(size=(24, o.label_count)) + 1j * rng.normal(size=(24, o.label_count))
        out = apply_oracle_unitary(s, o)
        # a permutation of basis states: same multiset of amplitudes, same norm
        assert np.array_equal(np.sort_complex(out.ravel()), np.sort_complex(s.ravel()))
        assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(s), rel=1e-15)


def test_register_mismatch():
    o = make_periodic_oracle(4, 2)
    with pytest.raises(OracleError):
        apply_oracle_unitary(np.zeros((4, 3)), o)


def test_json_roundtrip():
    for o in (make_periodic_oracle(12, 4, rng=3), make_subspace_oracle(3, 2, [(1, 2)], rng=3)):
        text = dumps(o)
        data = json.loads(text)
        assert set(data) == {"domain", "table", "label_count", "injective", "ground_truth"}
        back = loads(text)
        assert oracle_to_dict(back) == oracle_to_dict(o)
        assert verify_hidden_structure(back)
