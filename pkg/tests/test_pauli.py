"""Pauli algebra property suites, cross-checked against dense matrices."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from qecverify.oracle import (embed, gate_matrix, mat_eq, mat_mul,
                              mat_dagger, sum_matrix, term_matrix)
from qecverify.pauli import (ONE_QUBIT_GATES, TWO_QUBIT_GATES, PauliSum,
                             PauliTerm, conjugate, equal_up_to_phase)

GATES_1 = ONE_QUBIT_GATES
GATES_2 = TWO_QUBIT_GATES

# how many applications of each gate return an operator to itself
ORDER = {"H": 2, "X": 2, "Y": 2, "Z": 2, "CNOT": 2, "CZ": 2,
         "S": 4, "T": 8, "ISWAP": 4}


def term_from_bits(n, xs, zs):
    sites = []
    for q in range(1, n + 1):
        b = 1 << (q - 1)
        x, z = bool(xs & b), bool(zs & b)
        if x and z:
            sites.append((q, "Y"))
        elif x:
            sites.append((q, "X"))
        elif z:
            sites.append((q, "Z"))
    return PauliTerm.from_sites(n, sites)


def random_term(rng, n):
    xs = rng.randrange(1 << n)
    zs = rng.randrange(1 << n)
    t = term_from_bits(n, xs, zs)
    if rng.random() < 0.5:
        t = t.negate()
    return t


def _rand_sum(rng, n):
    return PauliSum.of(random_term(rng, n))


class TestInvolutions:
    """Conjugating k times by a gate of order k is the identity."""

    @pytest.mark.parametrize("gate", GATES_1)
    def test_one_qubit(self, gate):
        rng = random.Random(11)
        k = ORDER[gate]
        for _ in range(40):
            n = rng.randrange(1, 4)
            q = rng.randrange(1, n + 1)
            p = _rand_sum(rng, n)
            out = p
            for _ in range(k):
                out = conjugate(gate, (q,), out)
            assert out == p, (gate, str(p), str(out))

    @pytest.mark.parametrize("gate", GATES_2)
    def test_two_qubit(self, gate):
        rng = random.Random(13)
        k = ORDER[gate]
        for _ in range(40):
            n = rng.randrange(2, 4)
            q1, q2 = rng.sample(range(1, n + 1), 2)
            p = _rand_sum(rng, n)
            out = p
            for _ in range(k):
                out = conjugate(gate, (q1, q2), out)
            assert out == p, (gate, str(p), str(out))


class TestDenseOracle:
    """conjugate() agrees with U^dagger P U on dense matrices, n <= 4."""

    @pytest.mark.parametrize("gate", GATES_1 + GATES_2)
    def test_conjugation_matches_matrices(self, gate):
        rng = random.Random(17)
        arity = 1 if gate in GATES_1 else 2
        for _ in range(25):
            n = rng.randrange(arity, 5)
            qubits = tuple(rng.sample(range(1, n + 1), arity))
            p = _rand_sum(rng, n)
            sym = sum_matrix(conjugate(gate, qubits, p))
            u = embed(gate_matrix(gate), qubits, n)
            dense = mat_mul(mat_mul(mat_dagger(u), sum_matrix(p)), u)
            assert mat_eq(sym, dense), (gate, qubits, str(p))

    def test_term_product_matches_matrices(self):
        rng = random.Random(19)
        for _ in range(40):
            n = rng.randrange(1, 5)
            a = random_term(rng, n)
            b = random_term(rng, n)
            assert mat_eq(term_matrix(a.mul(b)),
                          mat_mul(term_matrix(a), term_matrix(b)))


class TestCommutation:
    """Symplectic commutation test vs. actual matrix commutators, n <= 3."""

    def test_all_pairs(self):
        for n in (1, 2, 3):
            terms = [term_from_bits(n, xs, zs)
                     for xs in range(1 << n) for zs in range(1 << n)]
            for a in terms:
                for b in terms:
                    ab = mat_mul(term_matrix(a), term_matrix(b))
                    ba = mat_mul(term_matrix(b), term_matrix(a))
                    assert a.commutes(b) == mat_eq(ab, ba), (str(a), str(b))


class TestDecomposition:
    """Products of stabilizer rows decompose back onto the row set."""

    def test_round_trips(self):
        from qecverify.codes import steane
        from qecverify.vc import decompose_product
        from qecverify.wlp import Row
        from qecverify.cexpr import PhasePoly

        code = steane()
        rows = [Row(PauliSum.of(g), PhasePoly.zero())
                for g in code.generators]
        rows.append(Row(PauliSum.of(code.logical("Z", 1)),
                        PhasePoly.zero()))
        rng = random.Random(23)
        for _ in range(500):
            subset = [i for i in range(len(rows)) if rng.random() < 0.5]
            if not subset:
                continue
            prod = rows[subset[0]].op.terms[0]
            for i in subset[1:]:
                prod = prod.mul(rows[i].op.terms[0])
            dec = decompose_product(prod, rows)
            assert dec is not None
            assert sorted(dec.factors) == subset
            back = rows[subset[0]].op.terms[0]
            for i in dec.factors[1:]:
                back = back.mul(rows[i].op.terms[0])
            rel = equal_up_to_phase(PauliSum.of(prod), PauliSum.of(back))
            assert rel is not None and rel.const == dec.rel.const


@given(st.integers(1, 4), st.integers(0, 255), st.integers(0, 255),
       st.integers(0, 255), st.integers(0, 255))
@settings(max_examples=200, deadline=None)
def test_mul_matches_dense(n, xa, za, xb, zb):
    mask = (1 << n) - 1
    a = term_from_bits(n, xa & mask, za & mask)
    b = term_from_bits(n, xb & mask, zb & mask)
    assert mat_eq(term_matrix(a.mul(b)),
                  mat_mul(term_matrix(a), term_matrix(b)))


@given(st.integers(1, 4), st.integers(0, 255), st.integers(0, 255))
@settings(max_examples=100, deadline=None)
def test_label_round_trip(n, xs, zs):
    mask = (1 << n) - 1
    t = term_from_bits(n, xs & mask, zs & mask)
    if t.weight() == 0:
        return
    assert PauliTerm.from_label(n, t.base_label()).body_key() == t.body_key()
