"""Clifford certification, symplectic data, and word synthesis."""

import numpy as np
import pytest

from quditmbqc.errors import (
    NonInvertibleLambda,
    NotCliffordError,
    UniversalityViolated,
)
from quditmbqc.galois import FINITE_FIELD, INTEGER_RING, make_dim
from quditmbqc.gates import (
    equal_up_to_phase,
    hadamard,
    mult_gate,
    sgate,
    tau,
)
from quditmbqc.pauli import matrix_of_pauli, single_word
from quditmbqc.clifford import (
    NotClifford,
    generator_words,
    SymplecticRep,
    certify,
    conjugation_table,
    equal_up_to_pauli,
    hadamard_from_intrinsic,
    map_pauli_to_Z,
    mult_gate_decomposition,
    pauli_order,
    realize_word,
    rep_tokens,
    symplectic_of,
    synthesize,
    universality_check,
)
from quditmbqc.resource import cx_spec, cz_spec, intrinsic_of, light_shift_spec

D2 = make_dim(INTEGER_RING, d=2)
D3 = make_dim(INTEGER_RING, d=3)
D4R = make_dim(INTEGER_RING, d=4)
D4F = make_dim(FINITE_FIELD, p=2, m=2)
D5 = make_dim(INTEGER_RING, d=5)

RING_DIMS = [D2, D3, D4R, D5]


def _Z(dim):
    return matrix_of_pauli(single_word(dim, 1, 0, z=1))


def _X(dim):
    return matrix_of_pauli(single_word(dim, 1, 0, x=1))


@pytest.mark.parametrize("dim", RING_DIMS)
def test_hadamard_conjugations(dim):
    H = hadamard(dim)
    Z, X = _Z(dim), _X(dim)
    Xinv = matrix_of_pauli(single_word(dim, 1, 0, x=dim.neg(1)))
    assert np.max(np.abs(H @ X @ H.conj().T - Z)) < 1e-10
    assert np.max(np.abs(H @ Z @ H.conj().T - Xinv)) < 1e-10


@pytest.mark.parametrize("dim", RING_DIMS)
def test_sgate_conjugation(dim):
    S = sgate(dim)
    Z, X = _Z(dim), _X(dim)
    assert np.max(np.abs(S @ X @ S.conj().T - tau(dim) * X @ Z)) < 1e-10


@pytest.mark.parametrize("dim", RING_DIMS)
def test_hadamard_powers(dim):
    H = hadamard(dim)
    assert equal_up_to_phase(H @ H, mult_gate(dim, dim.neg(1)), tol=1e-10)
    H4 = np.linalg.matrix_power(H, 4)
    assert np.max(np.abs(H4 - np.eye(dim.d))) < 1e-10


@pytest.mark.parametrize("dim", [make_dim(INTEGER_RING, d=2), D4F])
def test_field_hadamard_is_involution(dim):
    H = hadamard(dim)
    assert np.max(np.abs(H @ H - np.eye(dim.d))) < 1e-10


def test_certify_clifford_gates():
    for dim in (D3, D4F):
        for M in (hadamard(dim), sgate(dim)):
            cert = certify(M, dim)
            assert cert.n == 1
            # images reproduce the conjugation densely
            for label, word in generator_words(dim, 1):
                ph, img = cert.image_of(label)
                lhs = M @ matrix_of_pauli(word) @ M.conj().T
                # the image word's exact phase agrees with the complex one
                assert abs(ph - img.phase) < 1e-10
                assert np.allclose(lhs, matrix_of_pauli(img))


def test_non_clifford_detected():
    T = np.diag([1, np.exp(1j * np.pi / 4)])
    res = conjugation_table(T, D2)
    assert isinstance(res, NotClifford)
    with pytest.raises(NotCliffordError):
        certify(T, D2)


def test_symplectic_of_standard_gates():
    assert symplectic_of(certify(hadamard(D3), D3)).as_tuple() == (0, 2, 1, 0)
    assert symplectic_of(certify(sgate(D3), D3)).as_tuple() == (1, 0, 1, 1)


def test_symplectic_round_trip_sl2_z3():
    reps = []
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for e in range(3):
                    if (a * e - b * c) % 3 == 1:
                        reps.append(SymplecticRep(D3, a, b, c, e))
    assert len(reps) == 24
    for rep in reps:
        U = synthesize(rep)
        back = symplectic_of(certify(U, D3))
        assert back.as_tuple() == rep.as_tuple()


def test_rep_tokens_realize_rep():
    rng = np.random.default_rng(2)
    for dim in (D2, D5, D4F):
        for _ in range(8):
            while True:
                a, b, c = (int(v) for v in rng.integers(0, dim.d, size=3))
                if dim.is_invertible(a):
                    break
            # complete to determinant one
            e = dim.mul(dim.inv(a), dim.add(1, dim.mul(b, c)))
            rep = SymplecticRep(dim, a, b, c, e)
            U = realize_word(dim, rep_tokens(rep))
            got = symplectic_of(certify(U, dim))
            assert got.as_tuple() == rep.as_tuple()


@pytest.mark.parametrize("spec_of", [cz_spec, light_shift_spec, cx_spec])
def test_hadamard_from_intrinsic(spec_of):
    for dim in (D2, D3):
        intr = intrinsic_of(spec_of(dim))
        tokens = hadamard_from_intrinsic(intr.clifford_cert)
        assert len(tokens) == 5
        U = realize_word(dim, tokens, G=intr.matrix)
        assert equal_up_to_pauli(dim, 1, U, hadamard(dim)) is not None


def test_hadamard_from_non_universal_rejected():
    cert = certify(sgate(D3), D3)
    with pytest.raises(UniversalityViolated):
        hadamard_from_intrinsic(cert)


def test_universality_check_values():
    ok, (a, b) = universality_check(certify(hadamard(D3), D3))
    assert ok and (a, b) == (0, 2)
    ok, (a, b) = universality_check(certify(sgate(D3), D3))
    assert not ok and b == 0
    # non-invertible X exponent in a ring
    intr = intrinsic_of(cz_spec(D4R))
    ok, _ = universality_check(certify(sgate(D4R), D4R))
    assert not ok


def test_mult_gate_decomposition():
    for dim, lam in ((D3, 2), (D5, 3), (D4F, 2)):
        tokens = mult_gate_decomposition(dim, lam)
        U = realize_word(dim, tokens)
        assert equal_up_to_pauli(dim, 1, U, mult_gate(dim, lam)) is not None
    with pytest.raises(NonInvertibleLambda):
        mult_gate_decomposition(D4R, 2)


def test_map_pauli_to_Z():
    rep, l = map_pauli_to_Z(D3, 0, 1)
    assert l == 1 and rep.apply(0, 1) == (1, 0)
    rep, l = map_pauli_to_Z(D5, 2, 3)
    assert l == 1 and rep.apply(2, 3) == (1, 0)
    rep, l = map_pauli_to_Z(D4R, 2, 2)
    assert l == 2 and rep.apply(2, 2) == (2, 0)
    rep, l = map_pauli_to_Z(D4F, 2, 3)
    assert l == 1 and rep.apply(2, 3) == (1, 0)


def test_pauli_orders():
    assert pauli_order(hadamard(D3), D3) == 4
    assert pauli_order(_Z(D3), D3) == 1
    assert pauli_order(mult_gate(D5, 2), D5) == 4
