"""Pattern compiler: MUB tools, phase optimization, Clifford lowering."""

import numpy as np
import pytest

from quditmbqc.errors import NonHermitian, UnsupportedFormalism, WrongFormalism
from quditmbqc.galois import FINITE_FIELD, INTEGER_RING, make_dim
from quditmbqc.gates import hadamard, mult_gate, sgate
from quditmbqc.pauli import matrix_of_pauli
from quditmbqc.clifford import SymplecticRep, synthesize
from quditmbqc.compiler import (
    compile_clifford,
    compile_unitary,
    expand_hermitian,
    hermitian_basis,
    mub_basis_matrix,
    mub_paulis,
    pattern_from_json,
    pattern_to_json,
    principal_log_hermitian,
    transport_pattern,
)
from quditmbqc.resource import cx_spec, cz_spec, intrinsic_of, light_shift_spec

D2 = make_dim(INTEGER_RING, d=2)
D3 = make_dim(INTEGER_RING, d=3)
D4F = make_dim(FINITE_FIELD, p=2, m=2)


def haar_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def pattern_residual(pattern, U):
    """1 - |tr(V^dag U)| / d for V = frame^-1 * realized product."""
    F = matrix_of_pauli(pattern.frame)
    V = F.conj().T @ pattern.dense_product()
    return 1.0 - abs(np.trace(V.conj().T @ U)) / U.shape[0]


@pytest.mark.parametrize("dim", [D2, D3, D4F])
def test_mub_unbiasedness(dim):
    d = dim.d
    bases = [mub_basis_matrix(dim, i) for i in range(d + 1)]
    for i, A in enumerate(bases):
        assert np.allclose(A.conj().T @ A, np.eye(d))
        for B in bases[i + 1:]:
            overlaps = np.abs(A.conj().T @ B) ** 2
            assert np.max(np.abs(overlaps - 1 / d)) < 1e-10


def test_mub_paulis_count():
    words = mub_paulis(D3)
    assert len(words) == 4
    with pytest.raises(WrongFormalism):
        mub_paulis(make_dim(INTEGER_RING, d=4))


@pytest.mark.parametrize("variant", ["mub", "weyl"])
@pytest.mark.parametrize("dim", [D2, D3, D4F])
def test_hermitian_basis_spans(dim, variant):
    basis = hermitian_basis(dim, variant)
    assert len(basis.elements) == dim.d ** 2
    for N in basis.elements:
        assert np.allclose(N, N.conj().T)


def test_expand_hermitian_residual():
    rng = np.random.default_rng(0)
    for dim in (D3, D4F):
        basis = hermitian_basis(dim)
        A = rng.normal(size=(dim.d, dim.d)) + 1j * rng.normal(
            size=(dim.d, dim.d))
        H = A + A.conj().T
        alpha = expand_hermitian(H, basis)
        back = sum(a * N for a, N in zip(alpha, basis.elements))
        assert np.max(np.abs(back - H)) < 1e-10
        assert np.max(np.abs(alpha.imag)) == 0  # real coefficients


def test_expand_hermitian_rejects_non_hermitian():
    basis = hermitian_basis(D3)
    with pytest.raises(NonHermitian):
        expand_hermitian(np.triu(np.ones((3, 3))), basis)


def test_principal_log():
    rng = np.random.default_rng(1)
    U = haar_unitary(4, rng)
    H = principal_log_hermitian(U)
    assert np.allclose(H, H.conj().T)
    vals, vecs = np.linalg.eigh(H)
    assert np.allclose(vecs @ np.diag(np.exp(1j * vals)) @ vecs.conj().T, U)


def test_compile_gate_itself_is_one_step():
    intr = intrinsic_of(cz_spec(D3))
    pat = compile_unitary(hadamard(D3), intr)
    assert pat.step_count() == 1
    assert pattern_residual(pat, hadamard(D3)) < 1e-9


@pytest.mark.parametrize("dim,spec_of,bound", [
    (D2, cz_spec, 4), (D3, cz_spec, 12), (D3, light_shift_spec, 9),
    (D3, cx_spec, 9), (D4F, cx_spec, 8)])
def test_compile_random_targets(dim, spec_of, bound):
    intr = intrinsic_of(spec_of(dim))
    rng = np.random.default_rng(42)
    for trial in range(3):
        U = haar_unitary(dim.d, rng)
        pat = compile_unitary(U, intr, seed=trial)
        assert pat.step_count() <= bound
        assert pattern_residual(pat, U) < 1e-6
        assert all(s.adaptive for s in pat.steps)


def test_compile_composite_ring_rejected():
    intr = intrinsic_of(cz_spec(make_dim(INTEGER_RING, d=4)))
    with pytest.raises(UnsupportedFormalism):
        compile_unitary(np.eye(4), intr)


@pytest.mark.parametrize("target_of", [
    lambda dim: sgate(dim),
    lambda dim: hadamard(dim),
    lambda dim: mult_gate(dim, 2),
    lambda dim: synthesize(SymplecticRep(dim, 2, 1, 1, 1))])
def test_compile_clifford_non_adaptive(target_of):
    intr = intrinsic_of(cz_spec(D3))
    C = target_of(D3)
    pat = compile_clifford(C, intr)
    assert all(not s.adaptive for s in pat.steps)
    assert pattern_residual(pat, C) < 1e-9


def test_transport_pattern_length_is_order():
    for spec, steps in ((cz_spec(D3), 4), (light_shift_spec(D3), 3),
                        (cx_spec(D2), 2)):
        intr = intrinsic_of(spec)
        pat = transport_pattern(intr)
        assert pat.step_count() == steps == intr.pauli_order
        assert pattern_residual(pat, np.eye(intr.dim.d)) < 1e-9


def test_pattern_json_round_trip():
    intr = intrinsic_of(light_shift_spec(D3))
    rng = np.random.default_rng(9)
    U = haar_unitary(3, rng)
    pat = compile_unitary(U, intr, seed=0)
    pat.gate = light_shift_spec(D3)
    back = pattern_from_json(pattern_to_json(pat))
    assert back.step_count() == pat.step_count()
    assert back.frame.z == pat.frame.z and back.frame.x == pat.frame.x
    assert np.allclose(back.dense_product(), pat.dense_product())


def test_pattern_json_without_gate_carries_matrix():
    intr = intrinsic_of(cz_spec(D2))
    pat = compile_unitary(sgate(D2) @ hadamard(D2), intr, seed=1)
    obj = pattern_to_json(pat)
    assert obj["intrinsic"] is None and "intrinsic_matrix" in obj
    back = pattern_from_json(obj)
    assert np.allclose(back.intrinsic.matrix, intr.matrix)
