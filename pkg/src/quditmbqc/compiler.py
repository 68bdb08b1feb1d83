"""Compilation of single-qudit unitaries and Cliffords into measurement
patterns over the gate set {G_I * D_phi}.

A pattern is an ordered list of diagonal rotations; step 0 is applied first
(the rightmost factor).  The dense product of the steps equals
phase * frame * U for the declared Pauli frame.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .clifford import (
    CliffordCert,
    certify,
    hadamard_from_intrinsic,
    pauli_order_data,
    rep_tokens,
    symplectic_of,
    universality_check,
)
from .errors import (
    CompilationDiverged,
    DimensionMismatch,
    NonHermitian,
    UnsupportedFormalism,
    WrongFormalism,
)
from .galois import INTEGER_RING, DimSpec, dim_from_json, dim_to_json
from .gates import shear_gate, tau
from .pauli import (
    PauliWord,
    identity_word,
    invert_word,
    match_pauli,
    matrix_of_pauli,
    normal_form,
    pauli_from_json,
    pauli_to_json,
    single_word,
    weyl,
    zx_matrix,
)
from .resource import (
    EntanglingGateSpec,
    IntrinsicGate,
    gate_from_json,
    gate_to_json,
    intrinsic_of,
)

RESIDUAL_TOL = 1e-6
MAX_RESTARTS = 32
MAX_SWEEPS = 500


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, int(n ** 0.5) + 1):
        if n % q == 0:
            return False
    return True


def _check_compilable(dim: DimSpec):
    if dim.kind == INTEGER_RING and not _is_prime(dim.d):
        raise UnsupportedFormalism(
            "composite integer-ring dimensions have no MUB-based "
            "decomposition; use the weyl Hermitian basis tools instead")


# --- MUB Paulis and Hermitian bases ---------------------------------------

def mub_paulis(dim: DimSpec) -> List[PauliWord]:
    """The d+1 words {Z} and {X Z^a : a} whose eigenbases are unbiased."""
    if dim.kind == INTEGER_RING and not _is_prime(dim.d):
        raise WrongFormalism("MUB construction needs a prime-power dimension")
    words = [single_word(dim, 1, 0, z=1)]
    for a in dim.elements:
        words.append(PauliWord(dim, 1, (a,), (1,), 0))
    return words


def mub_basis_matrix(dim: DimSpec, index: int) -> np.ndarray:
    """Orthonormal eigenbasis (columns) of the index-th MUB family.

    Index 0 is the computational (Z) basis; index 1 + a is the joint
    eigenbasis of the abelian family {X^x Z^{a x}}.
    """
    d = dim.d
    if index == 0:
        return np.eye(d, dtype=complex)
    a = dim.elements[index - 1]
    rng = np.random.default_rng(12345)
    A = np.zeros((d, d), dtype=complex)
    mats = []
    for x in dim.elements:
        M = zx_matrix(PauliWord(dim, 1, (dim.mul(a, x),), (x,), 0))
        mats.append(M)
        r = rng.standard_normal() + 1j * rng.standard_normal()
        A += r * M + np.conj(r) * M.conj().T
    _, vecs = np.linalg.eigh(A)
    # canonical column order and phase: sort by the eigenvalue under the
    # family generator, then make the largest entry positive real
    gen = mats[1] if len(mats) > 1 else mats[0]
    eigs = [complex(np.vdot(vecs[:, k], gen @ vecs[:, k])) for k in range(d)]
    order = sorted(range(d), key=lambda k: round(cmath.phase(eigs[k]), 9))
    vecs = vecs[:, order]
    for k in range(d):
        j = int(np.argmax(np.abs(vecs[:, k])))
        vecs[:, k] *= abs(vecs[j, k]) / vecs[j, k]
    return vecs


@dataclass
class HermitianBasis:
    dim: DimSpec
    elements: List[np.ndarray]
    labels: List[Tuple]
    variant: str


def hermitian_basis(dim: DimSpec, variant: str = "mub") -> HermitianBasis:
    """d^2 real-linearly-independent Hermitian matrices."""
    d = dim.d
    elements: List[np.ndarray] = []
    labels: List[Tuple] = []
    if variant == "mub":
        if dim.kind == INTEGER_RING and not _is_prime(d):
            raise WrongFormalism("MUB Hermitian basis needs a prime power")
        for idx in range(d + 1):
            B = mub_basis_matrix(dim, idx)
            keep = d if idx == 0 else d - 1
            for k in range(keep):
                v = B[:, k:k + 1]
                elements.append(v @ v.conj().T)
                labels.append((idx, k))
    elif variant == "weyl":
        c0 = cmath.exp(1j * cmath.pi / 4)
        for a in dim.elements:
            for b in dim.elements:
                # displacement phase closing the family under adjoints:
                # T(a,b)^dag = T(-a,-b)
                if dim.kind == INTEGER_RING:
                    t = tau(dim)
                    T = t ** (-(a * b) % (2 * d)) * zx_matrix(
                        PauliWord(dim, 1, (a,), (b,), 0))
                else:
                    T = matrix_of_pauli(weyl(dim, a, b))
                N = c0 * T + np.conj(c0) * T.conj().T
                elements.append(N)
                labels.append((a, b))
    else:
        raise DimensionMismatch(f"unknown variant {variant!r}")
    # linear-independence audit over the reals
    V = np.stack([np.concatenate([e.real.reshape(-1), e.imag.reshape(-1)])
                  for e in elements])
    if np.linalg.matrix_rank(V, tol=1e-10) != d * d:
        raise DimensionMismatch("Hermitian family is rank-deficient")
    return HermitianBasis(dim, elements, labels, variant)


def expand_hermitian(H: np.ndarray, basis: HermitianBasis) -> np.ndarray:
    """Real coefficients alpha with sum_k alpha_k N_k = H (residual < 1e-10)."""
    H = np.asarray(H, dtype=complex)
    if np.max(np.abs(H - H.conj().T)) > 1e-9:
        raise NonHermitian("operator is not Hermitian within tolerance")
    A = np.stack([np.concatenate([e.real.reshape(-1), e.imag.reshape(-1)])
                  for e in basis.elements]).T
    rhs = np.concatenate([H.real.reshape(-1), H.imag.reshape(-1)])
    alpha, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    if np.linalg.norm(A @ alpha - rhs) > 1e-10:
        raise NonHermitian("expansion residual exceeds tolerance")
    return alpha


# --- measurement patterns -------------------------------------------------

@dataclass
class PatternStep:
    phases: np.ndarray
    adaptive: bool


@dataclass
class MeasurementPattern:
    dim: DimSpec
    intrinsic: IntrinsicGate
    steps: List[PatternStep]
    frame: PauliWord
    frame_semantics: str = "left"
    gate: Optional[EntanglingGateSpec] = None

    def step_count(self) -> int:
        return len(self.steps)

    def dense_product(self) -> np.ndarray:
        """Product of (G_I D_phi) factors, step 0 rightmost."""
        from .gates import dphi
        out = np.eye(self.dim.d, dtype=complex)
        for step in self.steps:
            out = (self.intrinsic.matrix @ dphi(step.phases)) @ out
        return out


def principal_log_hermitian(U: np.ndarray) -> np.ndarray:
    """H with U = e^{iH}, eigenphases on the principal branch (-pi, pi]."""
    U = np.asarray(U, dtype=complex)
    _, vecs = np.linalg.eig(U)
    # orthonormalize: U is normal, so QR cleans up degenerate clusters
    q, _ = np.linalg.qr(vecs)
    D = q.conj().T @ U @ q
    phases = np.angle(np.diag(D))
    phases[np.isclose(phases, -np.pi)] = np.pi
    return q @ np.diag(phases) @ q.conj().T


# --- Pauli-sweep lowering -------------------------------------------------

def _conjugate_word(M: np.ndarray, dim: DimSpec, w: PauliWord
                    ) -> Tuple[complex, PauliWord]:
    """M w M^dagger as (scalar residual, exact word); M must be Clifford."""
    r = match_pauli(dim, 1, M @ matrix_of_pauli(w) @ M.conj().T)
    if r is None:
        raise DimensionMismatch("conjugation left the Pauli group")
    phase, word = r
    return phase / word.phase, word


def lower_factors(dim: DimSpec, G: np.ndarray, factors: List[Tuple]
                  ) -> Tuple[List[np.ndarray], PauliWord, complex]:
    """Rewrite a factor word as scalar * C * prod(G * D_i).

    `factors` is leftmost-first over ("G",), ("diag", vec), ("pauli", word),
    ("scalar", z).  Returns (diag vectors leftmost-first, C, scalar); the
    word must begin with a "G" factor once Paulis are swept left.
    """
    scalar = 1.0 + 0j
    C = identity_word(dim, 1)
    emitted: List = []  # leftmost-first over ["G"] and ["diag", vec]
    for f in reversed(factors):
        if f[0] == "scalar":
            scalar *= f[1]
        elif f[0] == "pauli":
            C = normal_form(f[1], C)
        elif f[0] == "diag":
            x = C.x[0]
            vec = np.asarray(f[1], dtype=complex)
            vec = np.array([vec[dim.add(u, x)] for u in range(dim.d)])
            if emitted and emitted[0][0] == "diag":
                emitted[0][1] = vec * emitted[0][1]
            else:
                emitted.insert(0, ["diag", vec])
        elif f[0] == "G":
            emitted.insert(0, ["G"])
            res, C = _conjugate_word(G, dim, C)
            scalar *= res
        else:
            raise DimensionMismatch(f"unknown factor {f[0]!r}")
    # group into (G, diag) pairs, leftmost-first
    diags: List[np.ndarray] = []
    i = 0
    while i < len(emitted):
        if emitted[i][0] != "G":
            raise DimensionMismatch("word does not start each group with G")
        if i + 1 < len(emitted) and emitted[i + 1][0] == "diag":
            diags.append(emitted[i + 1][1])
            i += 2
        else:
            diags.append(np.ones(dim.d, dtype=complex))
            i += 1
    return diags, C, scalar


def _steps_from_diags(diags: List[np.ndarray], adaptive: bool
                      ) -> List[PatternStep]:
    """Leftmost-first diagonals to steps (step 0 = rightmost factor)."""
    return [PatternStep(np.angle(v), adaptive) for v in reversed(diags)]


def _intrinsic_cert(intrinsic: IntrinsicGate) -> CliffordCert:
    if intrinsic.clifford_cert is None:
        return certify(intrinsic.matrix, intrinsic.dim, 1)
    return intrinsic.clifford_cert


def _gdagger_factors(dim: DimSpec, G: np.ndarray) -> List[Tuple]:
    """G^dagger rewritten over {G, Pauli, scalar} via the Pauli order."""
    o, mu, word = pauli_order_data(G, dim, 1)
    w0 = PauliWord(dim, 1, word.z, word.x, 0)
    return [("G",)] * (o - 1) + [("pauli", invert_word(w0)),
                                 ("scalar", 1.0 / mu)]


# --- single-qudit unitary compilation -------------------------------------

def _shear_family(dim: DimSpec) -> List[Tuple[int, np.ndarray]]:
    units = [l for l in dim.elements if dim.is_invertible(l)]
    return [(l, shear_gate(dim, l)) for l in units]


def _als_run(U: np.ndarray, conjugators: List[np.ndarray],
             phis: List[np.ndarray]) -> Tuple[List[np.ndarray], float]:
    """Alternating exact maximization of |tr(U^dag V)| over group phases."""
    d = U.shape[0]
    m = len(conjugators)
    Ud = U.conj().T
    F = [K @ np.diag(np.exp(1j * p)) @ K.conj().T
         for K, p in zip(conjugators, phis)]
    best = 0.0
    for _ in range(MAX_SWEEPS):
        for j in range(m):
            L = np.eye(d, dtype=complex)
            for t in range(j):
                L = L @ F[t]
            R = np.eye(d, dtype=complex)
            for t in range(j + 1, m):
                R = R @ F[t]
            K = conjugators[j]
            M = K.conj().T @ R @ Ud @ L @ K
            diag = np.diag(M)
            phis[j] = np.where(np.abs(diag) > 1e-14,
                               -np.angle(diag), phis[j])
            F[j] = K @ np.diag(np.exp(1j * phis[j])) @ K.conj().T
        V = np.eye(d, dtype=complex)
        for t in range(m):
            V = V @ F[t]
        val = abs(np.trace(Ud @ V)) / d
        if val > 1.0 - 1e-12 or val - best < 1e-13:
            best = max(best, val)
            break
        best = max(best, val)
    return phis, best


def _analytic_init(U: np.ndarray, conjugators: List[np.ndarray]
                   ) -> List[np.ndarray]:
    """Phase guess from the Hermitian expansion of the principal log."""
    d = U.shape[0]
    m = len(conjugators)
    try:
        H = principal_log_hermitian(U)
        cols = []
        for K in conjugators:
            B = np.stack([np.concatenate([
                (K[:, k:k + 1] @ K[:, k:k + 1].conj().T).real.reshape(-1),
                (K[:, k:k + 1] @ K[:, k:k + 1].conj().T).imag.reshape(-1)])
                for k in range(d)])
            cols.append(B)
        A = np.concatenate(cols, axis=0).T
        rhs = np.concatenate([H.real.reshape(-1), H.imag.reshape(-1)])
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        return [sol[j * d:(j + 1) * d].copy() for j in range(m)]
    except Exception:
        return [np.zeros(d) for _ in range(m)]


def _optimize_word(U: np.ndarray, groups: List[Tuple],
                   conjugators: List[np.ndarray], dim: DimSpec, seed: int
                   ) -> Tuple[List[Tuple], List[np.ndarray], float]:
    """Solve for the word's phases; restarts may permute the group order.

    The canonical order (gamma, ascending-lambda betas, alpha) is tried
    first; alternating maximization occasionally hits a target outside its
    reachable set, in which case restarts draw a different order for the
    groups after the first (the gamma group stays leftmost so the lowered
    word still starts with the intrinsic gate).
    """
    d = dim.d
    m = len(groups)
    rng = np.random.default_rng(seed)
    order = list(range(m))
    phis, best = _als_run(U, conjugators, _analytic_init(U, conjugators))
    best_state = (order, phis)
    tries = 0
    while 1.0 - best > RESIDUAL_TOL * 1e-3 and tries < MAX_RESTARTS:
        if tries < 3:
            cand = list(range(m))
        else:
            cand = [0] + [int(i) for i in 1 + rng.permutation(m - 1)]
        conj = [conjugators[i] for i in cand]
        start = [rng.uniform(-math.pi, math.pi, d) for _ in range(m)]
        phis, val = _als_run(U, conj, start)
        if val > best:
            best = val
            best_state = (cand, phis)
        tries += 1
    order, phis = best_state
    return [groups[i] for i in order], phis, best


def compile_unitary(U: np.ndarray, intrinsic: IntrinsicGate,
                    seed: int = 0) -> MeasurementPattern:
    """Measurement pattern realizing U up to a Pauli frame and phase.

    Uses the universal word G D_gamma G^dag (prod_lambda S(l) G D_beta(l)
    G^dag S(l)^dag) D_alpha with exact per-group phase maximization, then
    lowers the word to exactly d * o^P steps.
    """
    dim = intrinsic.dim
    _check_compilable(dim)
    d = dim.d
    U = np.asarray(U, dtype=complex)
    if U.shape != (d, d):
        raise DimensionMismatch("target size does not match the dimension")
    cert = _intrinsic_cert(intrinsic)
    ok, _ = universality_check(cert)
    if not ok:
        from .errors import UniversalityViolated
        raise UniversalityViolated("intrinsic gate cannot reach a Hadamard")
    G = intrinsic.matrix
    # short-circuit: the gate itself
    r = match_pauli(dim, 1, U @ G.conj().T)
    if r is not None and r[1].is_identity():
        return MeasurementPattern(
            dim, intrinsic, [PatternStep(np.zeros(d), True)],
            identity_word(dim, 1), gate=None)
    shears = _shear_family(dim)
    groups: List[Tuple] = [("gamma", None)]
    conjugators = [G]
    for l, S in shears:
        groups.append(("beta", np.diag(S)))
        conjugators.append(S @ G)
    groups.append(("alpha", None))
    conjugators.append(np.eye(d, dtype=complex))
    groups2, phis, best = _optimize_word(U, groups, conjugators, dim, seed)
    if 1.0 - best > RESIDUAL_TOL:
        raise CompilationDiverged(
            f"residual {1.0 - best:.3e} after {MAX_RESTARTS} restarts")
    gd = _gdagger_factors(dim, G)
    factors: List[Tuple] = []
    for (kind, sv), p in zip(groups2, phis):
        dvec = ("diag", np.exp(1j * p))
        if kind == "gamma":
            factors += [("G",), dvec] + gd
        elif kind == "beta":
            factors += [("diag", sv), ("G",), dvec] + gd + [("diag", sv.conj())]
        else:
            factors += [dvec]
    diags, C, scalar = lower_factors(dim, G, factors)
    steps = _steps_from_diags(diags, adaptive=True)
    return MeasurementPattern(dim, intrinsic, steps, invert_word(C))


def compile_clifford(C: np.ndarray, intrinsic: IntrinsicGate
                     ) -> MeasurementPattern:
    """Non-adaptive pattern (Clifford diagonals only) realizing C up to Pauli."""
    dim = intrinsic.dim
    cert_c = certify(C, dim, 1)
    rep = symplectic_of(cert_c)
    g_cert = _intrinsic_cert(intrinsic)
    G = intrinsic.matrix
    h_word = hadamard_from_intrinsic(g_cert)
    tokens = rep_tokens(rep)
    factors: List[Tuple] = []
    gd = _gdagger_factors(dim, G)
    for t in tokens:
        expanded = h_word if t[0] == "H" else [t]
        for u in expanded:
            if u[0] == "shear":
                factors.append(("diag", np.diag(shear_gate(dim, u[1]))))
            elif u == ("G", 1):
                factors.append(("G",))
            elif u == ("G", -1):
                factors += gd
            else:
                raise DimensionMismatch(f"unexpected token {u!r}")
    if not factors or factors[0][0] != "G":
        # transport padding so the word starts with the intrinsic gate
        o, mu, word = pauli_order_data(G, dim, 1)
        w0 = PauliWord(dim, 1, word.z, word.x, 0)
        factors = [("G",)] * o + [("pauli", invert_word(w0)),
                                  ("scalar", 1.0 / mu)] + factors
    diags, Cw, scalar = lower_factors(dim, G, factors)
    steps = _steps_from_diags(diags, adaptive=False)
    pat = MeasurementPattern(dim, intrinsic, steps, invert_word(Cw))
    # dense audit: steps product must equal phase * frame * C
    r = match_pauli(dim, 1, pat.dense_product() @ np.asarray(C).conj().T)
    if r is None:
        raise CompilationDiverged("Clifford lowering failed the dense audit")
    pat.frame = r[1]
    return pat


def transport_pattern(intrinsic: IntrinsicGate) -> MeasurementPattern:
    """o^P identity-rotation steps; the realized product is a Pauli word."""
    dim = intrinsic.dim
    G = intrinsic.matrix
    o, mu, word = pauli_order_data(G, dim, 1)
    steps = [PatternStep(np.zeros(dim.d), False) for _ in range(o)]
    return MeasurementPattern(dim, intrinsic, steps,
                              PauliWord(dim, 1, word.z, word.x, 0))


# --- JSON ----------------------------------------------------------------

def pattern_to_json(p: MeasurementPattern) -> dict:
    obj = {
        "dim": dim_to_json(p.dim),
        "intrinsic": gate_to_json(p.gate) if p.gate is not None else None,
        "steps": [{"phases": [float(v) for v in s.phases],
                   "adaptive": bool(s.adaptive)} for s in p.steps],
        "frame": pauli_to_json(p.frame),
        "frame_semantics": p.frame_semantics,
    }
    if p.gate is None:
        obj["intrinsic_matrix"] = [[[float(v.real), float(v.imag)]
                                    for v in row]
                                   for row in p.intrinsic.matrix]
    return obj


def pattern_from_json(obj: dict) -> MeasurementPattern:
    dim = dim_from_json(obj["dim"])
    if obj.get("intrinsic") is not None:
        gate = gate_from_json(obj["intrinsic"])
        intr = intrinsic_of(gate)
    else:
        gate = None
        M = np.array([[complex(re, im) for re, im in row]
                      for row in obj["intrinsic_matrix"]])
        from .resource import _analyze
        intr = _analyze(dim, M)
    steps = [PatternStep(np.array(s["phases"], dtype=float),
                         bool(s["adaptive"])) for s in obj["steps"]]
    frame = pauli_from_json(dim, obj["frame"])
    return MeasurementPattern(dim, intr, steps, frame,
                              obj.get("frame_semantics", "left"), gate)
