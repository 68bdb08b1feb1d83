"""Dense state-vector simulator: the oracle for all verification.

Site 0 is the most significant tensor digit, so |jk> has j at site 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    NonUnitary,
    SiteOutOfRange,
    StateTooLarge,
    ZeroProbabilityForced,
)
from .galois import DimSpec

MAX_AMPS = 10 ** 6
DEFAULT_TOL = 1e-9


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass
class StateVector:
    dim: DimSpec
    n: int
    amps: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if self.amps.size != self.dim.d ** self.n:
            raise DimensionMismatch("amplitude count does not match d^n")
        if self.amps.size > MAX_AMPS:
            raise StateTooLarge(f"{self.amps.size} amplitudes exceed the budget")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        return StateVector(self.dim, self.n, self.amps / self.norm(), self.tol)

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((self.dim.d,) * self.n)

    def copy(self) -> "StateVector":
        return StateVector(self.dim, self.n, self.amps.copy(), self.tol)


def product_state(dim: DimSpec, vectors: Sequence[np.ndarray],
                  tol: float = DEFAULT_TOL) -> StateVector:
    amps = np.array([1.0 + 0j])
    for v in vectors:
        amps = np.kron(amps, np.asarray(v, dtype=complex))
    return StateVector(dim, len(vectors), amps, tol)


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(np.vdot(a.amps, b.amps))


def _check_sites(state: StateVector, sites: Sequence[int]):
    for s in sites:
        if not 0 <= s < state.n:
            raise SiteOutOfRange(f"site {s} outside 0..{state.n - 1}")
    if len(set(sites)) != len(sites):
        raise SiteOutOfRange("duplicate sites")


def apply(state: StateVector, op: np.ndarray,
          sites: Union[int, Sequence[int]]) -> StateVector:
    """Apply a unitary acting on the given sites (in the given order)."""
    if isinstance(sites, int):
        sites = [sites]
    sites = list(sites)
    _check_sites(state, sites)
    d = state.dim.d
    k = len(sites)
    op = np.asarray(op, dtype=complex)
    if op.shape != (d ** k, d ** k):
        raise DimensionMismatch("operator size does not match site count")
    if np.max(np.abs(op.conj().T @ op - np.eye(d ** k))) > max(state.tol, 1e-9):
        raise NonUnitary("operator fails the unitarity check")
    T = state.tensor()
    T = np.moveaxis(T, sites, range(k))
    shape = T.shape
    T = op @ T.reshape(d ** k, -1)
    T = np.moveaxis(T.reshape(shape), range(k), sites)
    return StateVector(state.dim, state.n, T.reshape(-1), state.tol)


@dataclass
class MeasurementBasis:
    """Orthonormal basis over one or more sites; columns are the vectors."""
    dim: DimSpec
    vectors: np.ndarray
    label: str = ""
    nsites: int = 1
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=complex)
        D = self.dim.d ** self.nsites
        if self.vectors.shape != (D, D):
            raise DimensionMismatch("basis must be a square matrix of columns")
        gram = self.vectors.conj().T @ self.vectors
        if np.max(np.abs(gram - np.eye(D))) > max(self.tol, 1e-9):
            raise NonUnitary(f"basis {self.label!r} is not orthonormal")

    def is_transport_valid(self) -> bool:
        """Every vector has constant-modulus computational amplitudes."""
        D = self.vectors.shape[0]
        target = 1.0 / np.sqrt(D)
        return bool(np.max(np.abs(np.abs(self.vectors) - target)) < 1e-8)


def z_basis(dim: DimSpec) -> MeasurementBasis:
    return MeasurementBasis(dim, np.eye(dim.d, dtype=complex), "Z")


def x_basis(dim: DimSpec) -> MeasurementBasis:
    from .gates import hadamard
    return MeasurementBasis(dim, hadamard(dim), "X")


def basis_from_unitary(dim: DimSpec, U: np.ndarray, label: str = "",
                       nsites: int = 1) -> MeasurementBasis:
    """Basis {U|k>}: column k of U is outcome k's vector."""
    return MeasurementBasis(dim, np.asarray(U, dtype=complex), label, nsites)


def measure(state: StateVector, basis: MeasurementBasis,
            sites: Union[int, Sequence[int]], rng=None,
            forced_outcome: Optional[int] = None
            ) -> Tuple[int, StateVector, float]:
    """Measure sites in the basis; returns (outcome, posterior, probability).

    The measured sites are removed from the posterior; remaining sites keep
    their relative order.
    """
    if isinstance(sites, int):
        sites = [sites]
    sites = list(sites)
    _check_sites(state, sites)
    d = state.dim.d
    k = len(sites)
    if basis.nsites != k:
        raise DimensionMismatch("basis site count does not match")
    T = state.tensor()
    T = np.moveaxis(T, sites, range(k)).reshape(d ** k, -1)
    branch = basis.vectors.conj().T @ T      # outcome -> residual amplitudes
    probs = np.sum(np.abs(branch) ** 2, axis=1)
    total = probs.sum()
    probs = probs / total
    if forced_outcome is not None:
        outcome = int(forced_outcome)
        if not 0 <= outcome < d ** k:
            raise SiteOutOfRange("forced outcome out of range")
        if probs[outcome] < max(state.tol, 1e-12):
            raise ZeroProbabilityForced(
                f"outcome {outcome} has probability {probs[outcome]:.3e}")
    else:
        outcome = int(_as_rng(rng).choice(d ** k, p=probs / probs.sum()))
    post = branch[outcome]
    post = post / np.linalg.norm(post)
    return outcome, StateVector(state.dim, state.n - k, post, state.tol), \
        float(probs[outcome])


def reduced_density(state: StateVector, keep_sites: Sequence[int]) -> np.ndarray:
    keep_sites = list(keep_sites)
    _check_sites(state, keep_sites)
    if not keep_sites or len(keep_sites) >= state.n:
        raise SiteOutOfRange("keep_sites must be a nonempty proper subset")
    d = state.dim.d
    k = len(keep_sites)
    T = np.moveaxis(state.tensor(), keep_sites, range(k)).reshape(d ** k, -1)
    return T @ T.conj().T


def schmidt(state: StateVector, left_sites: Sequence[int]
            ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Schmidt data across the bipartition (left_sites | rest).

    Returns (coefficients descending, left vectors as columns, right vectors
    as columns); sum of squared coefficients is 1.
    """
    left_sites = list(left_sites)
    _check_sites(state, left_sites)
    d = state.dim.d
    k = len(left_sites)
    T = np.moveaxis(state.tensor(), left_sites, range(k)).reshape(d ** k, -1)
    u, s, vh = np.linalg.svd(T, full_matrices=False)
    return s, u, vh.conj().T


def is_max_entangled(state: StateVector, left_sites: Sequence[int],
                     tol: float = 1e-8) -> bool:
    s, _, _ = schmidt(state, left_sites)
    D = min(state.dim.d ** len(left_sites),
            state.dim.d ** (state.n - len(left_sites)))
    lam = s ** 2
    return bool(lam.size == D and np.max(np.abs(lam - 1.0 / D)) < tol)


# --- JSON ----------------------------------------------------------------

def state_to_json(state: StateVector) -> dict:
    from .galois import dim_to_json
    return {
        "dim": dim_to_json(state.dim),
        "n": state.n,
        "amps": [[float(v.real), float(v.imag)] for v in state.amps],
    }


def state_from_json(obj: dict) -> StateVector:
    from .galois import dim_from_json
    dim = dim_from_json(obj["dim"])
    amps = np.array([complex(re, im) for re, im in obj["amps"]])
    return StateVector(dim, int(obj["n"]), amps)
