"""Generalized Pauli / Heisenberg-Weyl words with exact phase bookkeeping.

A word is phase * Z-part * X-part.  The phase is an integer exponent of
e^{2 pi i / phase_den} with phase_den = 2d (integer ring, tau_d powers) or
4p (finite field, chi and chi_4 contributions), so products and conjugation
tables stay exact until converted to complex at the simulator boundary.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, WrongFormalism
from .galois import INTEGER_RING, DimSpec


@dataclass(frozen=True)
class PauliWord:
    dim: DimSpec
    n: int
    z: Tuple[int, ...]
    x: Tuple[int, ...]
    phase_num: int = 0

    def __post_init__(self):
        if len(self.z) != self.n or len(self.x) != self.n:
            raise DimensionMismatch("exponent vectors must have length n")
        object.__setattr__(self, "z", tuple(v % self.dim.d for v in self.z))
        object.__setattr__(self, "x", tuple(v % self.dim.d for v in self.x))
        object.__setattr__(self, "phase_num",
                           self.phase_num % self.dim.phase_den)

    @property
    def phase(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.phase_num / self.dim.phase_den)

    def is_identity(self) -> bool:
        return all(v == 0 for v in self.z) and all(v == 0 for v in self.x)

    def __str__(self):
        parts = [f"e^(2pi i {self.phase_num}/{self.dim.phase_den})"]
        for i in range(self.n):
            parts.append(f"Z^{self.z[i]}X^{self.x[i]}")
        return " ".join(parts)


def identity_word(dim: DimSpec, n: int = 1) -> PauliWord:
    return PauliWord(dim, n, (0,) * n, (0,) * n, 0)


def single_word(dim: DimSpec, n: int, site: int, z: int = 0, x: int = 0,
                phase_num: int = 0) -> PauliWord:
    zv = [0] * n
    xv = [0] * n
    zv[site], xv[site] = z, x
    return PauliWord(dim, n, tuple(zv), tuple(xv), phase_num)


def normal_form(a: PauliWord, b: PauliWord) -> PauliWord:
    """Product a*b brought to phase * Z-part * X-part with exact phase."""
    if a.dim != b.dim or a.n != b.n:
        raise DimensionMismatch("words live on different systems")
    dim = a.dim
    phase = a.phase_num + b.phase_num
    z, x = [], []
    for i in range(a.n):
        # move X^{a.x} right past Z^{b.z}: X(x)Z(z) = char(-z x) Z(z)X(x)
        phase += dim.char_exp(dim.neg(dim.mul(b.z[i], a.x[i])))
        z.append(dim.add(a.z[i], b.z[i]))
        x.append(dim.add(a.x[i], b.x[i]))
    return PauliWord(dim, a.n, tuple(z), tuple(x), phase)


def invert_word(w: PauliWord) -> PauliWord:
    """Inverse word in normal form."""
    dim = w.dim
    phase = -w.phase_num
    z, x = [], []
    for i in range(w.n):
        # (Z^z X^x)^-1 = X^{-x} Z^{-z} = char(-z x) Z^{-z} X^{-x}
        phase += dim.char_exp(dim.neg(dim.mul(w.z[i], w.x[i])))
        z.append(dim.neg(w.z[i]))
        x.append(dim.neg(w.x[i]))
    return PauliWord(dim, w.n, tuple(z), tuple(x), phase)


def word_power(w: PauliWord, k: int) -> PauliWord:
    out = identity_word(w.dim, w.n)
    if k < 0:
        w, k = invert_word(w), -k
    for _ in range(k):
        out = normal_form(out, w)
    return out


def tau_word(dim: DimSpec, n: int = 1) -> PauliWord:
    """The scalar word tau_d (integer ring only)."""
    return PauliWord(dim, n, (0,) * n, (0,) * n, dim.tau_exp)


def y_word(dim: DimSpec) -> PauliWord:
    """Y_d = tau_d X^-1 Z^-1 as a normal-form word (integer ring)."""
    xinv = single_word(dim, 1, 0, x=dim.neg(1))
    zinv = single_word(dim, 1, 0, z=dim.neg(1))
    w = normal_form(xinv, zinv)
    return PauliWord(dim, 1, w.z, w.x, w.phase_num + dim.tau_exp)


def weyl(dim: DimSpec, z: int, x: int, t: int = 0) -> PauliWord:
    """Weyl operator W(z,x,t); t is a Galois-ring element when p = 2."""
    if dim.kind == INTEGER_RING:
        raise WrongFormalism("Weyl operators live in the finite-field formalism")
    if dim.p == 2:
        # chi_4(t) * chi_4(-z x) with the product lifted to GR(4,m)
        zl, xl = dim.gr_embed(z), dim.gr_embed(x)
        tr = (dim.gr_trace(t) + dim.gr_trace(dim.gr_neg(dim.gr_mul(zl, xl)))) % 4
        phase = (2 * tr) % dim.phase_den  # i^tr in units of 2pi/(4p), p=2
    else:
        inv2 = dim.inv(dim.scalar(2))
        arg = dim.add(t, dim.mul(dim.neg(inv2), dim.mul(z, x)))
        phase = dim.char_exp(arg)
    return PauliWord(dim, 1, (z,), (x,), phase)


# --- dense matrices -------------------------------------------------------

def zmat(dim: DimSpec, a: int) -> np.ndarray:
    """Z^a (ring) or Z(a) (field) as a dense d x d matrix."""
    return np.diag([dim.char_phase(dim.mul(a, u)) for u in dim.elements])


def xmat(dim: DimSpec, b: int) -> np.ndarray:
    """X^b (ring) or X(b) (field): |u + b><u|."""
    d = dim.d
    out = np.zeros((d, d), dtype=complex)
    for u in dim.elements:
        out[dim.add(u, b), u] = 1.0
    return out


def zx_matrix(w: PauliWord) -> np.ndarray:
    """Dense matrix of the Z/X part of the word, phase ignored."""
    out = np.array([[1.0 + 0j]])
    for i in range(w.n):
        out = np.kron(out, zmat(w.dim, w.z[i]) @ xmat(w.dim, w.x[i]))
    return out


def matrix_of_pauli(w: PauliWord) -> np.ndarray:
    return w.phase * zx_matrix(w)


# --- matching dense matrices back to words --------------------------------

def match_pauli(dim: DimSpec, n: int, M: np.ndarray,
                tol: float = 1e-8) -> Optional[Tuple[complex, PauliWord]]:
    """Recognize M as phase * Pauli word; None if it is not one.

    Returns (phase, word) with M ~ phase * zx_matrix(word).  The word's
    exact phase field is populated when the complex phase snaps onto the
    2*pi/phase_den lattice (it always does for proper Clifford
    conjugations); otherwise the word carries phase 0.
    """
    d = dim.d
    if M.shape != (d ** n, d ** n):
        raise DimensionMismatch("matrix size does not match (dim, n)")
    # X part from the support of M e_0
    col = M[:, 0]
    j = int(np.argmax(np.abs(col)))
    if abs(abs(col[j]) - 1.0) > tol:
        return None
    x = _index_digits(dim, n, j)
    xinv = np.array([[1.0 + 0j]])
    for i in range(n):
        xinv = np.kron(xinv, xmat(dim, dim.neg(x[i])))
    D = xinv @ M
    diag = np.diag(D).copy()
    if np.max(np.abs(D - np.diag(diag))) > tol:
        return None
    phase = diag[0]
    if abs(abs(phase) - 1.0) > tol:
        return None
    rel = diag / phase
    z = []
    for i in range(n):
        zi = None
        for cand in dim.elements:
            ok = True
            for u in dim.elements:
                idx = _site_index(dim, n, i, u)
                if abs(rel[idx] - dim.char_phase(dim.mul(cand, u))) > tol:
                    ok = False
                    break
            if ok:
                zi = cand
                break
        if zi is None:
            return None
        z.append(zi)
    # we decomposed M = phase * X^x Z^z; reorder to Z-part-leftmost form
    for i in range(n):
        phase *= dim.char_phase(dim.neg(dim.mul(z[i], x[i])))
    word = PauliWord(dim, n, tuple(z), tuple(x), 0)
    # full verification
    if np.max(np.abs(M - phase * zx_matrix(word))) > tol:
        return None
    # snap phase onto the exact lattice when possible
    den = dim.phase_den
    num = round(cmath.phase(phase) * den / (2 * cmath.pi)) % den
    snapped = cmath.exp(2j * cmath.pi * num / den)
    if abs(snapped - phase) <= tol:
        word = PauliWord(dim, n, tuple(z), tuple(x), num)
    return phase, word


def _index_digits(dim: DimSpec, n: int, idx: int) -> Tuple[int, ...]:
    """Site values of a flat tensor index; site 0 is most significant."""
    out = []
    for _ in range(n):
        out.append(idx % dim.d)
        idx //= dim.d
    return tuple(reversed(out))


def _site_index(dim: DimSpec, n: int, site: int, value: int) -> int:
    return value * dim.d ** (n - 1 - site)


# --- JSON ----------------------------------------------------------------

def pauli_to_json(w: PauliWord) -> dict:
    return {
        "phase": [w.phase_num, w.dim.phase_den],
        "z": [list(w.dim.coeffs_of(v)) for v in w.z],
        "x": [list(w.dim.coeffs_of(v)) for v in w.x],
    }


def pauli_from_json(dim: DimSpec, obj: dict) -> PauliWord:
    num, den = obj["phase"]
    if den != dim.phase_den:
        raise DimensionMismatch("phase denominator does not match DimSpec")
    z = tuple(dim.elem_from_coeffs(c) for c in obj["z"])
    x = tuple(dim.elem_from_coeffs(c) for c in obj["x"])
    return PauliWord(dim, len(z), z, x, num)
