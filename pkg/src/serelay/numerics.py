"""
Complex linear-algebra and scalar search kernels.

All routines are pure functions of their inputs. Returned eigen and
singular vectors follow one phase convention: the first entry whose
modulus is not negligible is made real and nonnegative, so repeated
calls give bit-identical vectors.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import (DecompositionFailure, InvalidInterval,
                     NotPositiveDefinite, ZfInfeasible)

__all__ = ['SvdResult', 'GenEigResult', 'svd', 'top_singular_triplet',
           'nullspace_basis', 'max_gen_eigvec', 'golden_section_max',
           'hermitian', 'phase_normalize', 'random_unit_vectors']

_PHASE_RTOL = 1e-12
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SvdResult:
    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


@dataclass(frozen=True)
class GenEigResult:
    vector: np.ndarray
    value: float


def hermitian(A):
    """Return (A + A^H) / 2."""
    A = np.asarray(A)
    return 0.5 * (A + A.conj().T)


def _phase_factor(x):
    x = np.asarray(x)
    scale = np.max(np.abs(x)) if x.size else 0.0
    if scale == 0.0:
        return 1.0
    idx = int(np.argmax(np.abs(x) > _PHASE_RTOL * scale))
    return np.conj(x[idx]) / abs(x[idx])


def phase_normalize(x):
    """Rotate ``x`` so its first non-negligible entry is real and >= 0."""
    x = np.asarray(x, dtype=complex)
    return x * _phase_factor(x)


def _check_finite(A):
    A = np.asarray(A, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def svd(A):
    """
    Full SVD ``A = U diag(s) V^H`` with descending singular values.

    Each right singular vector is phase-normalized and the matching left
    singular vector receives the same rotation, so ``A v_i = s_i u_i`` is
    preserved.
    """
    A = _check_finite(np.atleast_2d(A))
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    V = Vh.conj().T
    for i in range(V.shape[1]):
        ph = _phase_factor(V[:, i])
        V[:, i] *= ph
        if i < U.shape[1] and i < s.size:
            U[:, i] *= ph
    return SvdResult(U=U, singular_values=s, V=V)


def top_singular_triplet(A):
    """Return ``(sigma_max, u, v)`` with ``u^H A v = sigma_max``."""
    res = svd(A)
    return float(res.singular_values[0]), res.U[:, 0].copy(), res.V[:, 0].copy()


def nullspace_basis(h):
    """
    Orthonormal basis ``B`` (M x (M-1)) of the null space of ``h^H``.

    Raises
    ------
    ZfInfeasible
        If ``M < 2`` or ``h`` is the zero vector.
    """
    h = np.asarray(h, dtype=complex).ravel()
    M = h.size
    if M < 2:
        raise ZfInfeasible(f"null space of a length-{M} vector is empty")
    if not np.any(h):
        raise ZfInfeasible("zero eavesdropper estimate has no unique null space")
    # right singular vectors of the 1 x M row h^H beyond the first
    res = svd(h.conj()[np.newaxis, :])
    return res.V[:, 1:].copy()


def max_gen_eigvec(R_num, R_den):
    """
    Maximize ``x^H R_num x / x^H R_den x`` over nonzero ``x``.

    The pencil is whitened with the Cholesky factor of ``R_den`` and the
    resulting Hermitian problem solved with ``eigh``. The returned vector
    has unit Euclidean norm.

    Raises
    ------
    NotPositiveDefinite
        If the smallest eigenvalue of ``R_den`` is not above
        ``1e-12 * trace(R_den)``.
    """
    R_num = hermitian(_check_finite(np.atleast_2d(R_num)))
    R_den = hermitian(_check_finite(np.atleast_2d(R_den)))
    tr = float(np.real(np.trace(R_den)))
    try:
        min_eig = float(np.linalg.eigvalsh(R_den)[0])
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    if tr <= 0.0 or min_eig <= 1e-12 * tr:
        raise NotPositiveDefinite(
            f"denominator min eigenvalue {min_eig:.3e} (trace {tr:.3e})")
    try:
        L = np.linalg.cholesky(R_den)
        Linv = np.linalg.inv(L)
        C = hermitian(Linv @ R_num @ Linv.conj().T)
        _, vecs = np.linalg.eigh(C)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    x = Linv.conj().T @ vecs[:, -1]
    x = phase_normalize(x / np.linalg.norm(x))
    value = float(np.real(x.conj() @ R_num @ x) / np.real(x.conj() @ R_den @ x))
    return GenEigResult(vector=x, value=value)


def golden_section_max(f, lo, hi, tol=1e-8):
    """
    Golden-section search for a maximum of ``f`` on ``[lo, hi]``.

    The endpoints are evaluated as well, so monotone functions return the
    better endpoint instead of a point ``tol`` inside it.

    Returns
    -------
    (x_star, f_star)
    """
    if not lo < hi:
        raise InvalidInterval(f"need lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise InvalidInterval(f"tol must be positive, got {tol}")
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    best = (c, fc) if fc >= fd else (d, fd)
    for x in (float(lo), float(hi)):
        fx = f(x)
        if fx > best[1]:
            best = (x, fx)
    return best


def random_unit_vectors(rng, count, dim):
    """Draw ``count`` isotropic unit vectors in C^dim (rows)."""
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
