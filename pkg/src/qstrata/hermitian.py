"""Hermitian operators as the dual of the unitary Lie algebra.

The space of Hermitian ``n x n`` matrices carries the scalar product
``<A, B> = Tr(AB) / 2``, the Lie bracket ``[A, B] = (AB - BA) / i`` and the
Jordan product ``[A, B]_+ = AB + BA``.  This module provides those
operations, the momentum map ``x -> |x><x|`` of the unitary action, the
linear Poisson (Kostant-Kirillov-Souriau) and Riemann-Jordan tensors, and
the pointwise orbit tensors obtained from them by functional calculus.

Linear maps on Hermitian matrices ("superoperators") are materialized as
real ``n^2 x n^2`` matrices in the orthonormal basis returned by
:func:`hermitian_basis`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._common import (
    PINV_CUTOFF,
    DimensionError,
    as_hermitian,
    as_square,
    as_vector,
    same_dim,
)

__all__ = [
    "Spectrum",
    "spectrum",
    "hs_inner",
    "lie_bracket",
    "jordan_bracket",
    "momentum_map",
    "quadratic_function",
    "function_brackets",
    "poisson_tensor",
    "riemann_jordan_tensor",
    "complex_tensor",
    "tilde_J",
    "tilde_R",
    "hermitian_basis",
    "to_coordinates",
    "from_coordinates",
    "superoperator_matrix",
    "kahler_J_matrix",
    "kahler_R_matrix",
    "kahler_J",
    "kahler_R",
    "orbit_symplectic",
    "orbit_symplectic_tangent",
    "orbit_metric",
]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order with matching orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def spectrum(a):
    a = as_hermitian(a)
    w, v = np.linalg.eigh(a)
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def hs_inner(a, b):
    """Scalar product ``Tr(AB) / 2`` on Hermitian operators."""
    a = as_hermitian(a)
    b = as_hermitian(b)
    same_dim(a, b)
    # Tr(AB) for Hermitian A, B is real; sum(A * B^T) avoids forming AB.
    return float(np.real(np.sum(a * b.T))) / 2


def lie_bracket(a, b):
    a = as_hermitian(a)
    b = as_hermitian(b)
    same_dim(a, b)
    return _lie(a, b)


def jordan_bracket(a, b):
    a = as_hermitian(a)
    b = as_hermitian(b)
    same_dim(a, b)
    return _jordan(a, b)


def _lie(a, b):
    c = (a @ b - b @ a) / 1j
    return (c + c.conj().T) / 2


def _jordan(a, b):
    c = a @ b + b @ a
    return (c + c.conj().T) / 2


def momentum_map(x):
    """Return ``|x><x|``; ``x`` need not be normalized."""
    x = as_vector(x)
    return np.outer(x, x.conj())


def quadratic_function(a, x):
    """``f_A(x) = <x, Ax> / 2``."""
    a = as_hermitian(a)
    x = as_vector(x)
    if a.shape[0] != x.shape[0]:
        _raise_dim(a, x)
    return float(np.real(np.vdot(x, a @ x))) / 2


def _raise_dim(a, x):
    raise DimensionError(f"operator shape {a.shape} does not act on vector of length {x.shape[0]}")


def _realify_operator(a):
    # x = q + ip  ->  X = (q, p);  A x  ->  G X
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def function_brackets(a, b, x):
    """Riemann-Jordan and Poisson brackets of ``f_A`` and ``f_B`` at ``x``.

    Evaluated in the real coordinates ``(q, p)`` of ``x = q + ip`` using
    the flat metric ``g = sum dq^2 + dp^2`` and the symplectic form
    ``omega = sum dq ^ dp``.  Returns ``(g_bracket, omega_bracket)``;
    their combination ``g + i omega`` equals ``f_{2AB}(x)``.
    """
    a = as_square(a)
    b = as_square(b)
    x = as_vector(x)
    same_dim(a, b)
    n = x.shape[0]
    if a.shape[0] != n:
        _raise_dim(a, x)
    big_x = np.concatenate([x.real, x.imag])
    omega = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    # f_A(X) = X^T G_A X / 2 has Euclidean gradient G_A X for Hermitian A.
    grad_a = _realify_operator(a) @ big_x
    grad_b = _realify_operator(b) @ big_x
    # omega(., Ham_f) = df  <=>  omega_matrix @ Ham_f = grad f
    ham_a = np.linalg.solve(omega, grad_a)
    ham_b = np.linalg.solve(omega, grad_b)
    return float(grad_a @ grad_b), float(ham_a @ omega @ ham_b)


def poisson_tensor(xi, a, b):
    """KKS tensor ``Tr(xi (AB - BA)) / 2i``."""
    xi, a, b = (as_hermitian(m) for m in (xi, a, b))
    same_dim(xi, a, b)
    return float(np.real(np.trace(xi @ (a @ b - b @ a)) / 2j))


def riemann_jordan_tensor(xi, a, b):
    xi, a, b = (as_hermitian(m) for m in (xi, a, b))
    same_dim(xi, a, b)
    return float(np.real(np.trace(xi @ (a @ b + b @ a)))) / 2


def complex_tensor(xi, a, b):
    """``Tr(xi A B)``, whose real part is ``R`` and imaginary part ``Lambda``."""
    xi, a, b = (as_hermitian(m) for m in (xi, a, b))
    same_dim(xi, a, b)
    return complex(np.trace(xi @ a @ b))


def tilde_J(xi, a):
    """``A -> [A, xi]``."""
    xi = as_hermitian(xi)
    a = as_hermitian(a)
    same_dim(xi, a)
    return _lie(a, xi)


def tilde_R(xi, a):
    """``A -> [A, xi]_+``."""
    xi = as_hermitian(xi)
    a = as_hermitian(a)
    same_dim(xi, a)
    return _jordan(a, xi)


@lru_cache(maxsize=None)
def _basis(n):
    mats = []
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = m[k, j] = 1
            mats.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            mats.append(m)
    for l in range(1, n):
        m = np.zeros((n, n), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1
        m[l, l] = -l
        mats.append(m * np.sqrt(2 / (l * (l + 1))))
    mats.append(np.eye(n, dtype=complex) * np.sqrt(2 / n))
    out = np.array(mats)
    out.setflags(write=False)
    return out


def hermitian_basis(n):
    """Generalized Gell-Mann matrices plus a scaled identity.

    The ``n^2`` matrices are orthonormal for :func:`hs_inner`.
    """
    return _basis(int(n))


def to_coordinates(a):
    a = as_hermitian(a)
    basis = _basis(a.shape[0])
    return np.real(np.einsum("kij,ji->k", basis, a)) / 2


def from_coordinates(c):
    c = np.asarray(c, dtype=float)
    n = int(round(np.sqrt(c.shape[0])))
    return np.einsum("k,kij->ij", c, _basis(n))


def superoperator_matrix(fn, n):
    """Real matrix of a linear map on Hermitian ``n x n`` matrices."""
    basis = _basis(n)
    cols = [to_coordinates(fn(e)) for e in basis]
    return np.array(cols).T


def _lie_matrix(xi):
    return superoperator_matrix(lambda a: _lie(a, xi), xi.shape[0])


def _jordan_matrix(xi):
    return superoperator_matrix(lambda a: _jordan(a, xi), xi.shape[0])


def _abs_pinv(m):
    """``(M^T M)^{-1/2}`` on the row space of ``M``, zero on its kernel.

    Built from the singular values of ``M`` itself; squaring first would
    push eigensolver noise above the cutoff.
    """
    _, s, vt = np.linalg.svd(m)
    keep = s > PINV_CUTOFF * s[0] if s[0] > 0 else np.zeros_like(s, bool)
    inv = np.zeros_like(s)
    inv[keep] = 1 / s[keep]
    return (vt.T * inv) @ vt


def kahler_J_matrix(xi):
    """Matrix of the orbit complex structure at ``xi``."""
    xi = as_hermitian(xi)
    m = _lie_matrix(xi)
    # m is antisymmetric, so -m @ m = m.T @ m
    return m @ _abs_pinv(m)


def kahler_R_matrix(xi):
    xi = as_hermitian(xi)
    m = _jordan_matrix(xi)
    # |R~|^{-1} on the image, zero on the kernel; R~ is symmetric.
    w, v = np.linalg.eigh((m + m.T) / 2)
    scale = np.abs(w).max()
    keep = np.abs(w) > PINV_CUTOFF * scale if scale > 0 else np.zeros_like(w, bool)
    inv = np.zeros_like(w)
    inv[keep] = 1 / np.abs(w[keep])
    return m @ ((v * inv) @ v.T)


def kahler_J(xi, a):
    xi = as_hermitian(xi)
    a = as_hermitian(a)
    same_dim(xi, a)
    return from_coordinates(kahler_J_matrix(xi) @ to_coordinates(a))


def kahler_R(xi, a):
    xi = as_hermitian(xi)
    a = as_hermitian(a)
    same_dim(xi, a)
    return from_coordinates(kahler_R_matrix(xi) @ to_coordinates(a))


def orbit_symplectic(xi, a_gen, b_gen):
    """Orbit symplectic form on the tangent vectors ``[A', xi]``, ``[B', xi]``.

    Takes the generators ``A'`` and ``B'`` and returns ``<xi, [A', B']>``.
    """
    xi, a_gen, b_gen = (as_hermitian(m) for m in (xi, a_gen, b_gen))
    same_dim(xi, a_gen, b_gen)
    return hs_inner(xi, _lie(a_gen, b_gen))


def orbit_symplectic_tangent(xi, u, v):
    """Orbit symplectic form evaluated directly on tangent vectors ``u, v``.

    Uses ``eta(u, v) = <A', v>`` for any generator ``A'`` of ``u``.
    """
    xi, u, v = (as_hermitian(m) for m in (xi, u, v))
    same_dim(xi, u, v)
    m = _lie_matrix(xi)
    gen = np.linalg.pinv(m, rcond=PINV_CUTOFF) @ to_coordinates(u)
    return float(gen @ to_coordinates(v))


def orbit_metric(xi, a_gen, b_gen):
    """Invariant Riemannian metric on the unitary orbit through ``xi``.

    The tangent vectors are ``[A', xi]`` and ``[B', xi]``.  The value is
    ``eta(J A, B)`` with ``J`` the orbit complex structure, which is
    symmetric and positive definite and equals :func:`hs_inner` when
    ``xi`` is a projector.  With the bracket ``(AB - BA)/i`` one has
    ``metric(J A, B) = -eta(A, B)``.
    """
    xi, a_gen, b_gen = (as_hermitian(m) for m in (xi, a_gen, b_gen))
    same_dim(xi, a_gen, b_gen)
    m = _lie_matrix(xi)
    u = m @ to_coordinates(a_gen)
    v = m @ to_coordinates(b_gen)
    return float(u @ _abs_pinv(m) @ v)
