"""Kraus maps ``rho -> sum_i A_i rho A_i^dag`` and their action on states.

No trace-preservation condition is imposed.  Kraus maps compose into a
semigroup; the invertible elements are exactly conjugations by ``GL(n)``.
On density states the trace-renormalized action is used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._common import (
    INVERTIBLE_CUTOFF,
    TOL_PSD,
    DegenerateMapError,
    DimensionError,
    SingularMatrixError,
    ValidationError,
    as_density,
    as_hermitian,
    as_square,
    is_invertible,
)

__all__ = [
    "KrausMap",
    "apply",
    "compose",
    "choi_matrix",
    "canonical_form",
    "try_as_group_element",
    "is_nondegenerate",
    "normalized_apply",
    "gl_apply",
    "convex_image_weight",
]


@dataclass(frozen=True, eq=False)
class KrausMap:
    """A finite tuple of ``n x n`` operators.

    Zero operators are dropped on construction; at least one nonzero
    operator must remain.
    """

    ops: np.ndarray  # shape (m, n, n)

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
            raise DimensionError(f"Kraus operators must be square, got shape {ops.shape}")
        if not np.all(np.isfinite(ops)):
            raise ValidationError("Kraus operators have non-finite entries")
        nonzero = np.array([np.any(op != 0) for op in ops], dtype=bool)
        if not nonzero.any():
            raise ValidationError("Kraus map needs at least one nonzero operator")
        ops = ops[nonzero].copy()
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_list(cls, ops):
        return cls(np.array([as_square(op, "Kraus operator") for op in ops]))

    @property
    def dim(self):
        return self.ops.shape[1]

    def __len__(self):
        return self.ops.shape[0]

    def __iter__(self):
        return iter(self.ops)


def _as_kraus(k):
    return k if isinstance(k, KrausMap) else KrausMap.from_list(k)


def _check_dim(k, rho):
    if rho.shape[0] != k.dim:
        raise DimensionError(f"Kraus map acts on dimension {k.dim}, state has {rho.shape[0]}")


def _apply(k, rho):
    out = np.einsum("kij,jl,kml->im", k.ops, rho, k.ops.conj())
    return (out + out.conj().T) / 2


def apply(k, rho):
    """Unnormalized action on a Hermitian operator."""
    k = _as_kraus(k)
    rho = as_hermitian(rho)
    _check_dim(k, rho)
    return _apply(k, rho)


def compose(k, k2):
    """Kraus map of ``k o k2``: all products ``A_i B_j`` (``i`` outer)."""
    k = _as_kraus(k)
    k2 = _as_kraus(k2)
    if k.dim != k2.dim:
        raise DimensionError(f"cannot compose dimensions {k.dim} and {k2.dim}")
    prods = np.einsum("aij,bjk->abik", k.ops, k2.ops).reshape(-1, k.dim, k.dim)
    return KrausMap(prods)


def choi_matrix(k):
    """``sum_i |vec A_i><vec A_i|`` with column-major ``vec``."""
    k = _as_kraus(k)
    vecs = np.array([op.reshape(-1, order="F") for op in k.ops])
    return vecs.T @ vecs.conj()


def _fix_phase(op):
    flat = op.reshape(-1, order="F")
    idx = np.argmax(np.abs(flat) > np.abs(flat).max() * (1 - 1e-12))
    phase = flat[idx] / abs(flat[idx])
    return op / phase


def canonical_form(k, tol=INVERTIBLE_CUTOFF):
    """Equivalent Kraus map with pairwise orthogonal operators.

    The operators are ``sqrt(mu_k)`` times the unit eigenvectors of the
    Choi matrix, reshaped; their number is the Choi rank.  Each operator
    is rotated so that its first largest-modulus entry is real positive.
    """
    k = _as_kraus(k)
    w, v = np.linalg.eigh(choi_matrix(k))
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    keep = w > tol * w[0]
    n = k.dim
    ops = [_fix_phase(np.sqrt(mu) * v[:, i].reshape(n, n, order="F")) for i, mu in zip(np.flatnonzero(keep), w[keep])]
    return KrausMap(np.array(ops))


def try_as_group_element(k):
    """Return ``A`` with ``K(rho) = A rho A^dag`` if ``K`` is a group element.

    ``None`` when the canonical form has more than one operator or its
    operator is singular.
    """
    canon = canonical_form(k)
    if len(canon) != 1:
        return None
    op = canon.ops[0]
    return op.copy() if is_invertible(op) else None


def is_nondegenerate(k, tol=TOL_PSD):
    """True iff ``sum_i A_i^dag A_i`` is invertible."""
    k = _as_kraus(k)
    t = np.einsum("kji,kjl->il", k.ops.conj(), k.ops)
    return bool(np.linalg.eigvalsh((t + t.conj().T) / 2)[0] > k.dim * tol)


def _require_nondegenerate(k):
    if not is_nondegenerate(k):
        raise DegenerateMapError("sum of A_i^dag A_i is singular")


def normalized_apply(k, rho):
    """``K(rho) / Tr K(rho)`` on a density state; ``K`` must be non-degenerate."""
    k = _as_kraus(k)
    rho = as_density(rho)
    _check_dim(k, rho)
    _require_nondegenerate(k)
    out = _apply(k, rho)
    tr = np.trace(out).real
    assert tr > 0, "non-degenerate map produced nonpositive trace"
    return out / tr


def gl_apply(a, rho):
    """``A rho A^dag / Tr(A rho A^dag)`` for invertible ``A``."""
    a = as_square(a)
    rho = as_density(rho)
    if a.shape != rho.shape:
        raise DimensionError(f"operator shape {a.shape} vs state shape {rho.shape}")
    if not is_invertible(a):
        raise SingularMatrixError("group element must be invertible")
    out = a @ rho @ a.conj().T
    out = (out + out.conj().T) / 2
    return out / np.trace(out).real


def convex_image_weight(k, rho, rho2, lam):
    """Weight ``lam~`` with ``K~(lam rho + (1-lam) rho2) = lam~ K~(rho) + (1-lam~) K~(rho2)``.

    ``lam~ = lam t / (lam t + (1 - lam) t2)`` with ``t = Tr K(rho)`` and
    ``t2 = Tr K(rho2)`` the traces before renormalization.
    """
    k = _as_kraus(k)
    rho = as_density(rho)
    rho2 = as_density(rho2)
    _check_dim(k, rho)
    _check_dim(k, rho2)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam must lie in [0, 1], got {lam!r}")
    _require_nondegenerate(k)
    t = np.trace(_apply(k, rho)).real
    t2 = np.trace(_apply(k, rho2)).real
    return float(lam * t / (lam * t + (1 - lam) * t2))
