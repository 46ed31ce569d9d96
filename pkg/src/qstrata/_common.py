"""Tolerances, exceptions and input coercion shared by every module."""

from __future__ import annotations

import numpy as np

TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_TRACE = 1e-9
TOL_NORM = 1e-9
TOL_NUM = 1e-8
TOL_RANK = 1e-8
PINV_CUTOFF = 1e-10
INVERTIBLE_CUTOFF = 1e-10


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class ValidationError(ValueError):
    """An input does not satisfy the invariants of its type."""


class SingularMatrixError(ValueError):
    """A matrix that must be invertible is (numerically) singular."""


class DegenerateMapError(ValueError):
    """A Kraus map is degenerate where a non-degenerate one is required."""


def as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def as_square(a, name="matrix"):
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def as_hermitian(a, tol=TOL_HERM, name="operator"):
    """Validate ``a`` as Hermitian and return its symmetrized copy."""
    a = as_square(a, name)
    residual = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if residual > tol:
        raise ValidationError(f"{name} is not Hermitian (residual {residual:.3e})")
    return (a + a.conj().T) / 2


def as_density(rho, tol_psd=TOL_PSD, tol_trace=TOL_TRACE, name="state"):
    """Validate ``rho`` as a density state (PSD, unit trace)."""
    rho = as_hermitian(rho, name=name)
    trace = np.trace(rho).real
    if abs(trace - 1.0) > tol_trace:
        raise ValidationError(f"{name} has trace {trace!r}, expected 1")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -tol_psd:
        raise ValidationError(f"{name} has negative eigenvalue {lam_min:.3e}")
    return rho


def as_vector(x, name="vector"):
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1:
        raise DimensionError(f"{name} must be 1-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError(f"{name} has non-finite entries")
    return x


def as_unit_vector(x, tol=TOL_NORM, name="vector"):
    x = as_vector(x, name)
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"{name} has norm {norm!r}, expected 1")
    return x


def same_dim(*mats):
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(shapes)}")


def is_invertible(a, cutoff=INVERTIBLE_CUTOFF):
    """Scale-invariant invertibility test on the singular values."""
    s = np.linalg.svd(a, compute_uv=False)
    return bool(s[0] > 0 and s[-1] > cutoff * s[0])


def dagger(a):
    return a.conj().T
