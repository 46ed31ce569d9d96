"""Rank and signature stratification, charts, faces and boundary geometry."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._common import (
    TOL_PSD,
    TOL_RANK,
    TOL_TRACE,
    DimensionError,
    SingularMatrixError,
    ValidationError,
    as_density,
    as_hermitian,
    is_invertible,
    same_dim,
)

__all__ = [
    "Signature",
    "rank_of",
    "signature_of",
    "orbit_dimension",
    "linearized_orbit_rank",
    "kernel_basis",
    "tangent_membership",
    "ChartCoordinates",
    "chart_pairs",
    "chart_forward",
    "chart_reconstruct",
    "choose_chart_index",
    "FaceDescription",
    "face_of",
    "in_face",
    "is_extreme",
    "tangency_point",
    "collinearity_angle",
    "TangencyRecord",
    "curve_stratum_tangency",
]


class Signature(NamedTuple):
    k_plus: int
    k_minus: int

    @property
    def rank(self):
        return self.k_plus + self.k_minus


def _eigvals(xi):
    return np.linalg.eigvalsh(as_hermitian(xi))


def _significant(w, tol):
    scale = np.abs(w).max() if w.size else 0.0
    if scale == 0:
        return np.zeros_like(w, dtype=bool)
    return np.abs(w) > tol * scale


def rank_of(xi, tol=TOL_RANK):
    """Number of eigenvalues with ``|lam| > tol * max|lam|``."""
    w = _eigvals(xi)
    return int(_significant(w, tol).sum())


def signature_of(xi, tol=TOL_RANK):
    w = _eigvals(xi)
    sig = _significant(w, tol)
    return Signature(int((sig & (w > 0)).sum()), int((sig & (w < 0)).sum()))


def orbit_dimension(n, sig):
    """Real dimension ``2nk - k^2`` of the ``GL(n)`` orbit with signature ``sig``."""
    k_plus, k_minus = sig
    if k_plus < 0 or k_minus < 0 or k_plus + k_minus > n:
        raise ValueError(f"invalid signature {tuple(sig)} for n={n}")
    k = k_plus + k_minus
    return 2 * n * k - k * k


def linearized_orbit_rank(xi, tol=1e-9):
    """Numerical rank of ``T -> T xi + xi T^dag`` over the real parameters of ``T``."""
    xi = as_hermitian(xi)
    n = xi.shape[0]
    cols = []
    for j in range(n):
        for k in range(n):
            for unit in (1.0, 1j):
                t = np.zeros((n, n), dtype=complex)
                t[j, k] = unit
                d = t @ xi + xi @ t.conj().T
                cols.append(np.concatenate([d.real.ravel(), d.imag.ravel()]))
    s = np.linalg.svd(np.array(cols).T, compute_uv=False)
    if s[0] == 0:
        return 0
    return int((s > tol * s[0]).sum())


def kernel_basis(xi, tol=TOL_RANK):
    """Orthonormal columns spanning the numerical kernel of ``xi``."""
    xi = as_hermitian(xi)
    w, v = np.linalg.eigh(xi)
    return v[:, ~_significant(w, tol)]


def tangent_membership(xi, b, tol=1e-8, rank_tol=TOL_RANK):
    """Is ``b`` tangent at ``xi`` to its ``GL`` orbit?

    True iff the compression of ``b`` to ``Ker(xi)`` has spectral norm at
    most ``tol``.
    """
    xi = as_hermitian(xi)
    b = as_hermitian(b)
    same_dim(xi, b)
    return _kernel_block_norm(xi, b, rank_tol) <= tol


def _kernel_block_norm(xi, b, rank_tol):
    k = kernel_basis(xi, rank_tol)
    if k.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(k.conj().T @ b @ k, 2))


def chart_pairs(n, index):
    """Upper-triangle positions ``(r, s)``, ``r < s``, touching ``index``, row-major."""
    members = set(index)
    return [(r, s) for r in range(n) for s in range(r + 1, n) if r in members or s in members]


def _check_index(n, index):
    index = tuple(int(j) for j in index)
    if not index or list(index) != sorted(set(index)) or index[0] < 0 or index[-1] >= n:
        raise ValueError(f"chart index must be strictly increasing within 0..{n - 1}, got {index}")
    return index


@dataclass(frozen=True, eq=False)
class ChartCoordinates:
    """Chart values: diagonal entries on ``index`` and the off-diagonal
    entries ``a_rs`` (``r < s``) of the ``index`` rows, ordered as
    :func:`chart_pairs`."""

    n: int
    index: tuple
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        k = len(self.index)
        if self.diag.shape != (k,) or self.offdiag.shape != ((2 * self.n * k - k * k - k) // 2,):
            raise DimensionError("coordinate counts do not match (n, k)")

    @property
    def pairs(self):
        return chart_pairs(self.n, self.index)

    def as_real(self):
        """Flatten to ``2nk - k^2`` reals: diagonal, then (Re, Im) per entry."""
        return np.concatenate([self.diag, np.column_stack([self.offdiag.real, self.offdiag.imag]).ravel()])


def chart_forward(xi, index, tol=TOL_RANK):
    xi = as_hermitian(xi)
    n = xi.shape[0]
    index = _check_index(n, index)
    k = len(index)
    r = rank_of(xi, tol)
    if r != k:
        raise ValidationError(f"operator has rank {r}, chart expects {k}")
    if not is_invertible(xi[np.ix_(index, index)]):
        raise SingularMatrixError(f"principal block on {index} is singular")
    diag = xi[list(index), list(index)].real.copy()
    offdiag = np.array([xi[r_, s] for r_, s in chart_pairs(n, index)], dtype=complex)
    return ChartCoordinates(n, index, diag, offdiag)


def chart_reconstruct(coords):
    """Rebuild the rank-``k`` Hermitian matrix from its chart coordinates.

    Uses ``a_ij = sum_{r,s in J} a_ir a^{rs} conj(a_js)`` where ``a^{rs}``
    is the inverse of the ``J x J`` block.  The ``J`` rows and columns
    are written back verbatim.
    """
    n, index = coords.n, _check_index(coords.n, coords.index)
    rows = np.zeros((n, n), dtype=complex)
    mask = np.zeros((n, n), dtype=bool)
    for j, d in zip(index, coords.diag):
        rows[j, j] = d
        mask[j, j] = True
    for (r, s), a in zip(chart_pairs(n, index), coords.offdiag):
        rows[r, s] = a
        rows[s, r] = np.conj(a)
        mask[r, s] = mask[s, r] = True
    block = rows[np.ix_(index, index)]
    if not is_invertible(block):
        raise SingularMatrixError(f"principal block on {index} is singular")
    cols = rows[:, list(index)]
    out = cols @ np.linalg.solve(block, cols.conj().T)
    out = (out + out.conj().T) / 2
    out[mask] = rows[mask]
    return out


def choose_chart_index(xi, tol=TOL_RANK):
    """Index set of size ``rank(xi)`` whose principal block is best conditioned."""
    xi = as_hermitian(xi)
    n = xi.shape[0]
    k = rank_of(xi, tol)
    if k == 0:
        raise ValidationError("zero operator has no chart")
    best, best_cond = None, -1.0
    for index in itertools.combinations(range(n), k):
        s = np.linalg.svd(xi[np.ix_(index, index)], compute_uv=False)
        cond = s[-1] / s[0] if s[0] > 0 else 0.0
        if cond > best_cond:
            best, best_cond = index, cond
    return best


@dataclass(frozen=True, eq=False)
class FaceDescription:
    support_basis: np.ndarray
    reduced_state: np.ndarray

    @property
    def dim(self):
        return self.reduced_state.shape[0]

    def embed(self, reduced):
        """Map a density state on the support back into the full space."""
        q = self.support_basis
        return q @ np.asarray(reduced, dtype=complex) @ q.conj().T


def face_of(rho, tol=TOL_RANK):
    """Smallest face of the state space containing ``rho``."""
    rho = as_density(rho)
    w, v = np.linalg.eigh(rho)
    q = v[:, _significant(w, tol)][:, ::-1]
    reduced = q.conj().T @ rho @ q
    return FaceDescription(q, (reduced + reduced.conj().T) / 2)


def in_face(sigma, face, tol=1e-9):
    """Does ``sigma`` lie in ``face``, i.e. ``sigma = P sigma P`` for the support projector?"""
    sigma = as_density(sigma)
    q = face.support_basis
    if sigma.shape[0] != q.shape[0]:
        raise DimensionError("state and face live in different dimensions")
    p = q @ q.conj().T
    return bool(np.max(np.abs(p @ sigma @ p - sigma)) <= tol)


def is_extreme(rho, tol=TOL_RANK):
    """Extreme points of the state space are exactly the pure states."""
    return rank_of(as_density(rho), tol) == 1


def collinearity_angle(a, b, c):
    """Angle (radians) between ``b - a`` and ``c - b``, up to orientation."""
    u = (np.asarray(b) - np.asarray(a)).ravel()
    v = (np.asarray(c) - np.asarray(b)).ravel()
    u = np.concatenate([u.real, u.imag]) / np.linalg.norm(u)
    v = np.concatenate([v.real, v.imag]) / np.linalg.norm(v)
    if u @ v < 0:
        v = -v
    # half-angle form stays accurate near 0, unlike arccos
    return float(2 * np.arctan2(np.linalg.norm(u - v), np.linalg.norm(u + v)))


def tangency_point(pure):
    """Point ``(I - P)/(n - 1)`` where a maximal face touches the inner sphere.

    The sphere is centred at ``I/n`` with radius ``1/sqrt(n(n-1))``; the
    point, the centre and ``P`` are collinear.
    """
    pure = as_density(pure)
    n = pure.shape[0]
    if n < 2 or rank_of(pure) != 1:
        raise ValidationError("tangency point needs a pure state in dimension >= 2")
    eye = np.eye(n)
    point = (eye - pure) / (n - 1)
    radius = 1 / np.sqrt(n * (n - 1))
    dist = np.linalg.norm(point - eye / n)
    if abs(dist - radius) > 1e-10:
        raise ArithmeticError(f"tangency point off the sphere by {dist - radius:.3e}")
    angle = collinearity_angle(point, eye / n, pure)
    if angle > 1e-10:
        raise ArithmeticError(f"tangency point not collinear (angle {angle:.3e})")
    return point


@dataclass(frozen=True)
class TangencyRecord:
    t: float
    rank: int
    inside: bool
    kernel_block: float
    tangent: bool


def curve_stratum_tangency(samples, tol=1e-6, rank_tol=TOL_RANK):
    """Check first-order tangency of a sampled curve to its rank strata.

    ``samples`` is a sequence of ``(t, operator)`` on a uniform grid.  For
    every interior sample the central-difference velocity is tested with
    :func:`tangent_membership` at that sample.  ``inside`` records whether
    the sample is a density state.
    """
    samples = list(samples)
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    ts = np.array([float(t) for t, _ in samples])
    mats = [as_hermitian(m) for _, m in samples]
    steps = np.diff(ts)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * abs(steps[0]):
        raise ValueError("samples must lie on a uniform increasing grid")
    report = []
    for i in range(1, len(samples) - 1):
        vel = (mats[i + 1] - mats[i - 1]) / (ts[i + 1] - ts[i - 1])
        block = _kernel_block_norm(mats[i], vel, rank_tol)
        report.append(
            TangencyRecord(
                t=float(ts[i]),
                rank=rank_of(mats[i], rank_tol),
                inside=_is_density(mats[i]),
                kernel_block=block,
                tangent=block <= tol,
            )
        )
    return report


def _is_density(m):
    return bool(abs(np.trace(m).real - 1) <= TOL_TRACE and np.linalg.eigvalsh(m)[0] >= -TOL_PSD)
