"""Tensor-product structure: Segre map, partial traces, Schmidt data,
product group actions and convex-roof extensions.

Subsystem 0 is the slowest-varying index of the flattened tensor, i.e.
``kron(a, b)`` puts ``a`` on subsystem 0.  Subsystems are numbered from 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from ._common import (
    TOL_RANK,
    DimensionError,
    SingularMatrixError,
    ValidationError,
    as_density,
    as_square,
    as_vector,
    is_invertible,
)
from .kraus import gl_apply

__all__ = [
    "TensorFactorization",
    "segre",
    "partial_trace",
    "reduced_state",
    "SchmidtDecomposition",
    "schmidt",
    "schmidt_number",
    "product_action",
    "RoofEstimate",
    "random_isometry",
    "decomposition_from_isometry",
    "convex_roof_estimate",
]


@dataclass(frozen=True)
class TensorFactorization:
    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2 or any(d < 2 for d in dims):
            raise ValidationError(f"need at least two factors of dimension >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self):
        return int(np.prod(self.dims))

    def __len__(self):
        return len(self.dims)


def _dims(fact):
    if isinstance(fact, TensorFactorization):
        return fact.dims
    return TensorFactorization(tuple(fact)).dims


def segre(*ops):
    """Tensor product of operators, first argument on the slowest index."""
    if len(ops) < 2:
        raise ValueError("segre needs at least two operators")
    mats = [as_square(op) for op in ops]
    return reduce(np.kron, mats)


def partial_trace(rho, fact, traced):
    """Trace out the subsystems listed in ``traced``.

    An empty ``traced`` returns ``rho``; tracing every subsystem returns
    the ``1 x 1`` matrix ``[[Tr rho]]``.
    """
    dims = _dims(fact)
    rho = as_square(rho)
    total = int(np.prod(dims))
    if rho.shape[0] != total:
        raise DimensionError(f"operator of size {rho.shape[0]} does not match dims {dims}")
    raw = [int(j) for j in traced]
    traced = sorted(set(raw))
    if len(traced) != len(raw) or any(j < 0 or j >= len(dims) for j in traced):
        raise ValueError(f"bad subsystem subset {traced} for {len(dims)} factors")
    k = len(dims)
    keep = [j for j in range(k) if j not in traced]
    t = rho.reshape(dims + dims)
    row = list(range(k))
    col = [j if j in traced else k + j for j in range(k)]
    out_idx = keep + [k + j for j in keep]
    red = np.einsum(t, row + col, out_idx)
    d = int(np.prod([dims[j] for j in keep]))
    return red.reshape(d, d)


def reduced_state(rho, fact, keep):
    """Partial trace over the complement of ``keep``."""
    dims = _dims(fact)
    keep = set(keep)
    return partial_trace(rho, dims, [j for j in range(len(dims)) if j not in keep])


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def number(self):
        return len(self.coefficients)

    def reassemble(self):
        return np.einsum("k,ik,jk->ij", self.coefficients, self.left, self.right).ravel()


def _bipartite(fact):
    dims = _dims(fact)
    if len(dims) != 2:
        raise ValueError(f"Schmidt decomposition needs two factors, got {len(dims)}")
    return dims


def schmidt(psi, fact, tol=TOL_RANK):
    """Biorthogonal expansion ``psi = sum_k lam_k l_k (x) r_k``.

    Coefficients below ``tol * lam_1`` are dropped.
    """
    n1, n2 = _bipartite(fact)
    psi = as_vector(psi)
    if psi.shape[0] != n1 * n2:
        raise DimensionError(f"vector of length {psi.shape[0]} does not match dims {(n1, n2)}")
    u, s, vh = np.linalg.svd(psi.reshape(n1, n2), full_matrices=False)
    keep = s > tol * s[0] if s[0] > 0 else np.zeros_like(s, bool)
    return SchmidtDecomposition(s[keep], u[:, keep], vh[keep].T)


def schmidt_number(psi, fact, tol=TOL_RANK):
    return schmidt(psi, fact, tol).number


def product_action(factors, rho, fact=None):
    """Normalized action of ``A_1 (x) ... (x) A_K`` on a density state."""
    mats = [as_square(a) for a in factors]
    if fact is not None and tuple(m.shape[0] for m in mats) != _dims(fact):
        raise DimensionError("factor sizes do not match the factorization")
    for a in mats:
        if not is_invertible(a):
            raise SingularMatrixError("every factor must be invertible")
    return gl_apply(reduce(np.kron, mats), rho)


@dataclass(frozen=True, eq=False)
class RoofEstimate:
    """Best decomposition found; ``value`` is an upper bound on the roof."""

    value: float
    weights: np.ndarray
    states: np.ndarray  # rows are normalized pure states
    isometry: np.ndarray
    evaluations: int


def random_isometry(rows, cols, rng):
    """Haar-like ``rows x cols`` matrix with orthonormal columns."""
    g = rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _eigen_vectors(rho, tol):
    w, v = np.linalg.eigh(rho)
    keep = w > tol * w.max()
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    return v * np.sqrt(w)


def decomposition_from_isometry(phi, v):
    """Subnormalized vectors ``psi_i = sum_j V_ij phi_j`` as rows."""
    return v @ phi.T


def _roof_value(f, psis):
    weights = np.sum(np.abs(psis) ** 2, axis=1)
    total = 0.0
    for w, psi in zip(weights, psis):
        if w > 0:
            total += w * f(psi / np.sqrt(w))
    return total


def _givens(rows, i, k, theta, phase):
    g = np.eye(rows, dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    g[i, i], g[k, k] = c, c
    g[i, k] = -np.exp(1j * phase) * s
    g[k, i] = np.exp(-1j * phase) * s
    return g


def convex_roof_estimate(f, rho, strategy="eigen", *, count=32, iters=200, seed=0, max_terms=None, tol=TOL_RANK):
    """Upper estimate of ``inf sum_i t_i f(Psi_i)`` over decompositions of ``rho``.

    Decompositions are generated from the subnormalized eigenvectors
    ``phi_j`` through isometries ``V`` (``V^dag V = I``).

    Parameters
    ----------
    f : callable
        Nonnegative function of a normalized state vector.
    rho : array_like
        Density state.
    strategy : {"eigen", "random", "refine"}
        ``"eigen"`` evaluates the eigen-decomposition only.  ``"random"``
        additionally samples ``count`` random isometries with
        ``r <= N <= max_terms`` rows.  ``"refine"`` continues from the best
        random candidate with ``iters`` Givens rotations, accepting only
        improvements.
    max_terms : int, optional
        Largest decomposition length ``N``; defaults to ``r**2``.

    Returns
    -------
    RoofEstimate
        Nonincreasing along eigen -> random -> refine for a fixed seed.
    """
    rho = as_density(rho)
    if strategy not in ("eigen", "random", "refine"):
        raise ValueError(f"unknown strategy {strategy!r}")
    phi = _eigen_vectors(rho, tol)
    r = phi.shape[1]
    cap = r * r if max_terms is None else int(max_terms)
    if cap < r:
        raise ValueError(f"max_terms={cap} is below the rank {r}")
    rng = np.random.default_rng(seed)

    best_v = np.eye(r, dtype=complex)
    best = _roof_value(f, decomposition_from_isometry(phi, best_v))
    evals = 1
    if strategy in ("random", "refine") and r > 1:
        for _ in range(count):
            v = random_isometry(int(rng.integers(r, cap + 1)), r, rng)
            val = _roof_value(f, decomposition_from_isometry(phi, v))
            evals += 1
            if val < best:
                best, best_v = val, v
    if strategy == "refine" and r > 1:
        rows = best_v.shape[0]
        step = np.pi / 4
        misses = 0
        for _ in range(iters):
            i, k = rng.choice(rows, size=2, replace=False)
            g = _givens(rows, i, k, step * rng.uniform(-1, 1), rng.uniform(0, 2 * np.pi))
            v = g @ best_v
            val = _roof_value(f, decomposition_from_isometry(phi, v))
            evals += 1
            if val < best:
                best, best_v, misses = val, v, 0
            else:
                misses += 1
                if misses >= 4 * rows:
                    step, misses = step / 2, 0
    psis = decomposition_from_isometry(phi, best_v)
    weights = np.sum(np.abs(psis) ** 2, axis=1)
    states = psis / np.sqrt(np.where(weights > 0, weights, 1))[:, None]
    return RoofEstimate(float(best), weights, states, best_v, evals)

