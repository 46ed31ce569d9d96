"""Concurrences built from symmetric/antisymmetric projectors on two copies.

For a factorization ``H = H_1 (x) ... (x) H_K`` and signs ``s_j``, the
operator ``A = 2^K (x)_j P_{s_j}`` acts on ``H (x) H`` with the two copies
of each factor paired.  The pure-state concurrence is
``c(psi) = sqrt(<psi psi| A |psi psi>)``; mixed states use its convex roof,
bounded below algebraically through the ``T^alpha`` tensors and above by
explicit decompositions.

``A`` is stored through vectors ``chi_alpha`` with ``A = sum |chi><chi|``.
Vectors on ``H (x) H`` are ordered ``(1, ..., K, 1', ..., K')``, i.e. the
flattening of ``kron(psi, psi)``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ._common import (
    TOL_NORM,
    TOL_RANK,
    DimensionError,
    ValidationError,
    as_density,
    as_unit_vector,
)
from .composite import _dims, partial_trace

__all__ = [
    "parse_signs",
    "ConcurrenceForm",
    "build_form_bipartite",
    "build_form_signs",
    "build_form_mixture",
    "alpha_coefficients",
    "pure_concurrence",
    "pure_concurrence_trace_form",
    "TTensorStack",
    "t_tensors",
    "lower_bound",
    "optimize_lower_bound",
    "upper_bound",
    "random_z",
]


def parse_signs(signs):
    """Normalize ``"+--"``, ``["+", "-"]`` or ``(1, -1)`` to a tuple of +-1."""
    out = []
    for s in signs:
        if s in ("+", 1, "1", "+1"):
            out.append(1)
        elif s in ("-", "−", -1, "-1"):
            out.append(-1)
        else:
            raise ValueError(f"bad sign {s!r}")
    return tuple(out)


def _minus_count(pattern):
    return sum(1 for s in pattern if s < 0)


def _admissible(pattern):
    m = _minus_count(pattern)
    return m > 0 and m % 2 == 0


def _sector_basis(n, sign):
    """Orthonormal basis of the symmetric (+1) or antisymmetric (-1) part of C^n (x) C^n."""
    vecs = []
    for a in range(n):
        for b in range(a, n):
            if a == b:
                if sign > 0:
                    v = np.zeros(n * n)
                    v[a * n + a] = 1
                    vecs.append(v)
                continue
            v = np.zeros(n * n)
            v[a * n + b] = 1 / np.sqrt(2)
            v[b * n + a] = sign / np.sqrt(2)
            vecs.append(v)
    return vecs


def _pair_to_copy_order(vec, dims):
    """Reorder a vector from ``(1, 1', 2, 2', ...)`` to ``(1, 2, ..., 1', 2', ...)``."""
    k = len(dims)
    t = vec.reshape([d for n in dims for d in (n, n)])
    axes = list(range(0, 2 * k, 2)) + list(range(1, 2 * k, 2))
    return t.transpose(axes).reshape(-1)


def _pattern_vectors(dims, pattern):
    bases = [_sector_basis(n, s) for n, s in zip(dims, pattern)]
    out = [_pair_to_copy_order(reduce(np.kron, combo), dims) for combo in itertools.product(*bases)]
    return np.array(out, dtype=complex)


@dataclass(frozen=True, eq=False)
class ConcurrenceForm:
    """Rank-one pieces ``chi`` (shape ``(m, N^2)``) of the operator ``A``."""

    dims: tuple
    chi: np.ndarray
    weights: dict = field(default_factory=dict)  # sign pattern -> p_s

    @property
    def m(self):
        return self.chi.shape[0]

    @property
    def total(self):
        return int(np.prod(self.dims))

    @property
    def degenerate(self):
        """Some pattern has an odd number of antisymmetric factors."""
        return any(_minus_count(p) % 2 for p, w in self.weights.items() if w > 0)

    def operator(self):
        """Dense ``A = sum_alpha |chi_alpha><chi_alpha|``."""
        return self.chi.T @ self.chi.conj()

    def alpha(self):
        return alpha_coefficients(self.weights, len(self.dims))


def build_form_bipartite(fact):
    """``A = 4 P_- (x) P_-`` for two factors, via its spectral decomposition.

    The projector is assembled densely on ``H_1 (x) H_1 (x) H_2 (x) H_2``,
    conjugated by the swap of the middle factors, and split into
    ``sqrt(eigenvalue) * eigenvector`` pieces.
    """
    dims = _dims(fact)
    if len(dims) != 2:
        raise ValueError(f"bipartite form needs two factors, got {len(dims)}")
    n1, n2 = dims

    def antisym(n):
        swap = np.eye(n * n)[[b * n + a for a in range(n) for b in range(n)]]
        return (np.eye(n * n) - swap) / 2

    a_paired = 4 * np.kron(antisym(n1), antisym(n2))
    # basis |a a' b b'>  ->  |a b a' b'>
    perm = np.arange(n1 * n1 * n2 * n2).reshape(n1, n1, n2, n2).transpose(0, 2, 1, 3).ravel()
    mid = np.eye(perm.size)[perm]
    a_op = mid @ a_paired @ mid.T
    w, v = np.linalg.eigh(a_op)
    keep = w > 0.5
    chi = (v[:, keep] * np.sqrt(w[keep])).T.astype(complex)
    return ConcurrenceForm(dims, chi, {(-1, -1): 1.0})


def build_form_signs(fact, signs):
    """``A = 2^K (x)_j P_{s_j}`` built from explicit sector bases.

    Patterns with an odd number of ``-`` give a form whose concurrence
    vanishes identically; they are accepted and reported through
    :attr:`ConcurrenceForm.degenerate`.
    """
    dims = _dims(fact)
    pattern = parse_signs(signs)
    if len(pattern) != len(dims):
        raise DimensionError(f"{len(pattern)} signs for {len(dims)} factors")
    chi = np.sqrt(2.0 ** len(dims)) * _pattern_vectors(dims, pattern)
    return ConcurrenceForm(dims, chi, {pattern: 1.0})


def build_form_mixture(fact, mixture):
    """``A = 2^K sum_s p_s (x)_j P_{s_j}`` over admissible patterns.

    ``mixture`` maps sign patterns to nonnegative weights.  Each pattern
    needs an even, nonzero number of ``-``.  Projectors of distinct
    patterns are mutually orthogonal, so the rank-one pieces are the
    sector bases scaled by ``sqrt(2^K p_s)``.
    """
    dims = _dims(fact)
    weights = {}
    for signs, p in dict(mixture).items():
        pattern = parse_signs(signs)
        if len(pattern) != len(dims):
            raise DimensionError(f"{len(pattern)} signs for {len(dims)} factors")
        if not _admissible(pattern):
            raise ValueError(f"pattern {signs!r} needs an even, nonzero number of '-'")
        if p < 0:
            raise ValueError(f"negative weight {p!r} for pattern {signs!r}")
        weights[pattern] = weights.get(pattern, 0.0) + float(p)
    pieces = [np.sqrt(2.0 ** len(dims) * p) * _pattern_vectors(dims, pat) for pat, p in sorted(weights.items()) if p > 0]
    if not pieces:
        raise ValueError("mixture has no positive weight")
    return ConcurrenceForm(dims, np.concatenate(pieces), weights)


def alpha_coefficients(weights, k):
    """``alpha_S = sum_s p_s prod_{i in S} s_i`` for every subset ``S`` of ``range(k)``."""
    weights = {parse_signs(s): float(p) for s, p in dict(weights).items()}
    out = {}
    for size in range(k + 1):
        for subset in itertools.combinations(range(k), size):
            out[frozenset(subset)] = sum(p * np.prod([s[i] for i in subset]) for s, p in weights.items())
    return out


def _check_state(psi, form):
    psi = as_unit_vector(psi, TOL_NORM, "state")
    if psi.shape[0] != form.total:
        raise DimensionError(f"state of length {psi.shape[0]} does not match dims {form.dims}")
    return psi


def pure_concurrence(psi, form):
    """``sqrt(<psi psi| A |psi psi>)`` for a normalized ``psi``."""
    psi = _check_state(psi, form)
    amps = form.chi.conj() @ np.kron(psi, psi)
    return float(np.sqrt(np.sum(np.abs(amps) ** 2)))


def pure_concurrence_trace_form(psi, fact, alpha):
    """``sqrt(sum_S alpha_S Tr((Tr_S |psi><psi|)^2))``.

    ``alpha`` maps subsets of subsystem indices to reals; absent subsets
    count as zero.
    """
    dims = _dims(fact)
    psi = as_unit_vector(psi, TOL_NORM, "state")
    if psi.shape[0] != int(np.prod(dims)):
        raise DimensionError(f"state of length {psi.shape[0]} does not match dims {dims}")
    coeffs = {}
    for key, val in dict(alpha).items():
        subset = frozenset(int(j) for j in key)
        if len(subset) != len(tuple(key)) or any(j < 0 or j >= len(dims) for j in subset):
            raise ValueError(f"bad subset {key!r} for {len(dims)} factors")
        if subset in coeffs:
            raise ValueError(f"subset {sorted(subset)} listed twice")
        coeffs[subset] = float(val)
    rho = np.outer(psi, psi.conj())
    total = 0.0
    for subset, a in coeffs.items():
        red = partial_trace(rho, dims, sorted(subset))
        total += a * float(np.real(np.sum(red * red.T)))
    return float(np.sqrt(max(total, 0.0)))


@dataclass(frozen=True, eq=False)
class TTensorStack:
    """``T^alpha_jk = <chi_alpha| phi_j (x) phi_k>`` with ``phi`` the
    subnormalized eigenvectors of the state (columns of ``phi``)."""

    tensors: np.ndarray  # (m, r, r)
    phi: np.ndarray  # (N, r)

    @property
    def rank(self):
        return self.phi.shape[1]

    @property
    def symmetric(self):
        t = self.tensors
        return bool(np.max(np.abs(t - t.transpose(0, 2, 1)), initial=0.0) < 1e-9)


def _phi(rho, tol):
    w, v = np.linalg.eigh(rho)
    keep = w > tol * w.max()
    return v[:, keep][:, ::-1] * np.sqrt(w[keep][::-1])


def t_tensors(rho, form, tol=TOL_RANK):
    rho = as_density(rho)
    if rho.shape[0] != form.total:
        raise DimensionError(f"state of size {rho.shape[0]} does not match dims {form.dims}")
    phi = _phi(rho, tol)
    n = form.total
    x = form.chi.conj().reshape(-1, n, n)
    return TTensorStack(np.einsum("aj,mab,bk->mjk", phi, x, phi), phi)


def _bound(stack, z):
    t = np.tensordot(z, stack.tensors, axes=1)
    s = np.linalg.svd(t, compute_uv=False)
    return float(max(s[0] - s[1:].sum(), 0.0))


def _warn_degenerate(form):
    if form.degenerate:
        warnings.warn("form has an odd number of antisymmetric factors; its concurrence vanishes", stacklevel=3)
        return True
    return False


def _check_z(z, m):
    z = np.asarray(z, dtype=complex).ravel()
    if z.shape[0] != m:
        raise DimensionError(f"z has length {z.shape[0]}, form has m={m}")
    if abs(np.linalg.norm(z) - 1) > TOL_NORM:
        raise ValidationError("z must have unit norm")
    return z


def lower_bound(rho, form, z, tol=TOL_RANK):
    """``max(s_1 - sum_{i>1} s_i, 0)`` for the singular values of ``sum_alpha z_alpha T^alpha``."""
    z = _check_z(z, form.m)
    if _warn_degenerate(form):
        return 0.0
    return _bound(t_tensors(rho, form, tol), z)


def random_z(m, rng):
    z = rng.normal(size=m) + 1j * rng.normal(size=m)
    return z / np.linalg.norm(z)


def optimize_lower_bound(rho, form, strategy="single", *, alpha=0, count=32, iters=100, seed=0, tol=TOL_RANK):
    """Maximize the lower bound over unit ``z``.

    ``"single"`` uses ``z = e_alpha``.  ``"random"`` keeps the best of
    ``count`` seeded random ``z``.  ``"refine"`` starts from the random
    result and runs ``iters`` sweeps of complex coordinate ascent on the
    sphere (steps ``+-step``, ``+-i step`` per coordinate, renormalized,
    step halved after a sweep without gain).

    Returns ``(value, z)``.
    """
    m = form.m
    if strategy not in ("single", "random", "refine"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "single" and not 0 <= alpha < m:
        raise ValueError(f"alpha={alpha} out of range for m={m}")
    if _warn_degenerate(form):
        z = np.zeros(m, dtype=complex)
        z[0] = 1
        return 0.0, z
    stack = t_tensors(rho, form, tol)
    if strategy == "single" or m == 1:
        z = np.zeros(m, dtype=complex)
        z[alpha if strategy == "single" else 0] = 1
        return _bound(stack, z), z

    rng = np.random.default_rng(seed)
    best_z = np.zeros(m, dtype=complex)
    best_z[0] = 1
    best = _bound(stack, best_z)
    for _ in range(count):
        z = random_z(m, rng)
        val = _bound(stack, z)
        if val > best:
            best, best_z = val, z
    if strategy == "refine":
        step = 0.5
        directions = (1, -1, 1j, -1j)
        for _ in range(iters):
            improved = False
            for a in range(m):
                for d in directions:
                    z = best_z.copy()
                    z[a] += step * d
                    z /= np.linalg.norm(z)
                    val = _bound(stack, z)
                    if val > best:
                        best, best_z, improved = val, z, True
            if not improved:
                step /= 2
                if step < 1e-12:
                    break
    return best, best_z


def _check_isometry(v, r):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[1] != r or v.shape[0] < r:
        raise DimensionError(f"isometry must have shape (N >= {r}, {r}), got {v.shape}")
    if np.max(np.abs(v.conj().T @ v - np.eye(r))) > 1e-9:
        raise ValidationError("V must satisfy V^dag V = I")
    return v


def upper_bound(rho, form, v, tol=TOL_RANK):
    """``sum_i sqrt(sum_alpha |[V T^alpha V^T]_ii|^2)`` for an isometry ``V``."""
    stack = t_tensors(rho, form, tol)
    v = _check_isometry(v, stack.rank)
    if _warn_degenerate(form):
        return 0.0
    diag = np.einsum("ij,mjk,ik->mi", v, stack.tensors, v)
    return float(np.sum(np.sqrt(np.sum(np.abs(diag) ** 2, axis=0))))


