"""Independent reference computations used only by the tests."""

import itertools

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, n):
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    return x / np.linalg.norm(x)


def random_density(rng, n, rank=None):
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_invertible(rng, n):
    while True:
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        s = np.linalg.svd(a, compute_uv=False)
        if s[-1] > 1e-2 * s[0]:
            return a


def wootters_concurrence(rho):
    """Two-qubit concurrence from the spin-flipped state.

    The decreasing square roots of the eigenvalues of
    ``rho (Y (x) Y) rho* (Y (x) Y)`` are obtained as the singular values of
    ``sqrt(rho) (Y (x) Y) sqrt(rho)*``, which avoids square roots of noisy
    near-zero eigenvalues.
    """
    w, v = np.linalg.eigh(rho)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    lam = np.linalg.svd(root @ np.kron(SIGMA_Y, SIGMA_Y) @ root.conj(), compute_uv=False)
    return max(0.0, lam[0] - lam[1:].sum())


def factor_swap(dims, j):
    """Permutation matrix exchanging the two copies of factor ``j`` on H (x) H.

    Index order on H (x) H is (1, ..., K, 1', ..., K').
    """
    k = len(dims)
    full = list(dims) + list(dims)
    size = int(np.prod(full))
    out = np.zeros((size, size))
    for idx in itertools.product(*[range(d) for d in full]):
        swapped = list(idx)
        swapped[j], swapped[k + j] = idx[k + j], idx[j]
        out[np.ravel_multi_index(swapped, full), np.ravel_multi_index(idx, full)] = 1
    return out


def dense_form_operator(dims, weights):
    """``sum_s p_s prod_j (I + s_j F_j)`` with ``F_j`` the copy swap of factor ``j``."""
    size = int(np.prod(dims)) ** 2
    swaps = [factor_swap(dims, j) for j in range(len(dims))]
    total = np.zeros((size, size))
    for signs, p in weights.items():
        term = np.eye(size)
        for s, f in zip(signs, swaps):
            term = term @ (np.eye(size) + s * f)
        total += p * term
    return total


def brute_concurrence(psi, dims, weights):
    x = np.kron(psi, psi)
    return float(np.sqrt(max(np.real(np.vdot(x, dense_form_operator(dims, weights) @ x)), 0.0)))


def loop_partial_trace(rho, dims, traced):
    """Partial trace by explicit summation over basis labels."""
    keep = [j for j in range(len(dims)) if j not in traced]
    kd = [dims[j] for j in keep]
    out = np.zeros((int(np.prod(kd)), int(np.prod(kd))), dtype=complex)
    for row in itertools.product(*[range(d) for d in kd]):
        for col in itertools.product(*[range(d) for d in kd]):
            acc = 0
            for t in itertools.product(*[range(dims[j]) for j in traced]):
                r, c = [0] * len(dims), [0] * len(dims)
                for pos, j in enumerate(keep):
                    r[j], c[j] = row[pos], col[pos]
                for pos, j in enumerate(traced):
                    r[j] = c[j] = t[pos]
                acc += rho[np.ravel_multi_index(r, dims), np.ravel_multi_index(c, dims)]
            out[np.ravel_multi_index(row, kd), np.ravel_multi_index(col, kd)] = acc
    return out


def admissible_patterns(k):
    return [p for p in itertools.product((1, -1), repeat=k) if p.count(-1) > 0 and p.count(-1) % 2 == 0]


def odd_patterns(k):
    return [p for p in itertools.product((1, -1), repeat=k) if p.count(-1) % 2 == 1]
