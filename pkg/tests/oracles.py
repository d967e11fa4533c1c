"""Independent reference computations used to cross-check the library.

Nothing here calls into the package under test.  Each oracle takes a
different route to the same quantity: explicit index loops instead of
einsum, grid search instead of interior-point, Schur complements instead
of eigenvalues.
"""
import itertools
import math

import numpy as np


def binary_entropy(p):
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def partial_trace_loops(psi, dims, keep):
    """Reduced density matrix of a pure state by summing over basis indices."""
    keep = list(keep)
    drop = [i for i in range(len(dims)) if i not in keep]
    kd = [dims[i] for i in keep]
    size = int(np.prod(kd))
    rho = np.zeros((size, size), dtype=complex)
    amp = np.asarray(psi).reshape(dims)
    for kept_a in itertools.product(*[range(d) for d in kd]):
        for kept_b in itertools.product(*[range(d) for d in kd]):
            total = 0j
            for rest in itertools.product(*[range(dims[i]) for i in drop]):
                ia, ib = [0] * len(dims), [0] * len(dims)
                for pos, k in enumerate(keep):
                    ia[k], ib[k] = kept_a[pos], kept_b[pos]
                for pos, k in enumerate(drop):
                    ia[k] = ib[k] = rest[pos]
                total += amp[tuple(ia)] * np.conj(amp[tuple(ib)])
            ra = np.ravel_multi_index(kept_a, kd)
            rb = np.ravel_multi_index(kept_b, kd)
            rho[ra, rb] = total
    return rho


def shift_clock(d, m, n):
    """X^m Z^n from explicit matrix powers."""
    shift = np.zeros((d, d), dtype=complex)
    for l in range(d):
        shift[(l + 1) % d, l] = 1
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return np.linalg.matrix_power(shift, m) @ np.linalg.matrix_power(clock, n)


def two_state_idp(overlap_abs):
    """Equal-prior unambiguous discrimination of two pure states: 1 - |<a|b>|."""
    return 1.0 - overlap_abs


def grid_search_gammas(g, step=1e-2):
    """Exhaustive search of  max mean(gamma)  over the grid {0, step, ..., 1}^N.

    N = 2 scans the full square.  N = 3 scans (gamma_1, gamma_2) and, for each
    pair, takes the largest grid gamma_3 allowed by the Schur complement
    condition: with A = X[:2,:2] - diag(g1, g2) > 0, X - diag(gamma) >= 0
    iff gamma_3 <= X_33 - b^H A^-1 b, b = X[:2, 2].  That is the same set of
    grid points a full 3-D scan would accept.
    """
    g = np.asarray(g, dtype=complex)
    n = g.shape[0]
    levels = np.round(np.arange(0, 1 + step / 2, step), 12)
    if n == 2:
        g1, g2 = np.meshgrid(levels, levels, indexing="ij")
        a = g[0, 0].real - g1
        c = g[1, 1].real - g2
        ok = (a >= -1e-12) & (c >= -1e-12) & (a * c - abs(g[0, 1]) ** 2 >= -1e-12)
        return float(np.max(np.where(ok, (g1 + g2) / 2, -1)))
    if n != 3:
        raise ValueError("grid oracle handles N = 2, 3")
    g1, g2 = np.meshgrid(levels, levels, indexing="ij")
    a11 = g[0, 0].real - g1
    a22 = g[1, 1].real - g2
    a12 = g[0, 1]
    det = a11 * a22 - abs(a12) ** 2
    pd = (a11 > 1e-12) & (det > 1e-12)
    b1, b2 = g[0, 2], g[1, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        # b^H A^-1 b with the explicit 2x2 inverse
        quad = (a22 * abs(b1) ** 2 + a11 * abs(b2) ** 2 - 2 * (np.conj(b1) * a12 * b2).real) / det
    bound = g[2, 2].real - quad
    g3 = np.floor(np.clip(bound, 0, 1) / step + 1e-9) * step
    g3 = np.minimum(g3, 1.0)
    ok = pd & (bound >= -1e-12)
    return float(np.max(np.where(ok, (g1 + g2 + g3) / 3, -1)))


def random_unit_gram(rng, n, dim=None):
    """Gram matrix of ``n`` random normalized complex vectors in C^dim."""
    dim = dim or n
    v = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v.conj() @ v.T


def pauli_block_gram(alpha, n_parties, n_messages):
    """Gram matrix of the Pauli ensemble used for generalized GHZ states:
    N - 2^(n-1) pairs with real overlap 1 - 2 alpha^2, the rest orthogonal."""
    pairs = n_messages - 2 ** (n_parties - 1)
    g = np.eye(n_messages)
    for p in range(pairs):
        g[2 * p, 2 * p + 1] = g[2 * p + 1, 2 * p] = 1 - 2 * alpha**2
    return g, pairs


def numeric_gradient(f, x, h=1e-6):
    out = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (f(x + e) - f(x - e)) / (2 * h)
    return out
