"""Compiled kernels for the hot loop of the encoder search.

Plain loops over small dense matrices (N <= 16), compiled with numba.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _chol(m):
    """Lower Cholesky factor of a Hermitian matrix; ok=False if not positive definite."""
    n = m.shape[0]
    low = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        s = m[j, j].real
        for k in range(j):
            s -= low[j, k].real ** 2 + low[j, k].imag ** 2
        if not s > 0.0:
            return low, False
        d = np.sqrt(s)
        low[j, j] = d
        for i in range(j + 1, n):
            acc = m[i, j]
            for k in range(j):
                acc -= low[i, k] * np.conj(low[j, k])
            low[i, j] = acc / d
    return low, True


@njit(cache=True)
def _tril_inv(low):
    n = low.shape[0]
    inv = np.zeros((n, n), dtype=np.complex128)
    for c in range(n):
        inv[c, c] = 1.0 / low[c, c]
        for i in range(c + 1, n):
            acc = 0j
            for k in range(c, i):
                acc -= low[i, k] * inv[k, c]
            inv[i, c] = acc / low[i, i]
    return inv


@njit(cache=True)
def _shifted(a, gamma):
    m = a.copy()
    for i in range(gamma.size):
        m[i, i] -= gamma[i]
    return m


@njit(cache=True)
def _logdiag(low):
    s = 0.0
    for i in range(low.shape[0]):
        s += np.log(low[i, i].real)
    return s


@njit(cache=True)
def _solve_spd(h, g):
    """Solve h x = g for a real symmetric positive definite h; ok=False otherwise."""
    n = g.size
    low = np.zeros((n, n))
    for j in range(n):
        s = h[j, j]
        for k in range(j):
            s -= low[j, k] * low[j, k]
        if not s > 0.0:
            return g, False
        d = np.sqrt(s)
        low[j, j] = d
        for i in range(j + 1, n):
            acc = h[i, j]
            for k in range(j):
                acc -= low[i, k] * low[j, k]
            low[i, j] = acc / d
    y = np.zeros(n)
    for i in range(n):
        acc = g[i]
        for k in range(i):
            acc -= low[i, k] * y[k]
        y[i] = acc / low[i, i]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for k in range(i + 1, n):
            acc -= low[k, i] * x[k]
        x[i] = acc / low[i, i]
    return x, True


@njit(cache=True)
def center_direct(a, p, t, gamma, newton_tol, max_steps):
    """Damped Newton for  t p.gamma + logdet(A - diag gamma) + sum log gamma.

    ``gamma`` must be strictly feasible.  Returns (gamma, L, L^{-1}, steps)
    where L is the Cholesky factor of A - diag(gamma) at the returned point.
    """
    n = gamma.size
    low, ok = _chol(_shifted(a, gamma))
    steps = 0
    while True:
        linv = _tril_inv(low)
        if steps >= max_steps:
            return gamma, low, linv, steps
        # B = L^{-H} L^{-1} = (A - diag gamma)^{-1}
        b = linv.conj().T @ linv
        grad = np.empty(n)
        hess = np.empty((n, n))
        for i in range(n):
            grad[i] = t * p[i] - b[i, i].real + 1.0 / gamma[i]
            for j in range(n):
                hess[i, j] = b[i, j].real ** 2 + b[i, j].imag ** 2
            hess[i, i] += 1.0 / gamma[i] ** 2
        step, ok = _solve_spd(hess, grad)
        if not ok:
            return gamma, low, linv, steps
        dec = 0.0
        lin = 0.0
        for i in range(n):
            dec += grad[i] * step[i]
            lin += p[i] * step[i]
        steps += 1
        if dec <= 2.0 * newton_tol:
            return gamma, low, linv, steps
        s = 1.0
        for i in range(n):
            if step[i] < 0.0:
                s = min(s, -0.99 * gamma[i] / step[i])
        logdet0 = _logdiag(low)
        accepted = False
        while s > 1e-14:
            cand = gamma + s * step
            c2, ok = _chol(_shifted(a, cand))
            if ok:
                df = s * t * lin + 2.0 * (_logdiag(c2) - logdet0)
                for i in range(n):
                    df += np.log1p(s * step[i] / gamma[i])
                if df >= 0.25 * s * dec:
                    accepted = True
                    break
            s *= 0.5
        if not accepted:
            return gamma, low, _tril_inv(low), steps
        gamma = cand
        low = c2


@njit(cache=True)
def is_pd(a):
    _, ok = _chol(a)
    return ok


@njit(cache=True)
def scale_into(a, gamma):
    """Shrink ``gamma`` geometrically until A - diag(gamma) is positive definite."""
    g = gamma.copy()
    for _ in range(60):
        _, ok = _chol(_shifted(a, g))
        if ok:
            return g, True
        g *= 0.7
    return g, False


@njit(cache=True)
def _apply_axis(v, u, stride, d):
    out = np.zeros_like(v)
    for idx in range(v.size):
        a = (idx // stride) % d
        base = idx - a * stride
        acc = 0j
        for b in range(d):
            acc += u[a, b] * v[base + b * stride]
        out[idx] = acc
    return out


@njit(cache=True)
def encode(psi0, us, dims, strides):
    """Rows psi_j = (U_j1 x ... x U_jS x I) psi0 for unitaries ``us`` (N, S, dmax, dmax)."""
    n, n_send = us.shape[0], us.shape[1]
    out = np.empty((n, psi0.size), dtype=np.complex128)
    for j in range(n):
        v = psi0.copy()
        for s in range(n_send):
            v = _apply_axis(v, us[j, s], strides[s], dims[s])
        out[j] = v
    return out


@njit(cache=True)
def environments(psi0, us, phi, dims, strides):
    """K[s, j, a, b] = sum over the other indices of conj(phi_j[.., a, ..]) * B_js[.., b, ..],
    where B_js has every sender unitary of encoder j applied except sender s's."""
    n, n_send, dmax = us.shape[0], us.shape[1], us.shape[2]
    k = np.zeros((n_send, n, dmax, dmax), dtype=np.complex128)
    for j in range(n):
        for s in range(n_send):
            v = psi0.copy()
            for o in range(n_send):
                if o != s:
                    v = _apply_axis(v, us[j, o], strides[o], dims[o])
            stride, d = strides[s], dims[s]
            for idx in range(v.size):
                a = (idx // stride) % d
                base = idx - a * stride
                pc = np.conj(phi[j, idx])
                for b in range(d):
                    k[s, j, a, b] += pc * v[base + b * stride]
    return k
