"""Unambiguous discrimination of an encoded ensemble.

The identification probabilities ``gamma`` of linearly independent pure
states are feasible iff ``X - diag(gamma)`` is positive semidefinite, where
``X`` is the Gram matrix of the ensemble.  :func:`optimize_gammas` solves

    maximize  sum_i p_i gamma_i   s.t.  X - diag(gamma) >= 0,  gamma >= 0

with a primal log-det barrier method and Newton centering.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .qcore import PureState, eigvals_hermitian, shannon_entropy

RANK_TOL = 1e-10
PSD_EPS = 1e-9
# smallest Gram eigenvalue for which the barrier runs on X itself rather than whitened
_DIRECT_MIN_EIG = 1e-6


class SolveStatus(str, enum.Enum):
    CONVERGED = "converged"
    DEGENERATE = "degenerate"
    ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True)
class Ensemble:
    states: tuple[PureState, ...]
    priors: np.ndarray

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValueError("ensemble is empty")
        dims = states[0].dims
        if any(s.dims != dims for s in states):
            raise ValueError("ensemble states have mixed dimensions")
        priors = _check_priors(self.priors, len(states))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", priors)

    def __len__(self):
        return len(self.states)


def _check_priors(priors, n: int) -> np.ndarray:
    p = np.asarray(priors, dtype=float).reshape(-1)
    if p.size != n:
        raise ValueError(f"expected {n} priors, got {p.size}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError("priors must be nonnegative and sum to 1")
    return p


def gram(e: Ensemble | Sequence[PureState] | np.ndarray) -> np.ndarray:
    """Gram matrix ``X[i, j] = <psi_i|psi_j>``.

    Also accepts a 2-D array whose rows are the state vectors.
    """
    if isinstance(e, np.ndarray):
        rows = e.reshape(e.shape[0], -1)
    else:
        states = e.states if isinstance(e, Ensemble) else tuple(e)
        if any(s.dims != states[0].dims for s in states):
            raise ValueError("ensemble states have mixed dimensions")
        rows = np.array([s.amplitudes for s in states])
    g = rows.conj() @ rows.T
    return 0.5 * (g + g.conj().T)


def independence_rank(g: np.ndarray, tol: float = RANK_TOL) -> int:
    """Dimension of the span of the states behind Gram matrix ``g``."""
    return int(np.sum(eigvals_hermitian(g) > tol))


def usd_feasible(g: np.ndarray, gamma: Sequence[float], eps: float = PSD_EPS) -> bool:
    g = np.asarray(g, dtype=complex)
    gamma = np.asarray(gamma, dtype=float)
    if g.shape != (gamma.size, gamma.size):
        raise ValueError(f"Gram of shape {g.shape} does not match {gamma.size} gammas")
    return bool(eigvals_hermitian(g - np.diag(gamma))[0] >= -eps)


def conclusive_mutual_information(priors: Sequence[float], gamma: Sequence[float]) -> float:
    """Information delivered when success (probability sum p_i gamma_i) yields the whole message."""
    p = np.asarray(priors, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if p.shape != gamma.shape:
        raise ValueError("priors and gammas differ in length")
    if np.any(gamma < -1e-12) or np.any(gamma > 1 + 1e-12):
        raise ValueError("gammas must lie in [0, 1]")
    return float(p @ gamma) * shannon_entropy(p)


@dataclass(frozen=True)
class SolverSettings:
    """Knobs for the barrier method.

    ``gap_tol`` bounds the duality gap ``m / t`` at termination.  Centering
    stops once half the squared Newton decrement drops below ``newton_tol``;
    past t ~ 1e10 roundoff keeps the decrement from going much lower.
    """

    gap_tol: float = 1e-10
    barrier_growth: float = 20.0
    newton_tol: float = 1e-7
    max_newton: int = 400
    rank_tol: float = RANK_TOL
    # a state whose null-space weight exceeds this cannot be identified
    dependence_tol: float = 1e-9


@dataclass(frozen=True)
class GammaSolution:
    gamma: np.ndarray
    objective: float
    status: SolveStatus
    rank: int
    # dual certificate; d(objective)/dX = dual for a nondegenerate optimum
    dual: np.ndarray = field(repr=False)
    gap: float = 0.0
    newton_steps: int = 0


def optimize_gammas(
    g: np.ndarray,
    priors: Sequence[float] | None = None,
    cfg: SolverSettings | None = None,
) -> GammaSolution:
    """Maximal average identification probability for Gram matrix ``g``.

    Rank-deficient Gram matrices are accepted: states that lie in the span of
    the others are pinned to ``gamma = 0`` and the status is ``DEGENERATE``.
    """
    cfg = cfg or SolverSettings()
    x = np.asarray(g, dtype=complex)
    n = x.shape[0]
    if x.shape != (n, n):
        raise ValueError("Gram matrix must be square")
    x = 0.5 * (x + x.conj().T)
    p = np.full(n, 1.0 / n) if priors is None else _check_priors(priors, n)

    lam, q = np.linalg.eigh(x)
    keep = lam > cfg.rank_tol
    rank = int(keep.sum())
    null_weight = np.sum(np.abs(q[:, ~keep]) ** 2, axis=1)
    free = np.flatnonzero((null_weight <= cfg.dependence_tol) & (p > 0))
    status = SolveStatus.CONVERGED if rank == n else SolveStatus.DEGENERATE

    gamma = np.zeros(n)
    dual = np.zeros((n, n), dtype=complex)
    if free.size == 0:
        return GammaSolution(gamma, 0.0, status, rank, dual)

    # Whitened constraint I - sum_i gamma_i u_i u_i^H >= 0 on the range of X.
    scale = 1.0 / np.sqrt(lam[keep])
    qr = q[:, keep]
    u = scale[:, None] * qr.conj().T[:, free]
    pf = p[free]

    if rank == n and lam[0] > _DIRECT_MIN_EIG:
        # well-conditioned: same barrier without the change of basis
        gf, dual, steps, converged, gap = _barrier_direct(x, p, cfg)
    else:
        gf, y, steps, converged, gap = _barrier(u, pf, cfg)
        w = qr * scale[None, :]
        dual = w @ y @ w.conj().T
    gamma[free] = np.clip(gf, 0.0, 1.0)
    if not converged and status is SolveStatus.CONVERGED:
        status = SolveStatus.ITERATION_LIMIT
    return GammaSolution(gamma, float(p @ gamma), status, rank, dual, gap, steps)


def _factor(a: np.ndarray, u: np.ndarray | None, gamma: np.ndarray):
    """Cholesky factor of ``A - U diag(gamma) U^H`` (U = I when None), or None."""
    mat = a - np.diag(gamma) if u is None else a - (u * gamma) @ u.conj().T
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        return None


def _center(a, u, p, t, gamma, chol, newton_tol, max_steps):
    """Damped Newton on  t p.gamma + logdet(A - U diag(gamma) U^H) + sum log gamma.

    ``gamma`` must be strictly feasible with Cholesky factor ``chol``.
    Returns (gamma, chol, steps, centered).
    """
    steps = 0
    while steps < max_steps:
        linv = np.linalg.inv(chol)
        if u is None:
            b = linv.conj().T @ linv
        else:
            w = linv @ u
            b = w.conj().T @ w
        inv_g = 1.0 / gamma
        grad = t * p - b.diagonal().real + inv_g
        hess = np.abs(b) ** 2
        hess[np.diag_indices_from(hess)] += inv_g**2
        try:
            hc = np.linalg.cholesky(hess)
            step = np.linalg.solve(hc.conj().T, np.linalg.solve(hc, grad))
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        dec = float(grad @ step)
        steps += 1
        if dec <= 2 * newton_tol:
            return gamma, chol, steps, True
        s = 1.0
        neg = step < 0
        if np.any(neg):
            s = min(1.0, 0.99 * float(np.min(-gamma[neg] / step[neg])))
        logdet0 = np.sum(np.log(chol.diagonal().real))
        lin = t * float(p @ step)
        while s > 1e-14:
            cand = gamma + s * step
            c2 = _factor(a, u, cand)
            if c2 is not None:
                # exact increment, avoids cancellation in t * p.gamma
                df = (s * lin + 2 * (np.sum(np.log(c2.diagonal().real)) - logdet0)
                      + np.sum(np.log1p(s * step * inv_g)))
                if df >= 0.25 * s * dec:
                    break
            s *= 0.5
        else:
            return gamma, chol, steps, False
        gamma, chol = cand, c2
    return gamma, chol, steps, False


def _barrier(u: np.ndarray, p: np.ndarray, cfg: SolverSettings):
    """Path-following for max p.gamma s.t. I - U diag(gamma) U^H >= 0, gamma >= 0.

    Returns the final gamma, the dual matrix M^{-1}/t on the whitened space,
    the Newton step count, a convergence flag and the duality-gap bound.
    """
    r, k = u.shape
    m = r + k
    eye = np.eye(r)
    # U diag(c) U^H has norm c * ||U||^2, so this start is strictly inside
    gamma = np.full(k, 0.5 / max(np.linalg.norm(u, 2) ** 2, 1e-300))
    chol = _factor(eye, u, gamma)
    t = min(max(m / max(float(p @ gamma), 1e-12), 1.0), 1e3)
    steps = 0
    while True:
        gamma, chol, used, _ = _center(eye, u, p, t, gamma, chol, cfg.newton_tol, cfg.max_newton - steps)
        steps += used
        gap = m / t
        if gap <= cfg.gap_tol or steps >= cfg.max_newton:
            break
        t = min(t * cfg.barrier_growth, m / cfg.gap_tol)
    linv = np.linalg.inv(chol)
    y = (linv.conj().T @ linv) / t
    return gamma, y, steps, gap <= cfg.gap_tol, gap


def _barrier_direct(x: np.ndarray, p: np.ndarray, cfg: SolverSettings):
    """As :func:`_barrier` with U = I on a positive definite X, using the compiled Newton loop."""
    n = x.shape[0]
    m = 2 * n
    x = np.ascontiguousarray(x)
    gamma = np.full(n, 0.5 * float(np.linalg.eigvalsh(x)[0]))
    t = min(max(m / max(float(p @ gamma), 1e-12), 1.0), 1e3)
    steps = 0
    while True:
        gamma, _, linv, used = _kernels.center_direct(x, p, t, gamma, cfg.newton_tol, cfg.max_newton - steps)
        steps += used
        gap = m / t
        if gap <= cfg.gap_tol or steps >= cfg.max_newton:
            break
        t = min(t * cfg.barrier_growth, m / cfg.gap_tol)
    return gamma, (linv.conj().T @ linv) / t, steps, gap <= cfg.gap_tol, gap


class SmoothedValue:
    """Barrier-smoothed optimum for full-rank Gram matrices, warm-started.

    For fixed ``t`` the value  max_gamma p.gamma + (logdet(X - diag gamma)
    + sum log gamma) / t  is smooth in X, lies within ``2N / t`` of the true
    optimum (up to the barrier term), and has gradient
    ``(X - diag gamma*)^{-1} / t`` with respect to X.  Consecutive calls
    reuse the last centre as a starting point.
    """

    def __init__(self, n: int, priors: Sequence[float] | None = None, t: float = 1e7,
                 newton_tol: float = 1e-9, max_steps: int = 200):
        self.n = n
        self.p = np.full(n, 1.0 / n) if priors is None else _check_priors(priors, n)
        self.t = float(t)
        self.newton_tol = newton_tol
        self.max_steps = max_steps
        self.reset()

    def reset(self):
        self._gamma: np.ndarray | None = None

    def __call__(self, x: np.ndarray):
        """Return (gamma, smoothed value, gradient in X), or None if X is singular."""
        x = np.ascontiguousarray(x, dtype=np.complex128)
        if not _kernels.is_pd(x):
            return None
        ok = False
        if self._gamma is not None:
            gamma, ok = _kernels.scale_into(x, self._gamma)
        if not ok:
            gamma = np.full(self.n, 0.5 * np.linalg.eigvalsh(x)[0])
        gamma, low, linv, _ = _kernels.center_direct(x, self.p, self.t, gamma, self.newton_tol, self.max_steps)
        self._gamma = gamma
        grad = (linv.conj().T @ linv) / self.t
        logdet = 2 * np.sum(np.log(low.diagonal().real))
        value = float(self.p @ gamma) + (logdet + np.sum(np.log(gamma))) / self.t
        return gamma, value, grad
