"""Dense complex linear algebra and quantum-information primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Subsystem 0 is
always the most significant tensor factor.  Entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
NORM_TOL = 1e-12
EIG_CLIP = 1e-10


@dataclass(frozen=True)
class PureState:
    """A normalized ket on a composite space with explicit subsystem dims."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise ValueError(f"subsystem dimensions must be >= 2, got {dims}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise ValueError(f"{amps.size} amplitudes do not match dims {dims}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        m = np.asarray(self.matrix, dtype=complex)
        n = int(np.prod(dims))
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        if not np.allclose(m, m.conj().T, atol=NORM_TOL, rtol=0):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > NORM_TOL:
            raise ValueError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(m)[0] < -EIG_CLIP:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)


def _check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise ValueError("matrix is not Hermitian")
    return m


def tensor_product(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product; the first factor is the most significant index."""
    if not factors:
        raise ValueError("need at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the subsystems in ``keep`` (returned in ascending order)."""
    n = len(rho.dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) == n:
        raise ValueError("keep must be a nonempty proper subset of the subsystems")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"subsystem index out of range for {n} subsystems")
    drop = [k for k in range(n) if k not in keep]
    t = rho.matrix.reshape(rho.dims + rho.dims)
    # trace out the highest index first so remaining axis numbers stay valid
    for k in sorted(drop, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + m)
    dk = int(np.prod([rho.dims[k] for k in keep]))
    kept = tuple(rho.dims[k] for k in keep)
    return DensityMatrix(kept, t.reshape(dk, dk))


def reduced_density_matrix(state: PureState, keep: Iterable[int]) -> np.ndarray:
    """Marginal of a pure state as a bare matrix, without forming |psi><psi|."""
    keep = sorted(set(int(k) for k in keep))
    n = state.n_parties
    if not keep or len(keep) == n:
        raise ValueError("keep must be a nonempty proper subset of the subsystems")
    drop = [k for k in range(n) if k not in keep]
    t = np.transpose(state.tensor(), keep + drop)
    dk = int(np.prod([state.dims[k] for k in keep]))
    a = t.reshape(dk, -1)
    return a @ a.conj().T


def eigvals_hermitian(m: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in ascending order."""
    m = _check_hermitian(m)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def matrix_exp_i_hermitian(h: np.ndarray) -> np.ndarray:
    """exp(i h) for Hermitian ``h`` via its eigendecomposition."""
    h = _check_hermitian(h)
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.exp(1j * w)) @ v.conj().T


def _entropy_from_eigenvalues(p: np.ndarray) -> float:
    p = np.where(p < EIG_CLIP, 0.0, p)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    s = _entropy_from_eigenvalues(eigvals_hermitian(m))
    return max(s, 0.0)


def shannon_entropy(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("expected a nonempty probability vector")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError(f"not a probability distribution: {p}")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, antilinear in the first argument."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def apply_local(state: PureState, ops: dict[int, np.ndarray]) -> PureState:
    """Apply single-subsystem operators ``{index: matrix}`` to a pure state."""
    t = state.tensor()
    for k, u in ops.items():
        u = np.asarray(u, dtype=complex)
        if u.shape != (state.dims[k], state.dims[k]):
            raise ValueError(f"operator shape {u.shape} does not act on subsystem {k}")
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [k])), 0, k)
    return PureState(state.dims, t.reshape(-1))
