"""Local encoders: generalized Pauli operators and parameterized unitaries.

Arbitrary encoders are ``exp(i H)`` with ``H = sum_k theta_k G_k`` over the
orthonormal Hermitian basis returned by :func:`hermitian_basis`
(``tr(G_a G_b) = delta_ab``), ordered as

    I/sqrt(d),
    symmetric   (|j><k| + |k><j|)/sqrt(2)      for j < k, lexicographic,
    antisymmetric (-i|j><k| + i|k><j|)/sqrt(2) for j < k, lexicographic,
    diagonal Gell-Mann (normalized)            for l = 1 .. d-1.

For d = 2 this is (I, sigma_x, sigma_y, sigma_z) / sqrt(2).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import schur

from .discrimination import Ensemble
from .qcore import PureState, matrix_exp_i_hermitian

UNITARY_TOL = 1e-10


def generalized_pauli(d: int, m: int, n: int) -> np.ndarray:
    """X^m Z^n with X|l> = |l+1 mod d> and Z|l> = exp(2 pi i l / d)|l>; 1 <= m, n <= d."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not (1 <= m <= d and 1 <= n <= d):
        raise ValueError(f"powers must lie in 1..{d}, got m={m}, n={n}")
    x = np.roll(np.eye(d), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return np.linalg.matrix_power(x, m % d) @ np.linalg.matrix_power(z, n % d)


def pauli_labels(d: int) -> list[tuple[int, int]]:
    """(m, n) labels in the order used by :func:`pauli_set`; identity (d, d) first."""
    labels = [(m, n) for m in range(1, d + 1) for n in range(1, d + 1)]
    labels.remove((d, d))
    return [(d, d)] + labels


def pauli_set(d: int) -> list[np.ndarray]:
    return [generalized_pauli(d, m, n) for m, n in pauli_labels(d)]


@lru_cache(maxsize=None)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of d x d Hermitian matrices, shape (d*d, d, d)."""
    basis = [np.eye(d, dtype=complex) / np.sqrt(d)]
    pairs = list(itertools.combinations(range(d), 2))
    for j, k in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[j, k] = g[k, j] = 1 / np.sqrt(2)
        basis.append(g)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[j, k], g[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
        basis.append(g)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        basis.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    out = np.array(basis)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class UnitaryParams:
    d: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size != self.d * self.d:
            raise ValueError(f"need {self.d * self.d} parameters for d={self.d}, got {v.size}")
        object.__setattr__(self, "values", v)


def generator(d: int, values: np.ndarray) -> np.ndarray:
    return np.tensordot(np.asarray(values, dtype=float), hermitian_basis(d), axes=1)


def unitary_from_params(p: UnitaryParams) -> np.ndarray:
    return matrix_exp_i_hermitian(generator(p.d, p.values))


def params_from_unitary(u: np.ndarray) -> UnitaryParams:
    """Inverse of :func:`unitary_from_params` via the principal logarithm.

    The complex Schur form of a unitary is diagonal, so it yields an exact
    eigenbasis even for degenerate spectra.
    """
    u = np.asarray(u, dtype=complex)
    t, z = schur(u, output="complex")
    h = (z * np.angle(np.diag(t))) @ z.conj().T
    coeffs = np.einsum("kab,ba->k", hermitian_basis(u.shape[0]), h).real
    return UnitaryParams(u.shape[0], coeffs)


def expi_with_frechet(d: int, values: np.ndarray):
    """exp(iH(values)) plus what is needed for its directional derivative.

    Returns ``(U, V, F)`` where ``H = V diag(D) V^H`` and ``F`` is the
    divided-difference matrix of exp(i.), so that
    ``dU = V (F * (V^H dH V)) V^H``.
    """
    h = generator(d, values)
    dvals, v = np.linalg.eigh(h)
    e = np.exp(1j * dvals)
    diff = dvals[:, None] - dvals[None, :]
    close = np.abs(diff) < 1e-9
    with np.errstate(invalid="ignore", divide="ignore"):
        f = (e[:, None] - e[None, :]) / diff
    # degenerate limit: derivative of exp(i x), averaged for symmetry
    f = np.where(close, 0.5j * (e[:, None] + e[None, :]), f)
    return (v * e) @ v.conj().T, v, f


def param_gradient(d: int, v: np.ndarray, f: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Gradient of Re sum_ab dU_ab K_ab with respect to the generator coefficients."""
    g = v.conj().T @ k.T @ v
    r = f * g.T
    pmat = v @ r.T @ v.conj().T
    return np.einsum("kab,ba->k", hermitian_basis(d), pmat).real


@dataclass(frozen=True)
class EncodingSet:
    """N encodings; entry i holds one unitary per sender, entry 0 is all-identity."""

    sender_dims: tuple[int, ...]
    unitaries: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.sender_dims)
        rows = tuple(tuple(np.asarray(u, dtype=complex) for u in row) for row in self.unitaries)
        if not rows:
            raise ValueError("encoding set is empty")
        for row in rows:
            if len(row) != len(dims):
                raise ValueError("each encoding needs one unitary per sender")
            for u, d in zip(row, dims):
                if u.shape != (d, d):
                    raise ValueError(f"unitary of shape {u.shape} for a sender of dimension {d}")
                if np.max(np.abs(u.conj().T @ u - np.eye(d))) > UNITARY_TOL:
                    raise ValueError("encoder is not unitary")
        for u, d in zip(rows[0], dims):
            if np.max(np.abs(u - np.eye(d))) > UNITARY_TOL:
                raise ValueError("the first encoding must be the identity")
        object.__setattr__(self, "sender_dims", dims)
        object.__setattr__(self, "unitaries", rows)

    def __len__(self):
        return len(self.unitaries)

    @classmethod
    def from_params(cls, sender_dims: Sequence[int], params: Sequence[Sequence[np.ndarray]]) -> "EncodingSet":
        """Identity first, then one encoder per entry of ``params`` (one vector per sender)."""
        sender_dims = tuple(sender_dims)
        rows = [tuple(np.eye(d) for d in sender_dims)]
        for row in params:
            rows.append(tuple(unitary_from_params(UnitaryParams(d, v)) for d, v in zip(sender_dims, row)))
        return cls(sender_dims, tuple(rows))


def sender_indices(n_parties: int, receiver_index: int) -> list[int]:
    if not 0 <= receiver_index < n_parties:
        raise ValueError(f"receiver index {receiver_index} out of range")
    return [k for k in range(n_parties) if k != receiver_index]


def apply_unitaries(tensor: np.ndarray, axis: int, us: np.ndarray) -> np.ndarray:
    """Apply a batch of unitaries ``us`` (B, d, d) along ``axis`` of a batch of
    tensors (B, *dims), where ``axis`` counts subsystems (not the batch axis)."""
    t = np.moveaxis(tensor, axis + 1, -1)
    shape = t.shape
    t = t.reshape(shape[0], -1, shape[-1]) @ np.swapaxes(us, 1, 2)
    return np.moveaxis(t.reshape(shape), -1, axis + 1)


def encoded_states(state: PureState, receiver_index: int, unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """Rows are the encoded state vectors; ``unitaries[s]`` is a (N, d_s, d_s) batch for sender s."""
    senders = sender_indices(state.n_parties, receiver_index)
    n = unitaries[0].shape[0]
    t = np.broadcast_to(state.tensor(), (n,) + state.dims)
    for s, us in zip(senders, unitaries):
        t = apply_unitaries(t, s, us)
    return t.reshape(n, -1)


def apply_encoding(state: PureState, enc: EncodingSet, receiver_index: int,
                   priors: Sequence[float] | None = None) -> Ensemble:
    senders = sender_indices(state.n_parties, receiver_index)
    if tuple(state.dims[s] for s in senders) != enc.sender_dims:
        raise ValueError(f"encoders for dims {enc.sender_dims} do not fit state dims {state.dims}")
    n = len(enc)
    priors = np.full(n, 1.0 / n) if priors is None else priors
    batches = [np.array([row[j] for row in enc.unitaries]) for j in range(len(senders))]
    rows = encoded_states(state, receiver_index, batches)
    return Ensemble(tuple(PureState(state.dims, r) for r in rows), priors)
