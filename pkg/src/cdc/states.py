"""The four shared-state families, in canonical real-coefficient form."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qcore import PureState

_TOL = 1e-12
INV_SQRT2 = 1 / math.sqrt(2)
INV_SQRT3 = 1 / math.sqrt(3)


class FamilyKind(str, enum.Enum):
    TWO_QUBIT = "two-qubit"
    TWO_QUTRIT = "two-qutrit"
    GGHZ = "gghz"
    GW = "gw"


@dataclass(frozen=True)
class StateFamily:
    """A family plus its parameters; ``n_parties`` only matters for GGHZ."""

    kind: FamilyKind
    alpha: float
    beta: float | None = None
    n_parties: int = 2

    def build(self) -> PureState:
        if self.kind is FamilyKind.TWO_QUBIT:
            return two_qubit_state(self.alpha)
        if self.kind is FamilyKind.TWO_QUTRIT:
            return two_qutrit_state(self.alpha, self.beta)
        if self.kind is FamilyKind.GGHZ:
            return gghz_state(self.n_parties, self.alpha)
        return gw_state(self.alpha, self.beta)


def in_domain(kind: FamilyKind, alpha: float, beta: float | None = None) -> bool:
    """Whether (alpha, beta) lies in the canonical parameter domain of ``kind``."""
    if kind in (FamilyKind.TWO_QUBIT, FamilyKind.GGHZ):
        return -_TOL <= alpha <= INV_SQRT2 + _TOL
    if beta is None:
        return False
    if kind is FamilyKind.TWO_QUTRIT:
        return -_TOL <= alpha <= beta + _TOL and alpha**2 + beta**2 <= 2 / 3 + _TOL
    return alpha >= -_TOL and beta >= -_TOL and alpha**2 + beta**2 <= 1 + _TOL


def _tail(*coeffs: float) -> float:
    return math.sqrt(max(1.0 - sum(c * c for c in coeffs), 0.0))


def two_qubit_state(alpha: float) -> PureState:
    """alpha|00> + sqrt(1 - alpha^2)|11>, with 0 <= alpha <= 1/sqrt(2)."""
    if not in_domain(FamilyKind.TWO_QUBIT, alpha):
        raise ValueError(f"alpha={alpha} outside [0, 1/sqrt(2)]")
    return gghz_state(2, alpha)


def two_qutrit_state(alpha: float, beta: float) -> PureState:
    """alpha|00> + beta|11> + sqrt(1 - alpha^2 - beta^2)|22>."""
    if not in_domain(FamilyKind.TWO_QUTRIT, alpha, beta):
        raise ValueError(
            f"(alpha, beta)=({alpha}, {beta}) violates 0 <= alpha <= beta, alpha^2 + beta^2 <= 2/3"
        )
    amps = np.zeros(9)
    amps[0], amps[4], amps[8] = alpha, beta, _tail(alpha, beta)
    return PureState((3, 3), amps)


def gghz_state(n: int, alpha: float) -> PureState:
    """alpha|0...0> + sqrt(1 - alpha^2)|1...1> on ``n`` qubits."""
    if n < 2:
        raise ValueError("a generalized GHZ state needs at least 2 parties")
    if not in_domain(FamilyKind.GGHZ, alpha):
        raise ValueError(f"alpha={alpha} outside [0, 1/sqrt(2)]")
    amps = np.zeros(2**n)
    amps[0], amps[-1] = alpha, _tail(alpha)
    return PureState((2,) * n, amps)


def gw_state(alpha: float, beta: float) -> PureState:
    """alpha|001> + beta|010> + sqrt(1 - alpha^2 - beta^2)|100>, parties (A1, A2, B)."""
    if not in_domain(FamilyKind.GW, alpha, beta):
        raise ValueError(f"(alpha, beta)=({alpha}, {beta}) violates alpha, beta >= 0, alpha^2 + beta^2 <= 1")
    amps = np.zeros(8)
    amps[0b001], amps[0b010], amps[0b100] = alpha, beta, _tail(alpha, beta)
    return PureState((2, 2, 2), amps)
