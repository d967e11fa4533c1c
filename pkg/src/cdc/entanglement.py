"""Entanglement entropy across a cut and the generalized geometric measure."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .qcore import PureState, reduced_density_matrix, von_neumann_entropy


@dataclass(frozen=True)
class Bipartition:
    side_a: frozenset[int]
    side_b: frozenset[int]

    @classmethod
    def of(cls, side_a: Iterable[int], n_parties: int) -> "Bipartition":
        a = frozenset(int(i) for i in side_a)
        b = frozenset(range(n_parties)) - a
        cut = cls(a, b)
        cut.validate(n_parties)
        return cut

    def validate(self, n_parties: int) -> None:
        every = frozenset(range(n_parties))
        if not self.side_a or not self.side_b:
            raise ValueError("both sides of a bipartition must be nonempty")
        if self.side_a & self.side_b or (self.side_a | self.side_b) != every:
            raise ValueError(f"{sorted(self.side_a)}:{sorted(self.side_b)} does not split {n_parties} parties")

    def smaller_side(self, dims) -> frozenset[int]:
        da = np.prod([dims[i] for i in self.side_a])
        db = np.prod([dims[i] for i in self.side_b])
        return self.side_a if da <= db else self.side_b


@dataclass(frozen=True)
class GgmResult:
    value: float
    maximizing_bipartition: Bipartition
    max_eigenvalue: float
    # two parties: the measure is just 1 - (largest Schmidt coefficient)^2
    bipartite_only: bool = False


def bipartitions(n_parties: int) -> list[Bipartition]:
    """All 2^(n-1) - 1 nontrivial cuts, with party 0 always on side A."""
    cuts = []
    rest = range(1, n_parties)
    for k in range(0, n_parties - 1):
        for extra in itertools.combinations(rest, k):
            cuts.append(Bipartition.of((0,) + extra, n_parties))
    return cuts


def entanglement_entropy(state: PureState, cut: Bipartition) -> float:
    cut.validate(state.n_parties)
    side = cut.smaller_side(state.dims)
    return von_neumann_entropy(reduced_density_matrix(state, side))


def senders_receiver_entropy(state: PureState, receiver: int) -> float:
    return entanglement_entropy(state, Bipartition.of([receiver], state.n_parties))


def ggm(state: PureState) -> GgmResult:
    """1 - max over bipartitions of the largest marginal eigenvalue."""
    best_lam, best_cut = -1.0, None
    for cut in bipartitions(state.n_parties):
        rho = reduced_density_matrix(state, cut.smaller_side(state.dims))
        lam = float(np.linalg.eigvalsh(rho)[-1])
        if lam > best_lam:
            best_lam, best_cut = lam, cut
    value = min(max(1.0 - best_lam, 0.0), 1.0)
    return GgmResult(value, best_cut, best_lam, bipartite_only=state.n_parties < 3)
