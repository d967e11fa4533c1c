import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdc.entanglement import (
    Bipartition,
    bipartitions,
    entanglement_entropy,
    ggm,
    senders_receiver_entropy,
)
from cdc.qcore import PureState
from cdc.states import INV_SQRT2, INV_SQRT3, gghz_state, gw_state, two_qubit_state
from oracles import binary_entropy


def test_bipartition_validation():
    with pytest.raises(ValueError):
        Bipartition.of([], 3)
    with pytest.raises(ValueError):
        Bipartition.of([0, 1, 2], 3)
    with pytest.raises(ValueError):
        Bipartition(frozenset({0}), frozenset({0, 1})).validate(2)


@pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 7)])
def test_all_nontrivial_cuts_enumerated(n, count):
    cuts = bipartitions(n)
    assert len(cuts) == count == 2 ** (n - 1) - 1
    assert len({c.side_a for c in cuts}) == count


def test_bell_state_has_one_ebit():
    assert entanglement_entropy(two_qubit_state(INV_SQRT2), Bipartition.of([0], 2)) == pytest.approx(1.0)


def test_gghz_senders_receiver_entropy():
    assert senders_receiver_entropy(gghz_state(3, 0.6), 2) == pytest.approx(binary_entropy(0.36), abs=1e-12)
    assert senders_receiver_entropy(gghz_state(3, 0.6), 2) == pytest.approx(0.9427, abs=1e-4)


@pytest.mark.parametrize("beta", [0.0, 0.2, 0.5, 0.7])
def test_gw_receiver_entropy_ignores_beta(beta):
    assert senders_receiver_entropy(gw_state(0.6, beta), 2) == pytest.approx(binary_entropy(0.36), abs=1e-12)


@pytest.mark.parametrize("alpha", np.linspace(0, INV_SQRT2, 8))
def test_gghz_ggm_closed_form(alpha):
    assert ggm(gghz_state(3, alpha)).value == pytest.approx(min(alpha**2, 1 - alpha**2), abs=1e-12)


def test_w_state_ggm():
    res = ggm(gw_state(INV_SQRT3, INV_SQRT3))
    assert res.value == pytest.approx(1 / 3, abs=1e-12)
    assert res.value == pytest.approx(1 - res.max_eigenvalue, abs=1e-12)
    assert not res.bipartite_only


def test_product_state_has_no_ggm():
    v = np.zeros(8)
    v[0] = 1
    assert ggm(PureState((2, 2, 2), v)).value == pytest.approx(0.0, abs=1e-12)


def test_two_party_ggm_is_flagged():
    res = ggm(two_qubit_state(0.6))
    assert res.bipartite_only
    assert res.value == pytest.approx(0.36)


def test_gw_ggm_single_peaked_in_beta():
    betas = np.arange(0, np.sqrt(1 - 0.64**2) + 1e-9, 0.01)
    curve = np.array([ggm(gw_state(0.64, b)).value for b in betas])
    signs = np.sign(np.diff(curve))
    signs = signs[signs != 0]
    assert np.count_nonzero(np.diff(signs)) <= 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_entropy_same_from_either_side(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    s = PureState((2, 2, 2), v / np.linalg.norm(v))
    cut = Bipartition.of([0, 2], 3)
    flipped = Bipartition(cut.side_b, cut.side_a)
    assert entanglement_entropy(s, cut) == pytest.approx(entanglement_entropy(s, flipped), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([3, 4]))
def test_qubit_ggm_at_most_half(seed, n):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    res = ggm(PureState((2,) * n, v / np.linalg.norm(v)))
    assert 0 <= res.value <= 0.5 + 1e-12
