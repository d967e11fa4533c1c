"""Conclusive dense coding capacities of shared pure states."""
from .capacity import (
    CapacityConfig,
    CapacityResult,
    CapacityStatus,
    EncoderKind,
    asymptotic_capacity,
    cdc_capacity,
    cdc_capacity_n,
    closed_form_gghz_pauli,
    closed_form_two_qubit_pauli,
    ddc_check,
    pauli_capacity_n,
)
from .discrimination import (
    Ensemble,
    GammaSolution,
    conclusive_mutual_information,
    gram,
    optimize_gammas,
    usd_feasible,
)
from .encoding import EncodingSet, UnitaryParams, apply_encoding, generalized_pauli, unitary_from_params
from .entanglement import Bipartition, GgmResult, entanglement_entropy, ggm
from .qcore import DensityMatrix, PureState, partial_trace, von_neumann_entropy
from .states import FamilyKind, StateFamily, gghz_state, gw_state, two_qubit_state, two_qutrit_state

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "CapacityConfig",
    "CapacityResult",
    "CapacityStatus",
    "DensityMatrix",
    "EncoderKind",
    "EncodingSet",
    "Ensemble",
    "FamilyKind",
    "GammaSolution",
    "GgmResult",
    "PureState",
    "StateFamily",
    "UnitaryParams",
    "apply_encoding",
    "asymptotic_capacity",
    "cdc_capacity",
    "cdc_capacity_n",
    "closed_form_gghz_pauli",
    "closed_form_two_qubit_pauli",
    "conclusive_mutual_information",
    "ddc_check",
    "entanglement_entropy",
    "generalized_pauli",
    "gghz_state",
    "ggm",
    "gram",
    "gw_state",
    "optimize_gammas",
    "partial_trace",
    "pauli_capacity_n",
    "two_qubit_state",
    "two_qutrit_state",
    "unitary_from_params",
    "usd_feasible",
    "von_neumann_entropy",
]
