"""Quantum source families and their blocks Π_n."""

from .blocks import PositivityViolation, block_density, recursion_step
from .checks import (
    ClassicalityVerdict,
    CommutingConditions,
    ConsistencyReport,
    ConsistencyRow,
    PositivityReport,
    PositivityRow,
    verify_classical,
    verify_commuting_conditions,
    verify_consistency,
    verify_positivity,
)
from .density import DensityMatrix, InvalidSource, SignalEnsemble, ensemble_to_density
from .family import (
    SourceFamily,
    SourceKind,
    build_commuting_r,
    build_pauli_r,
    pauli_omega,
    pauli_rho,
    r_residuals,
)
from .observables import ShiftedObservable, expectation
from .store import AbstractBlockStore, BlockStore

__all__ = [
    "AbstractBlockStore",
    "BlockStore",
    "ClassicalityVerdict",
    "CommutingConditions",
    "ConsistencyReport",
    "ConsistencyRow",
    "DensityMatrix",
    "InvalidSource",
    "PositivityReport",
    "PositivityRow",
    "PositivityViolation",
    "ShiftedObservable",
    "SignalEnsemble",
    "SourceFamily",
    "SourceKind",
    "block_density",
    "build_commuting_r",
    "build_pauli_r",
    "ensemble_to_density",
    "expectation",
    "pauli_omega",
    "pauli_rho",
    "r_residuals",
    "recursion_step",
    "verify_classical",
    "verify_commuting_conditions",
    "verify_consistency",
    "verify_positivity",
]
