"""Conversion of two-mode squeezed vacuum into maximally entangled Fock-basis pairs.

Submodules:

``spectrum``   TMSV Schmidt spectra, dB conversion, entropy
``transform``  majorization and optimal conversion probability
``hardy``      qubit-pair conversion by the method of areas
``qudit``      random-dimension qudit-pair conversion
``census``     POVM counts of competing protocols, SPDC baseline
``bintree``    binary measurement trees and their round statistics
``mcsim``      Monte Carlo trajectories and the SQR ancilla construction
``cli``        command-line front end
"""

from .bintree import (
    NEAR_EVEN,
    OOPR,
    MeasurementTree,
    TreeStats,
    build_near_even_tree,
    build_oopr_tree,
    build_tree,
    tree_stats,
)
from .hardy import build_chart, completeness_check, qubit_outcomes
from .mcsim import empirical_stats, simulate, tmsv_state
from .outcomes import Bell, DomainError, Fail, OutcomeSet, Qudit, Residual, TruncationError
from .qudit import average_entanglement, entanglement_gap, qudit_outcomes
from .spectrum import SchmidtSpectrum, TmsvParams, db_to_lambda, lambda_to_db, tmsv_entropy, tmsv_spectrum
from .transform import majorizes, max_entangled, pmax_qubit, vidal_pmax

__version__ = "0.1.0"

__all__ = [
    "Bell",
    "DomainError",
    "Fail",
    "MeasurementTree",
    "NEAR_EVEN",
    "OOPR",
    "OutcomeSet",
    "Qudit",
    "Residual",
    "SchmidtSpectrum",
    "TmsvParams",
    "TreeStats",
    "TruncationError",
    "average_entanglement",
    "build_chart",
    "build_near_even_tree",
    "build_oopr_tree",
    "build_tree",
    "completeness_check",
    "db_to_lambda",
    "empirical_stats",
    "entanglement_gap",
    "lambda_to_db",
    "majorizes",
    "max_entangled",
    "pmax_qubit",
    "qubit_outcomes",
    "qudit_outcomes",
    "simulate",
    "tmsv_entropy",
    "tmsv_spectrum",
    "tmsv_state",
    "tree_stats",
    "vidal_pmax",
]
