"""POVM counts of competing transformation protocols, and an SPDC baseline."""

from __future__ import annotations

import enum
import math

import numpy as np

from .hardy import chart_from_spectrum, outcomes_from_chart
from .outcomes import DomainError
from .spectrum import _check_lambda, tmsv_spectrum

__all__ = [
    "Scheme",
    "povm_count",
    "bvn_count_formula",
    "hardy_count_observed",
    "spdc_postselection",
    "spdc_rate",
]


class Scheme(enum.Enum):
    NIELSEN = "nielsen"
    BIRKHOFF_VON_NEUMANN = "bvn"
    HARDY_AREAS = "hardy"


def bvn_count_formula(n):
    """``(N-1)^2 / 2 + 2``, real-valued as plotted."""
    return (n - 1) ** 2 / 2 + 2


def povm_count(scheme, n):
    """Number of POVM elements needed at Fock truncation ``n``.

    The Birkhoff-von Neumann count is floored to an integer.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"truncation must be an integer >= 2, got {n}")
    n = int(n)
    scheme = Scheme(scheme)
    if scheme is Scheme.NIELSEN:
        return 2 ** (n - 1)
    if scheme is Scheme.BIRKHOFF_VON_NEUMANN:
        return math.floor(bvn_count_formula(n))
    return n


def hardy_count_observed(lam, n):
    """Outcomes the method of areas produces for the ``n``-level truncated TMSV.

    The truncated state is renormalized, so the count is that of an honest
    ``n``-level input.
    """
    lam = _check_lambda(lam)
    if n < 2:
        raise DomainError("truncation must be >= 2")
    spec = tmsv_spectrum(lam, n).renormalized()
    outcomes = outcomes_from_chart(chart_from_spectrum(spec))
    return int(np.count_nonzero(outcomes.probabilities > 0))


def spdc_postselection(lam, n=6):
    """Brute-force single-click post-selection on two TMSV copies.

    Modes are ordered ``(A1, B1, A2, B2)``; Alice holds ``A1, A2`` and Bob
    ``B1, B2``.  Returns the post-selection probability and the Schmidt
    coefficients of the normalized post-selected state.
    """
    lam = _check_lambda(lam)
    if n < 3:
        raise DomainError("truncation must be >= 3")
    amp = math.sqrt(1.0 - lam * lam) * lam ** np.arange(n)
    pair = np.diag(amp)  # pair[a, b] for one TMSV
    psi = np.einsum("ab,cd->abcd", pair, pair)  # (A1, B1, A2, B2)
    occ = np.arange(n)
    alice_one = (occ[:, None, None, None] + occ[None, None, :, None]) == 1
    bob_one = (occ[None, :, None, None] + occ[None, None, None, :]) == 1
    kept = np.where(alice_one & bob_one, psi, 0.0)
    prob = float(np.sum(kept**2))
    if prob == 0.0:
        return 0.0, np.zeros(0)
    # rows: Alice (A1, A2), columns: Bob (B1, B2)
    mat = kept.transpose(0, 2, 1, 3).reshape(n * n, n * n) / math.sqrt(prob)
    sv = np.linalg.svd(mat, compute_uv=False)
    return prob, sv[sv > 1e-14]


def spdc_rate(lam, n=6):
    """Bell pairs per TMSV consumed by SPDC post-selection (two TMSV per try)."""
    prob, _ = spdc_postselection(lam, n)
    return prob / 2.0
