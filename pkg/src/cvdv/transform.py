"""Single-copy LOCC transformation criteria.

A pure state converts deterministically into a target iff every suffix sum
of its squared Schmidt coefficients dominates the target's; otherwise the
best success probability is the smallest ratio of those suffix sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .outcomes import DomainError
from .spectrum import _check_lambda

__all__ = [
    "TargetSpectrum",
    "max_entangled",
    "majorizes",
    "vidal_pmax",
    "pmax_qubit",
    "MAJORIZATION_TOL",
]

MAJORIZATION_TOL = 1e-12


@dataclass(frozen=True)
class TargetSpectrum:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0 or np.any(c < 0) or np.any(np.diff(c) > 1e-15):
            raise DomainError("target coefficients must be descending and non-negative")
        if abs(c.sum() - 1.0) > 1e-12:
            raise DomainError("target coefficients must sum to 1")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)


def max_entangled(d):
    """Target spectrum of a maximally entangled qudit pair."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    return TargetSpectrum(np.full(d, 1.0 / d))


def _suffixes(initial, target):
    length = max(initial.n, target.coeffs.size)
    a = np.zeros(length)
    b = np.zeros(length)
    a[: initial.n] = initial.coeffs
    b[: target.coeffs.size] = target.coeffs
    # Past the truncation the initial suffix is approximated by the tail mass.
    sa = np.cumsum(a[::-1])[::-1] + initial.tail_mass
    sb = np.cumsum(b[::-1])[::-1]
    return sa, sb


def majorizes(initial, target):
    """True when ``initial`` converts into ``target`` with certainty."""
    sa, sb = _suffixes(initial, target)
    return bool(np.all(sa - sb >= -MAJORIZATION_TOL))


def vidal_pmax(initial, target):
    """Maximal single-copy conversion probability."""
    sa, sb = _suffixes(initial, target)
    if np.all(sa - sb >= -MAJORIZATION_TOL):
        return 1.0
    mask = sb > 0
    ratio = np.min(sa[mask] / sb[mask])
    return float(min(max(ratio, 0.0), 1.0))


def pmax_qubit(lam):
    """``min(1, 2 lam**2)`` for TMSV -> maximally entangled qubit pair."""
    lam = _check_lambda(lam)
    return min(1.0, 2.0 * lam * lam)
