"""Truncated Schmidt spectra of the two-mode squeezed vacuum.

The TMSV is ``sqrt(1 - lam**2) * sum_n lam**n |n>|n>`` with ``lam = tanh(r)``,
so its squared Schmidt coefficients are the geometric sequence
``alpha_n = (1 - lam**2) * lam**(2 n)``.  Squeezing in decibels follows the
quadrature-variance convention ``dB = -10 log10(exp(-2 r))``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .outcomes import DomainError

__all__ = [
    "TmsvParams",
    "SchmidtSpectrum",
    "tmsv_spectrum",
    "auto_truncation",
    "entanglement_entropy",
    "tmsv_entropy",
    "geometric_tail_entropy",
    "db_to_lambda",
    "lambda_to_db",
    "THRESHOLD_LAMBDA",
]

THRESHOLD_LAMBDA = 1.0 / math.sqrt(2.0)
_DB_PER_NEPER = 20.0 / math.log(10.0)


def _check_lambda(lam):
    lam = float(lam)
    if not (0.0 <= lam < 1.0) or math.isnan(lam):
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    return lam


def db_to_lambda(db):
    """Squeezing in dB -> ``lam = tanh(r)``."""
    db = float(db)
    if db < 0 or math.isnan(db):
        raise DomainError(f"squeezing must be non-negative, got {db} dB")
    lam = math.tanh(db / _DB_PER_NEPER)
    if lam >= 1.0:
        raise DomainError(f"{db} dB is beyond double precision (tanh r rounds to 1)")
    return lam


def lambda_to_db(lam):
    """``lam = tanh(r)`` -> squeezing in dB, ``-10 log10(exp(-2 r))``."""
    return _DB_PER_NEPER * math.atanh(_check_lambda(lam))


@dataclass(frozen=True)
class TmsvParams:
    """Equivalent parametrisations of one TMSV: ``lam``, ``r`` and dB."""

    lam: float
    r: float
    squeezing_db: float

    @classmethod
    def from_lambda(cls, lam):
        lam = _check_lambda(lam)
        r = math.atanh(lam)
        return cls(lam, r, _DB_PER_NEPER * r)

    @classmethod
    def from_r(cls, r):
        r = float(r)
        if r < 0:
            raise DomainError(f"squeezing parameter must be >= 0, got {r}")
        return cls(_check_lambda(math.tanh(r)), r, _DB_PER_NEPER * r)

    @classmethod
    def from_db(cls, db):
        lam = db_to_lambda(db)
        return cls(lam, float(db) / _DB_PER_NEPER, float(db))


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending squared Schmidt coefficients plus the mass cut off.

    ``lam`` is set when the spectrum is a TMSV spectrum, which lets the
    entropy routine use the exact geometric tail.
    """

    coeffs: np.ndarray
    tail_mass: float = 0.0
    lam: float | None = None

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise DomainError("coefficients must be a non-empty vector")
        if np.any(c < 0) or np.any(np.diff(c) > 1e-15):
            raise DomainError("coefficients must be non-negative and descending")
        if self.tail_mass < 0 or abs(c.sum() + self.tail_mass - 1.0) > 1e-12:
            raise DomainError("coefficients plus tail mass must sum to 1")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    @property
    def n(self):
        return self.coeffs.size

    def suffix_sums(self):
        """``sum_{k >= l} alpha_k`` for l = 0..N-1, tail included."""
        return np.cumsum(self.coeffs[::-1])[::-1] + self.tail_mass

    def renormalized(self):
        """The finite N-level state obtained by dropping the tail."""
        return SchmidtSpectrum(self.coeffs / self.coeffs.sum(), 0.0)

    def to_json(self):
        return json.dumps(
            {
                "lambda": self.lam,
                "N": self.n,
                "coeffs": self.coeffs.tolist(),
                "tail_mass": self.tail_mass,
            }
        )

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(np.asarray(d["coeffs"]), d["tail_mass"], d.get("lambda"))


def auto_truncation(lam, tol=1e-12):
    """Smallest N with ``lam**(2N) < tol``."""
    lam = _check_lambda(lam)
    if lam == 0.0:
        return 1
    n = math.ceil(math.log(tol) / (2.0 * math.log(lam)))
    while lam ** (2 * n) >= tol:
        n += 1
    return max(n, 1)


def tmsv_spectrum(params, n=None):
    """Leading ``n`` squared Schmidt coefficients of a TMSV.

    ``params`` is a :class:`TmsvParams` or a bare ``lam``.  With ``n=None``
    the truncation is chosen so that the tail mass is below 1e-12.
    """
    lam = params.lam if isinstance(params, TmsvParams) else _check_lambda(params)
    if n is None:
        n = auto_truncation(lam)
    if int(n) != n or n < 1:
        raise DomainError(f"truncation must be a positive integer, got {n}")
    n = int(n)
    x = lam * lam
    coeffs = (1.0 - x) * x ** np.arange(n)
    return SchmidtSpectrum(coeffs, x**n, lam)


def geometric_tail_entropy(first, ratio):
    """Exact ``-sum_j a r^j log2(a r^j)`` for ``a = first``, ``r = ratio``."""
    if first <= 0.0:
        return 0.0
    if not 0.0 <= ratio < 1.0:
        return math.inf
    total = -first / (1.0 - ratio) * math.log2(first)
    if ratio > 0.0:
        total -= first * math.log2(ratio) * ratio / (1.0 - ratio) ** 2
    return total


def tmsv_entropy(lam):
    """Closed-form entanglement entropy of the TMSV in ebits."""
    lam = _check_lambda(lam)
    if lam == 0.0:
        return 0.0
    x = lam * lam
    return -math.log2(1.0 - x) - x / (1.0 - x) * math.log2(x)


def entanglement_entropy(s):
    """Entropy of the stored coefficients and a bound on what the tail adds.

    Returns
    -------
    entropy : float
        ``-sum alpha_n log2 alpha_n`` over the stored coefficients.
    error : float
        Entropy carried by the tail.  Exact for TMSV spectra; for other
        spectra the tail is modelled as continuing geometrically with the
        ratio of the last two coefficients.
    """
    c = s.coeffs[s.coeffs > 0]
    entropy = float(-np.sum(c * np.log2(c)))
    if s.tail_mass == 0.0:
        return entropy, 0.0
    if s.lam is not None:
        x = s.lam * s.lam
        return entropy, geometric_tail_entropy((1.0 - x) * x**s.n, x)
    if c.size >= 2:
        ratio = c[-1] / c[-2]
    else:
        ratio = 0.0
    if ratio >= 1.0:
        return entropy, math.inf
    first = s.tail_mass * (1.0 - ratio)
    return entropy, geometric_tail_entropy(first, ratio)
