"""Random-dimension qudit conversion with maximal average entanglement.

Leaving the column chart untouched and cutting it at every column height
yields outcome ``d`` (a maximally entangled pair of dimension ``d``) with
probability ``d (alpha_{d-1} - alpha_d)``.  For the TMSV, with
``x = lam**2``, this is ``d x^(d-1) (1 - x)^2``.  The Kraus operator
``sqrt(1 - x) lam^(d-1-n)`` on levels ``n < d`` heralds
``sum_{n<d} |nn> / sqrt d``.
"""

from __future__ import annotations

import math

import numpy as np

from .outcomes import DomainError, OutcomeSet, Qudit
from .spectrum import _check_lambda, auto_truncation, tmsv_entropy

__all__ = [
    "qudit_probability",
    "qudit_tail",
    "auto_dmax",
    "qudit_outcomes",
    "average_entanglement",
    "entanglement_gap",
    "GAP_LIMIT",
]

#: Euler-Mascheroni constant over ln 2.
GAP_LIMIT = np.euler_gamma / math.log(2.0)


def qudit_probability(lam, d):
    lam = _check_lambda(lam)
    d = np.asarray(d)
    x = lam * lam
    return d * x ** (d - 1) * (1.0 - x) ** 2


def qudit_tail(lam, d_max):
    """``sum_{d > d_max} P_d = x^D (D + 1 - D x)`` in closed form."""
    x = _check_lambda(lam) ** 2
    return x**d_max * (d_max + 1 - d_max * x)


def auto_dmax(lam, tol=1e-12):
    """Default number of enumerated outcomes.

    Smallest ``D`` with outcome tail below ``tol`` that also resolves the
    identity to ``tol`` on every level the TMSV occupies above ``tol``:
    level ``k`` is missing ``x^(D-k)`` of its weight.
    """
    lam = _check_lambda(lam)
    if lam == 0.0:
        return 1
    x = lam * lam
    d = max(1, math.ceil(math.log(tol) / math.log(x)))
    while qudit_tail(lam, d) >= tol:
        d += max(1, d // 8)
    # step back to the smallest qualifying d
    while d > 1 and qudit_tail(lam, d - 1) < tol:
        d -= 1
    return max(d, auto_truncation(lam, tol) - 1 + math.ceil(math.log(tol) / math.log(x)))


def qudit_outcomes(lam, d_max=None):
    """Outcomes ``Qudit(1..d_max)`` sorted by descending probability."""
    lam = _check_lambda(lam)
    if d_max is None:
        d_max = auto_dmax(lam)
    if int(d_max) != d_max or d_max < 1:
        raise DomainError(f"d_max must be a positive integer, got {d_max}")
    d_max = int(d_max)
    x = lam * lam
    d = np.arange(1, d_max + 1)
    probs = qudit_probability(lam, d)
    # kraus[d-1, n] = sqrt(1 - x) lam^(d-1-n) for n < d
    expo = (d[:, None] - 1) - np.arange(d_max)[None, :]
    kraus = np.where(expo >= 0, math.sqrt(1.0 - x) * lam ** np.maximum(expo, 0), 0.0)
    labels = [Qudit(int(k)) for k in d]
    nonzero = probs > 0
    return OutcomeSet(
        [lab for lab, keep in zip(labels, nonzero) if keep],
        probs[nonzero],
        kraus[nonzero],
        qudit_tail(lam, d_max),
        meta={"scheme": "qudit", "lam": lam},
    )


def _series_block(x, start, stop):
    d = np.arange(start, stop, dtype=float)
    return d * x ** (d - 1) * (1.0 - x) ** 2 * np.log2(d)


def average_entanglement(lam, tol=1e-12):
    """``S_avg = sum_d P_d log2 d`` summed until the remainder is below ``tol``.

    Terms ``t_d = d log2(d) x^(d-1) (1-x)^2`` have a ratio
    ``t_{d+1}/t_d`` that decreases in ``d``, so once it drops below 1 the
    remainder after ``D`` is bounded by ``t_{D+1} / (1 - t_{D+2}/t_{D+1})``.
    """
    lam = _check_lambda(lam)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    if lam == 0.0:
        return 0.0
    x = lam * lam
    total = 0.0
    start, block = 2, 4096
    while True:
        terms = _series_block(x, start, start + block)
        total += math.fsum(terms)
        stop = start + block
        t1, t2 = _series_block(x, stop, stop + 2)
        if t1 == 0.0:
            return total
        ratio = t2 / t1
        if ratio < 1.0 and t1 / (1.0 - ratio) < tol:
            return total
        start = stop
        block *= 2


def entanglement_gap(lam, tol=1e-12):
    """Entropy of the TMSV minus the average qudit entanglement (ebits)."""
    lam = _check_lambda(lam)
    if lam == 0.0:
        return 0.0
    return tmsv_entropy(lam) - average_entanglement(lam, tol)
