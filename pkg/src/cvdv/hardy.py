"""Method of areas for converting a pure state into a maximally entangled qubit pair.

The squared Schmidt coefficients are drawn as unit-width columns of heights
``alpha_n``.  Patches are moved onto columns further left until the chart
has two columns: the qubit target (possibly compressed).  Each horizontal
slab bounded by colour changes is one outcome.  A slab with colours
``(n, m)`` and height ``h`` heralds ``(|nn> + |mm>)/sqrt 2`` with probability
``2 h``.  An unpaired slab in the first column means the conversion failed.

Two charts are used:

* deterministic (``alpha_0 <= 1/2``): the first column is filled from the
  first ``M`` initial columns up to height 1/2; the rest of column ``M-1``
  and all later columns are stacked in the second column;
* probabilistic (``alpha_0 > 1/2``): column 0 alone forms the first column
  and everything else the second, leaving an unpaired slab of height
  ``2 alpha_0 - 1``.

All Kraus operators are diagonal in Alice's Fock basis.  Outcome ``(n, m)``
with slab height ``h`` has entries ``sqrt(h / alpha_k)`` at ``k = n, m``, so
``M |psi> = sqrt(2 h) |Bell_nm>`` holds exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .outcomes import Bell, DomainError, Fail, OutcomeSet, TruncationError
from .spectrum import SchmidtSpectrum, _check_lambda, auto_truncation, tmsv_spectrum

__all__ = [
    "ChartSegments",
    "build_chart",
    "chart_from_spectrum",
    "qubit_outcomes",
    "outcomes_from_chart",
    "kraus_for_outcome",
    "completeness_check",
    "DETERMINISTIC",
    "PROBABILISTIC",
]

DETERMINISTIC = "deterministic"
PROBABILISTIC = "probabilistic"

_REGIME_TOL = 1e-12
_ZERO_WIDTH = 1e-14
_KRAUS_SLACK = 1e-9


@dataclass(frozen=True)
class ChartSegments:
    """Slabs of a transformed two-column chart.

    ``lows[i]``/``highs[i]`` bound slab ``i`` and ``heights[i]`` is its exact
    height (taken from the coefficient itself when a slab covers a whole
    colour, so tiny slabs are not lost to cancellation).  ``second[i]`` is
    ``None`` for the unpaired failure slab.  ``unresolved`` is the height of
    first-column area that pairs with colours beyond the truncation.
    """

    regime: str
    lows: np.ndarray
    highs: np.ndarray
    heights: np.ndarray
    first: tuple
    second: tuple
    unresolved: float
    spectrum: SchmidtSpectrum

    def __len__(self):
        return len(self.first)

    @property
    def boundaries(self):
        return np.unique(np.concatenate([[0.0], self.lows, self.highs]))

    @property
    def fail_height(self):
        for h, c in zip(self.heights, self.second):
            if c is None:
                return float(h)
        return 0.0

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["boundary_low", "boundary", "colour_left", "colour_right"])
        for lo, hi, a, b in zip(self.lows, self.highs, self.first, self.second):
            w.writerow([repr(float(lo)), repr(float(hi)), a, "" if b is None else b])
        return buf.getvalue()


def _overlay(col1, col2):
    """Intersect two stacked columns of ``(lo, hi, colour, height)`` patches.

    ``height`` is the exact area of a whole colour, or ``None`` for a patch
    cut from a colour.
    """
    out = []
    i = j = 0
    while i < len(col1) and j < len(col2):
        a_lo, a_hi, a_c, a_h = col1[i]
        b_lo, b_hi, b_c, b_h = col2[j]
        lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
        if a_h is not None and lo == a_lo and hi == a_hi:
            h, whole = a_h, True
        elif b_h is not None and lo == b_lo and hi == b_hi:
            h, whole = b_h, True
        else:
            h, whole = hi - lo, False
        # Whole-colour patches keep their exact height; partial ones are
        # dropped when their boundaries coincide.
        if h > (0.0 if whole else _ZERO_WIDTH):
            out.append((lo, hi, h, a_c, b_c))
        if a_hi < b_hi:
            i += 1
        elif b_hi < a_hi:
            j += 1
        else:
            i += 1
            j += 1
    return out


def chart_from_spectrum(spec):
    """Transformed chart for an arbitrary descending spectrum."""
    a = spec.coeffs
    alpha0 = float(a[0])
    fail = None
    if alpha0 <= 0.5 + _REGIME_TOL:
        regime = DETERMINISTIC
        s = np.cumsum(a)
        hit = np.nonzero(s >= 0.5 - _ZERO_WIDTH)[0]
        if hit.size == 0:
            raise TruncationError("stored coefficients do not reach 1/2", a.size + 1)
        k = int(hit[0])  # last colour of the first column
        below = float(s[k] - a[k])
        col1 = [(float(s[j] - a[j]), float(s[j]), j, float(a[j])) for j in range(k)]
        col1.append((below, 0.5, k, None))
        col2 = [(0.0, float(s[k] - 0.5), k, None)]
        col2 += [(float(s[j - 1] - 0.5), float(s[j] - 0.5), j, float(a[j])) for j in range(k + 1, a.size)]
        top = col2[-1][1]
        unresolved = 0.5 - top
    else:
        regime = PROBABILISTIC
        col1 = [(0.0, alpha0, 0, alpha0)]
        s2 = np.cumsum(a[1:])
        col2 = [(float(s2[j] - a[j + 1]), float(s2[j]), j + 1, float(a[j + 1])) for j in range(a.size - 1)]
        top = col2[-1][1] if col2 else 0.0
        rest = 1.0 - alpha0
        unresolved = rest - top
        fail = (rest, alpha0, alpha0 - rest)

    slabs = _overlay(col1, col2)
    if fail is not None and fail[2] > _ZERO_WIDTH:
        slabs.append((fail[0], fail[1], fail[2], 0, None))
    lows, highs, heights, first, second = zip(*slabs) if slabs else ((), (), (), (), ())
    return ChartSegments(
        regime,
        np.array(lows, dtype=float),
        np.array(highs, dtype=float),
        np.array(heights, dtype=float),
        tuple(first),
        tuple(second),
        float(max(unresolved, 0.0)),
        spec,
    )


def build_chart(lam, n=None, tol=None):
    """Chart for the TMSV with squeezing ``lam`` truncated to ``n`` levels.

    If ``tol`` is given, a truncation whose tail mass is not below ``tol``
    raises :class:`TruncationError` carrying the required ``n``.
    """
    lam = _check_lambda(lam)
    spec = tmsv_spectrum(lam, n)
    if tol is not None and spec.tail_mass >= tol:
        raise TruncationError(f"tail mass {spec.tail_mass:.3g} >= {tol:g}", auto_truncation(lam, tol))
    try:
        return chart_from_spectrum(spec)
    except TruncationError:
        raise TruncationError("truncation too small for the deterministic chart",
                              auto_truncation(lam, 0.5)) from None


def outcomes_from_chart(chart):
    """Outcome set (labels, probabilities, Kraus diagonals) of a chart."""
    alpha = chart.spectrum.coeffs
    dim = alpha.size
    labels, probs, rows = [], [], []
    for h, c1, c2 in zip(chart.heights, chart.first, chart.second):
        diag = np.zeros(dim)
        if c2 is None:
            labels.append(Fail())
            probs.append(h)
            diag[0] = math.sqrt(h / alpha[0])
        else:
            labels.append(Bell(c1, c2))
            probs.append(2.0 * h)
            for c in (c1, c2):
                # whole-colour slabs give exactly h == alpha
                diag[c] = 1.0 if h == alpha[c] else math.sqrt(h / alpha[c])
        if diag.max() > 1.0 + _KRAUS_SLACK:
            raise DomainError(f"non-physical Kraus entry {diag.max()} for {labels[-1]}")
        rows.append(np.minimum(diag, 1.0))
    kraus = np.array(rows) if rows else np.zeros((0, dim))
    return OutcomeSet(labels, probs, kraus, 2.0 * chart.spectrum.tail_mass,
                      meta={"scheme": "qubit", "regime": chart.regime, "lam": chart.spectrum.lam})


def qubit_outcomes(lam, n=None, tol=None):
    """Optimal TMSV -> qubit-pair outcomes at truncation ``n``.

    The outcomes beyond the truncation are not enumerated; their total
    probability ``2 lam**(2n)`` is reported as ``tail_mass``.
    """
    return outcomes_from_chart(build_chart(lam, n, tol))


def kraus_for_outcome(lam, label, probability, dim):
    """Closed-form Kraus diagonal for a TMSV outcome.

    ``Bell(n, m)`` has entries ``sqrt(P / (2 (1 - lam^2))) lam^-k`` at
    ``k = n, m``; ``Fail`` has ``sqrt(P / (1 - lam^2))`` at ``k = 0``.  The
    product is formed in log space so large ``k`` at small ``lam`` does not
    overflow.
    """
    lam = _check_lambda(lam)
    diag = np.zeros(dim)
    if probability <= 0:
        return diag
    log_norm = math.log(probability) - math.log1p(-lam * lam)
    if isinstance(label, Fail):
        diag[0] = math.exp(0.5 * log_norm)
    elif isinstance(label, Bell):
        if lam == 0.0:
            raise DomainError("vacuum admits no Bell outcome")
        for k in (label.n, label.m):
            diag[k] = math.exp(0.5 * (log_norm - math.log(2.0)) - k * math.log(lam))
    else:
        raise DomainError(f"not a qubit-scheme label: {label}")
    if diag.max() > 1.0 + _KRAUS_SLACK:
        raise DomainError(f"non-physical Kraus entry {diag.max():.6g} for {label}")
    return np.minimum(diag, 1.0)


def completeness_check(outcomes, k_max=None):
    """Max deviation of ``sum_i M_i^dag M_i`` from identity on levels ``<= k_max``."""
    dim = outcomes.dim
    if k_max is None:
        k_max = min(10, dim - 1)
    k_max = min(k_max, dim - 1)
    return float(np.max(np.abs(outcomes.povm_deficit()[: k_max + 1])))
