"""Outcome labels and outcome sets shared by the conversion schemes.

Every measurement operator in this package is diagonal in the Fock basis of
Alice's mode, so a Kraus operator is stored as its real, non-negative
diagonal (a 1-D numpy array).  An :class:`OutcomeSet` keeps the labels,
probabilities and Kraus diagonals of one POVM, sorted by descending
probability.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainError",
    "TruncationError",
    "Bell",
    "Fail",
    "Qudit",
    "Residual",
    "OutcomeSet",
    "label_from_str",
    "target_amplitudes",
]


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class TruncationError(DomainError):
    """The Fock truncation is too small for the requested construction."""

    def __init__(self, message, required_n):
        super().__init__(f"{message} (need N >= {required_n})")
        self.required_n = required_n


@dataclass(frozen=True)
class Fail:
    """Failed conversion; the pair collapses onto |00>."""

    def __str__(self):
        return "Fail"


@dataclass(frozen=True)
class Bell:
    """Equal superposition of |nn> and |mm>, stored with n < m."""

    n: int
    m: int

    def __post_init__(self):
        if self.n == self.m:
            raise DomainError("Bell(n, m) needs n != m")
        if self.n > self.m:
            lo, hi = self.m, self.n
            object.__setattr__(self, "n", lo)
            object.__setattr__(self, "m", hi)

    def __str__(self):
        return f"Bell({self.n},{self.m})"


@dataclass(frozen=True)
class Qudit:
    """Equal superposition of the first d paired Fock states."""

    d: int

    def __str__(self):
        return f"Qudit({self.d})"


@dataclass(frozen=True)
class Residual:
    """Catch-all for the POVM weight lost to Fock truncation."""

    def __str__(self):
        return "Residual"


def _tie_key(label):
    # Fail first, then Bell lexicographic, then Qudit ascending.
    if isinstance(label, Fail):
        return (0, 0, 0)
    if isinstance(label, Bell):
        return (1, label.n, label.m)
    if isinstance(label, Qudit):
        return (2, label.d, 0)
    return (3, 0, 0)


def label_from_str(text):
    text = text.strip()
    if text == "Fail":
        return Fail()
    if text == "Residual":
        return Residual()
    head, _, rest = text.partition("(")
    args = [int(a) for a in rest.rstrip(")").split(",")]
    if head == "Bell":
        return Bell(*args)
    if head == "Qudit":
        return Qudit(*args)
    raise ValueError(f"unknown outcome label {text!r}")


def target_amplitudes(label, dim):
    """Normalized Schmidt amplitudes of the state heralded by ``label``."""
    amp = np.zeros(dim)
    if isinstance(label, Fail):
        amp[0] = 1.0
    elif isinstance(label, Bell):
        amp[[label.n, label.m]] = np.sqrt(0.5)
    elif isinstance(label, Qudit):
        amp[: label.d] = 1.0 / np.sqrt(label.d)
    else:
        return None
    return amp


@dataclass(frozen=True)
class OutcomeSet:
    """Labeled conversion outcomes with probabilities and Kraus diagonals.

    Parameters
    ----------
    labels : tuple
        Outcome labels (:class:`Bell`, :class:`Fail`, :class:`Qudit`).
    probabilities : ndarray, shape (K,)
        Outcome probabilities on the untruncated input state.
    kraus : ndarray, shape (K, D)
        Row ``i`` is the Fock diagonal of outcome ``i``'s Kraus operator.
    tail_mass : float
        Total probability of outcomes that were not enumerated.

    On construction the outcomes are re-sorted by descending probability,
    ties broken by label.
    """

    labels: tuple
    probabilities: np.ndarray
    kraus: np.ndarray
    tail_mass: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=float)
        kraus = np.atleast_2d(np.asarray(self.kraus, dtype=float))
        labels = tuple(self.labels)
        if not (len(labels) == len(probs) == kraus.shape[0]):
            raise ValueError("labels, probabilities and kraus rows differ in length")
        order = sorted(range(len(labels)), key=lambda i: (-probs[i], _tie_key(labels[i])))
        probs = probs[order]
        kraus = kraus[order]
        probs.flags.writeable = False
        kraus.flags.writeable = False
        object.__setattr__(self, "labels", tuple(labels[i] for i in order))
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    def __len__(self):
        return len(self.labels)

    @property
    def dim(self):
        return self.kraus.shape[1]

    def index(self, label):
        return self.labels.index(label)

    def probability(self, label):
        return float(self.probabilities[self.index(label)])

    def povm_deficit(self):
        """Per-Fock-level ``1 - sum_i diag_i**2``."""
        return 1.0 - np.sum(self.kraus**2, axis=0)

    def to_json(self, **kwargs):
        rows = [
            {"label": str(lab), "probability": float(p), "kraus_diag": k.tolist()}
            for lab, p, k in zip(self.labels, self.probabilities, self.kraus)
        ]
        return json.dumps(rows, **kwargs)

    @classmethod
    def from_json(cls, text, tail_mass=None):
        rows = json.loads(text)
        labels = [label_from_str(r["label"]) for r in rows]
        probs = [r["probability"] for r in rows]
        kraus = [r["kraus_diag"] for r in rows]
        if tail_mass is None:
            tail_mass = max(0.0, 1.0 - float(np.sum(probs)))
        return cls(labels, probs, kraus, tail_mass)
