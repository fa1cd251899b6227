"""Binary-search measurement trees realising a Fock-diagonal POVM.

A many-outcome POVM ``{E_i}`` is implemented as a sequence of two-outcome
measurements.  Every node covers a contiguous run ``S`` of the outcomes
(sorted by descending probability) and splits it into ``S0``/``S1``.  With
``G_S = sum_{i in S} E_i^dag E_i`` (a diagonal), the node applies

    B0 = sqrt(G_S0 / G_S),    B1 = sqrt(G_S1 / G_S)

entrywise.  Then ``B0^dag B0 + B1^dag B1 = 1``, the branch probabilities are
``P(S0)/P(S)`` and ``P(S1)/P(S)``, and the product of the operators along
the path to a leaf telescopes to that outcome's own Kraus operator.

Two split rules are provided:

* ``oopr``: one outcome per round, ``S0 = {first outcome of S}``;
* ``near_even``: ``S0`` is the longest prefix whose probability does not
  exceed half of ``P(S)`` (at least one outcome).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .outcomes import DomainError, OutcomeSet, Residual
from .spectrum import geometric_tail_entropy

__all__ = [
    "Node",
    "MeasurementTree",
    "TreeStats",
    "build_oopr_tree",
    "build_near_even_tree",
    "build_tree",
    "tree_stats",
    "trees_identical",
    "near_even_split",
    "OOPR",
    "NEAR_EVEN",
]

OOPR = "oopr"
NEAR_EVEN = "near_even"

_HALF_SLACK = 1e-12
_COMPLETE_TOL = 1e-14


@dataclass(frozen=True)
class Node:
    """One node; ``lo:hi`` is the run of outcome indices it covers."""

    lo: int
    hi: int
    depth: int
    probability: float
    b0: np.ndarray | None = None
    b1: np.ndarray | None = None
    children: tuple[int, int] | None = None

    @property
    def is_leaf(self):
        return self.children is None

    @property
    def members(self):
        return range(self.lo, self.hi)


@dataclass(frozen=True)
class MeasurementTree:
    """Binary tree over ``labels``; node 0 is the root.

    ``labels``/``probabilities``/``kraus`` are the outcome set the tree was
    built from, followed by a :class:`Residual` outcome when the set does not
    resolve the identity on the truncated space.  ``n_outcomes`` counts the
    enumerated outcomes only.
    """

    nodes: tuple
    labels: tuple
    probabilities: np.ndarray
    kraus: np.ndarray
    n_outcomes: int
    tail_mass: float
    variant: str

    @property
    def root(self):
        return self.nodes[0]

    @property
    def dim(self):
        return self.kraus.shape[1]

    def internal_nodes(self):
        return [nd for nd in self.nodes if not nd.is_leaf]

    def leaves(self):
        """Map outcome index -> leaf node index."""
        return {nd.lo: i for i, nd in enumerate(self.nodes) if nd.is_leaf}

    def leaf_depths(self):
        depth = np.zeros(len(self.labels), dtype=int)
        for nd in self.nodes:
            if nd.is_leaf:
                depth[nd.lo] = nd.depth
        return depth

    def paths(self):
        """Branch bits from the root to every leaf, keyed by outcome index."""
        out = {}
        stack = [(0, ())]
        while stack:
            i, bits = stack.pop()
            nd = self.nodes[i]
            if nd.is_leaf:
                out[nd.lo] = bits
            else:
                stack.append((nd.children[0], bits + (0,)))
                stack.append((nd.children[1], bits + (1,)))
        return out

    def partitions(self):
        """Node structure as nested ``(lo, hi)`` splits, for comparisons."""
        return [(nd.lo, nd.hi, None if nd.is_leaf else self.nodes[nd.children[0]].hi) for nd in self.nodes]

    def path_kraus(self, index):
        """Product of the branch operators on the way to outcome ``index``."""
        prod = np.ones(self.dim)
        i = 0
        while not self.nodes[i].is_leaf:
            nd = self.nodes[i]
            c0, c1 = nd.children
            if index < self.nodes[c0].hi:
                prod *= nd.b0
                i = c0
            else:
                prod *= nd.b1
                i = c1
        return prod

    def to_dot(self, precision=4):
        lines = [f'digraph "{self.variant}" {{', "  node [fontname=Helvetica];"]
        for i, nd in enumerate(self.nodes):
            if nd.is_leaf:
                lab = self.labels[nd.lo]
                lines.append(f'  n{i} [shape=box, label="{lab}\\nP={nd.probability:.{precision}g}"];')
            else:
                lines.append(f'  n{i} [shape=circle, label="{nd.probability:.{precision}g}"];')
        for i, nd in enumerate(self.nodes):
            if nd.is_leaf:
                continue
            for bit, c in enumerate(nd.children):
                p = self.nodes[c].probability
                lines.append(f'  n{i} -> n{c} [label="B{bit}: {p:.{precision}g}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self, **kwargs):
        nodes = []
        for nd in self.nodes:
            entry = {
                "members": [str(self.labels[k]) for k in nd.members],
                "probability": nd.probability,
                "depth": nd.depth,
            }
            if nd.is_leaf:
                entry["outcome"] = str(self.labels[nd.lo])
            else:
                entry["children"] = list(nd.children)
                entry["b0"] = nd.b0.tolist()
                entry["b1"] = nd.b1.tolist()
            nodes.append(entry)
        return json.dumps({"variant": self.variant, "tail_mass": self.tail_mass, "nodes": nodes}, **kwargs)


def near_even_split(probs):
    """Number of leading outcomes sent to ``B0``.

    The largest ``Y`` whose prefix sum is at most half the total; if even the
    first outcome exceeds half, ``Y = 1``.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.size < 2:
        raise DomainError("a split needs at least two outcomes")
    half = 0.5 * probs.sum()
    prefix = np.cumsum(probs[:-1])
    y = int(np.count_nonzero(prefix <= half * (1.0 + _HALF_SLACK)))
    return max(y, 1)


def _completed(outcomes):
    labels = list(outcomes.labels)
    probs = list(outcomes.probabilities)
    kraus = outcomes.kraus
    deficit = outcomes.povm_deficit()
    if np.max(deficit) > _COMPLETE_TOL:
        labels.append(Residual())
        probs.append(outcomes.tail_mass)
        # levels already resolved to rounding keep a zero residual entry
        deficit = np.where(deficit > _COMPLETE_TOL, deficit, 0.0)
        kraus = np.vstack([kraus, np.sqrt(np.minimum(deficit, 1.0))])
    return labels, np.array(probs), kraus


def build_tree(outcomes, variant=NEAR_EVEN):
    if len(outcomes) == 0:
        raise DomainError("empty outcome set")
    if variant not in (OOPR, NEAR_EVEN):
        raise DomainError(f"unknown tree variant {variant!r}")
    labels, probs, kraus = _completed(outcomes)
    k2 = kraus**2
    nodes = [None]
    stack = [(0, 0, len(labels), 0)]
    while stack:
        slot, lo, hi, depth = stack.pop()
        p = float(probs[lo:hi].sum())
        if hi - lo == 1:
            nodes[slot] = Node(lo, hi, depth, p)
            continue
        y = 1 if variant == OOPR else near_even_split(probs[lo:hi])
        mid = lo + y
        g0 = k2[lo:mid].sum(axis=0)
        g1 = k2[mid:hi].sum(axis=0)
        tot = g0 + g1
        live = tot > 0
        b0 = np.ones_like(tot)
        b1 = np.zeros_like(tot)
        b0[live] = np.sqrt(g0[live] / tot[live])
        b1[live] = np.sqrt(g1[live] / tot[live])
        c0, c1 = len(nodes), len(nodes) + 1
        nodes.extend([None, None])
        nodes[slot] = Node(lo, hi, depth, p, b0, b1, (c0, c1))
        stack.append((c1, mid, hi, depth + 1))
        stack.append((c0, lo, mid, depth + 1))
    for nd in nodes:
        if nd.b0 is not None:
            nd.b0.flags.writeable = False
            nd.b1.flags.writeable = False
    probs.flags.writeable = False
    return MeasurementTree(tuple(nodes), tuple(labels), probs, kraus, len(outcomes),
                           outcomes.tail_mass, variant)


def build_oopr_tree(outcomes):
    """Tree that isolates one outcome per round, most probable first."""
    return build_tree(outcomes, OOPR)


def build_near_even_tree(outcomes):
    """Tree that splits every node into two near-equiprobable groups."""
    return build_tree(outcomes, NEAR_EVEN)


def trees_identical(a, b):
    return a.labels == b.labels and a.partitions() == b.partitions()


@dataclass(frozen=True)
class TreeStats:
    expected_rounds: float
    shannon_bound: float
    efficiency: float
    yield_: float
    rounds_error: float
    entropy_error: float

    @property
    def efficiency_bound(self):
        return self.shannon_bound / self.yield_


def tree_stats(tree, yield_s):
    """Mean rounds, Shannon bound and rounds per ebit for ``tree``.

    ``yield_s`` is the mean entanglement per conversion (``P_max`` for the
    qubit scheme, ``S_avg`` for the qudit scheme).  The error fields
    estimate what the outcomes beyond the truncation would add, modelling
    them as a geometric continuation of the last two enumerated outcomes.
    """
    if not yield_s > 0:
        raise DomainError(f"yield must be positive, got {yield_s}")
    k = tree.n_outcomes
    p = np.asarray(tree.probabilities[:k])
    depth = tree.leaf_depths()[:k]
    rounds = float(math.fsum(p * depth))
    nz = p[p > 0]
    entropy = float(math.fsum(-nz * np.log2(nz)))

    tail = tree.tail_mass
    if tail > 0 and k >= 2 and p[-2] > 0:
        ratio = min(p[-1] / p[-2], 1.0 - 1e-6)
    else:
        ratio = 0.0
    rounds_err = float(tail * (depth.max(initial=0) + 1.0 / (1.0 - ratio) + 1.0))
    entropy_err = float(geometric_tail_entropy(tail * (1.0 - ratio), ratio)) if tail > 0 else 0.0
    return TreeStats(rounds, entropy, rounds / yield_s, float(yield_s), rounds_err, entropy_err)
