"""Monte Carlo simulation of binary measurement trees on a truncated TMSV.

Every operator here is diagonal in Alice's Fock basis, so the joint state
stays Schmidt-diagonal and is carried as the amplitude vector ``c_n`` of
``sum_n c_n |n>_A |n>_B``.

Two samplers are provided.  :func:`run_tree` walks one trajectory and
updates the state after every binary measurement.  :func:`simulate` draws
many trajectories at once.  Because the post-measurement state depends
only on the branch history, the branch probabilities of each node are
computed once by propagating the state through the tree, and whole
trajectories are then sampled in bulk.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import binomtest

from .outcomes import DomainError, target_amplitudes
from .spectrum import _check_lambda

__all__ = [
    "JointState",
    "tmsv_state",
    "apply_kraus",
    "run_tree",
    "RunResult",
    "simulate",
    "BatchResult",
    "empirical_stats",
    "Summary",
    "fidelity",
    "sqr_angles",
    "sqr_unitary",
    "sqr_equivalence",
]

_COLLAPSE = 1e-300


@dataclass(frozen=True)
class JointState:
    coeffs: np.ndarray

    @property
    def norm_sq(self):
        return float(np.dot(self.coeffs, self.coeffs))

    @property
    def dim(self):
        return self.coeffs.size

    def normalized(self):
        return JointState(self.coeffs / math.sqrt(self.norm_sq))


def tmsv_state(lam, dim):
    """TMSV amplitudes on ``dim`` Fock levels, renormalized."""
    lam = _check_lambda(lam)
    c = lam ** np.arange(dim, dtype=float)
    return JointState(c / np.linalg.norm(c))


def apply_kraus(state, kraus):
    """Apply a Fock-diagonal Kraus operator.

    Returns the unnormalized post-measurement state and the outcome
    probability ``|M c|^2 / |c|^2``.
    """
    kraus = np.asarray(kraus, dtype=float)
    if kraus.shape != state.coeffs.shape:
        raise DomainError(f"Kraus diagonal of length {kraus.size} on a {state.dim}-level state")
    norm_sq = state.norm_sq
    if norm_sq < _COLLAPSE:
        raise DomainError("state norm collapsed")
    out = JointState(kraus * state.coeffs)
    return out, out.norm_sq / norm_sq


def fidelity(state, label):
    """``|<target|psi>|^2`` for the state heralded by ``label`` (None if untargeted)."""
    target = target_amplitudes(label, state.dim)
    if target is None:
        return None
    psi = state.coeffs / math.sqrt(state.norm_sq)
    return float(np.dot(target, psi) ** 2)


@dataclass(frozen=True)
class RunResult:
    index: int
    label: object
    rounds: int
    path: tuple
    state: JointState
    seed: int | None = None


def run_tree(state, tree, rng_seed):
    """Sample one trajectory through ``tree``; deterministic for a given seed."""
    rng = np.random.default_rng(rng_seed)
    node = 0
    path = []
    while not tree.nodes[node].is_leaf:
        nd = tree.nodes[node]
        s0, p0 = apply_kraus(state, nd.b0)
        s1, p1 = apply_kraus(state, nd.b1)
        if p0 + p1 < _COLLAPSE:
            raise DomainError("state norm collapsed inside the tree")
        if rng.random() < p0 / (p0 + p1):
            state, node = s0, nd.children[0]
            path.append(0)
        else:
            state, node = s1, nd.children[1]
            path.append(1)
        state = state.normalized()
    leaf = tree.nodes[node]
    return RunResult(leaf.lo, tree.labels[leaf.lo], len(path), tuple(path), state, rng_seed)


def _branch_table(tree, state):
    """Conditional ``P(B0)`` per node and the normalized state at every leaf."""
    n = len(tree.nodes)
    p0 = np.zeros(n)
    leaf_state = {}
    stack = [(0, state.normalized())]
    while stack:
        i, psi = stack.pop()
        nd = tree.nodes[i]
        if nd.is_leaf:
            leaf_state[nd.lo] = psi
            continue
        s0, q0 = apply_kraus(psi, nd.b0)
        s1, q1 = apply_kraus(psi, nd.b1)
        if q0 + q1 < _COLLAPSE:
            raise DomainError("state norm collapsed inside the tree")
        p0[i] = q0 / (q0 + q1)
        if q0 > 0:
            stack.append((nd.children[0], s0.normalized()))
        if q1 > 0:
            stack.append((nd.children[1], s1.normalized()))
    return p0, leaf_state


def _sample_chunk(seed_seq, count, p0, child0, child1, is_leaf):
    rng = np.random.default_rng(seed_seq)
    cur = np.zeros(count, dtype=np.int64)
    rounds = np.zeros(count, dtype=np.int64)
    active = np.nonzero(~is_leaf[cur])[0]
    while active.size:
        at = cur[active]
        go0 = rng.random(active.size) < p0[at]
        cur[active] = np.where(go0, child0[at], child1[at])
        rounds[active] += 1
        active = active[~is_leaf[cur[active]]]
    return cur, rounds


@dataclass(frozen=True)
class BatchResult:
    """Bulk simulation output; ``outcomes[i]`` indexes ``tree.labels``."""

    tree: object
    outcomes: np.ndarray
    rounds: np.ndarray
    leaf_fidelity: dict
    seed: int

    def __len__(self):
        return self.outcomes.size

    def transcripts(self):
        """Yield one JSON line per run."""
        paths = self.tree.paths()
        for i, (k, r) in enumerate(zip(self.outcomes.tolist(), self.rounds.tolist())):
            yield json.dumps(
                {"seed": self.seed, "run": i, "path": list(paths[k]), "outcome": str(self.tree.labels[k]), "rounds": r}
            )


def simulate(tree, state, n_runs, seed, chunk_size=1 << 16, workers=1):
    """Draw ``n_runs`` trajectories of ``tree`` applied to ``state``.

    Runs are cut into fixed-size chunks, each with its own generator spawned
    from ``seed``, so results do not depend on ``workers``.
    """
    if n_runs < 1:
        raise DomainError("need at least one run")
    p0, leaf_state = _branch_table(tree, state)
    nodes = tree.nodes
    is_leaf = np.array([nd.is_leaf for nd in nodes])
    child0 = np.array([nd.children[0] if nd.children else i for i, nd in enumerate(nodes)])
    child1 = np.array([nd.children[1] if nd.children else i for i, nd in enumerate(nodes)])
    leaf_outcome = np.array([nd.lo for nd in nodes])

    sizes = [chunk_size] * (n_runs // chunk_size)
    if n_runs % chunk_size:
        sizes.append(n_runs % chunk_size)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    job = lambda args: _sample_chunk(args[0], args[1], p0, child0, child1, is_leaf)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, zip(seqs, sizes)))
    else:
        parts = [job(a) for a in zip(seqs, sizes)]
    leaves = np.concatenate([p[0] for p in parts])
    rounds = np.concatenate([p[1] for p in parts])
    fid = {k: fidelity(s, tree.labels[k]) for k, s in leaf_state.items()}
    return BatchResult(tree, leaf_outcome[leaves], rounds, fid, seed)


@dataclass(frozen=True)
class Summary:
    """Frequencies with Wilson intervals, mean rounds and post-state fidelity."""

    labels: tuple
    counts: np.ndarray
    frequencies: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    expected: np.ndarray
    mean_fidelity: tuple
    n_runs: int
    mean_rounds: float
    rounds_stderr: float

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["outcome", "count", "frequency", "ci_low", "ci_high", "expected", "mean_fidelity"])
        for row in zip(self.labels, self.counts, self.frequencies, self.ci_low, self.ci_high,
                       self.expected, self.mean_fidelity):
            lab, cnt, *vals, fid = row
            w.writerow([str(lab), int(cnt)] + [repr(float(v)) for v in vals] + ["" if fid is None else repr(fid)])
        w.writerow([])
        w.writerow(["n_runs", self.n_runs])
        w.writerow(["mean_rounds", repr(self.mean_rounds)])
        w.writerow(["rounds_stderr", repr(self.rounds_stderr)])
        return buf.getvalue()


def empirical_stats(runs, confidence=0.9973):
    """Summarize a :class:`BatchResult` or a list of :class:`RunResult`.

    The default confidence level is the 3-sigma two-sided coverage.
    """
    if isinstance(runs, BatchResult):
        tree = runs.tree
        outcomes, rounds = runs.outcomes, runs.rounds
        fid_of = lambda k: runs.leaf_fidelity.get(k)  # noqa: E731
        fids = None
    else:
        runs = list(runs)
        if not runs:
            raise DomainError("no runs to summarize")
        tree = None
        outcomes = np.array([r.index for r in runs])
        rounds = np.array([r.rounds for r in runs])
        fids = [fidelity(r.state, r.label) for r in runs]
    n = outcomes.size
    if n == 0:
        raise DomainError("no runs to summarize")

    if tree is not None:
        labels = tree.labels
        expected = np.asarray(tree.probabilities)
        idx = np.arange(len(labels))
    else:
        idx = np.unique(outcomes)
        lab_of = {r.index: r.label for r in runs}
        labels = tuple(lab_of[k] for k in idx)
        expected = np.full(idx.size, np.nan)
    counts = np.bincount(outcomes, minlength=int(idx.max()) + 1)[idx]
    lo = np.zeros(idx.size)
    hi = np.zeros(idx.size)
    for j, c in enumerate(counts):
        ci = binomtest(int(c), n).proportion_ci(confidence_level=confidence, method="wilson")
        lo[j], hi[j] = ci.low, ci.high
    if fids is None:
        mean_fid = tuple(fid_of(int(k)) if counts[j] else None for j, k in enumerate(idx))
    else:
        mean_fid = []
        for k in idx:
            vals = [f for f, o in zip(fids, outcomes) if o == k and f is not None]
            mean_fid.append(float(np.mean(vals)) if vals else None)
        mean_fid = tuple(mean_fid)
    mean_r = float(np.mean(rounds))
    se = float(np.std(rounds, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Summary(tuple(labels), counts, counts / n, lo, hi, expected, mean_fid, n, mean_r, se)


def sqr_angles(b0, b1=None):
    """Rotation angles ``phi_n = arccos(C_n)`` of the number-selective rotation.

    When the partner diagonal ``b1 = sqrt(1 - C^2)`` is known the angle is
    taken as ``atan2(b1, C)``, which is the same angle but keeps its
    precision where ``C`` rounds to 1.
    """
    c = np.asarray(b0, dtype=float)
    if np.any(c < -1e-15) or np.any(c > 1 + 1e-15):
        raise DomainError("SQR coefficients must lie in [0, 1]")
    c = np.clip(c, 0.0, 1.0)
    if b1 is None:
        return np.arccos(c)
    return np.arctan2(np.asarray(b1, dtype=float), c)


def sqr_unitary(angles):
    """``exp(-i sum_n phi_n sigma_y (x) |n><n|)`` on qubit (x) mode, qubit major.

    ``sigma_y = i|e><g| - i|g><e|`` with ``g`` = 0, ``e`` = 1.  The generator
    is a direct sum of 2x2 blocks on ``{|g,n>, |e,n>}``; each block is
    exponentiated on its own and the result scattered back.
    """
    phi = np.asarray(angles, dtype=float)
    d = phi.size
    sigma_y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    blocks = scipy.linalg.expm(-1.0j * phi[:, None, None] * sigma_y)
    u = np.zeros((2 * d, 2 * d), dtype=complex)
    n = np.arange(d)
    for a in range(2):
        for b in range(2):
            u[a * d + n, b * d + n] = blocks[:, a, b]
    return u


def sqr_equivalence(b0, b1=None):
    """Max deviation between the ancilla-induced Kraus pair and ``(B0, B1)``.

    The qubit starts in ``|g>``, the SQR gate acts, and the qubit is read out;
    ``<g|U|g>`` and ``<e|U|g>`` are the induced operators on the mode.
    ``b1`` defaults to ``sqrt(1 - b0^2)``.
    """
    u = sqr_unitary(sqr_angles(b0, b1))
    c = np.clip(np.asarray(b0, dtype=float), 0.0, 1.0)
    s = np.sqrt(1.0 - c**2) if b1 is None else np.asarray(b1, dtype=float)
    d = c.size
    dev_g = np.max(np.abs(u[:d, :d] - np.diag(c)))
    dev_e = np.max(np.abs(u[d:, :d] - np.diag(s)))
    return float(max(dev_g, dev_e))
