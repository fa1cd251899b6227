import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvdv import bintree, hardy, qudit
from cvdv.bintree import NEAR_EVEN, OOPR, build_tree, near_even_split, tree_stats
from cvdv.outcomes import Bell, DomainError, Fail, OutcomeSet, Qudit, Residual
from cvdv.spectrum import db_to_lambda, lambda_to_db
from cvdv.transform import pmax_qubit

from .conftest import SQRT_HALF


def outcomes_for(scheme, lam):
    return hardy.qubit_outcomes(lam) if scheme == "qubit" else qudit.qudit_outcomes(lam)


def test_single_outcome_is_a_leaf():
    tree = build_tree(hardy.qubit_outcomes(0.0))
    assert len(tree.nodes) == 1
    assert tree.root.is_leaf
    assert tree_stats(tree, 1.0).expected_rounds == 0.0


def test_threshold_oopr_depths():
    out = hardy.qubit_outcomes(SQRT_HALF)
    tree = bintree.build_oopr_tree(out)
    depth = tree.leaf_depths()
    for l in range(1, 20):
        assert out.labels[l - 1] == Bell(0, l)
        assert depth[l - 1] == l
    s = tree_stats(tree, pmax_qubit(SQRT_HALF))
    assert s.expected_rounds == pytest.approx(2.0, abs=1e-9)
    assert s.shannon_bound == pytest.approx(2.0, abs=1e-9)
    assert s.efficiency == pytest.approx(2.0, abs=1e-9)


def test_probabilistic_regime_is_a_chain():
    tree = bintree.build_oopr_tree(hardy.qubit_outcomes(0.5))
    assert list(tree.leaf_depths()[:10]) == list(range(1, 11))


def test_worked_example_splits():
    tree = bintree.build_near_even_tree(hardy.qubit_outcomes(0.8))
    left, right = (tree.nodes[c] for c in tree.root.children)
    assert [tree.labels[i] for i in left.members] == [Bell(0, 2), Bell(0, 3)]
    assert left.probability == pytest.approx(0.483, abs=1e-3)
    inner = tree.nodes[right.children[0]]
    assert [tree.labels[i] for i in inner.members] == [Bell(0, 1), Bell(1, 5)]


def test_two_equiprobable_outcomes():
    out = OutcomeSet([Qudit(1), Qudit(2)], [0.5, 0.5], [[SQRT_HALF], [SQRT_HALF]])
    tree = build_tree(out)
    assert len(tree.internal_nodes()) == 1
    s = tree_stats(tree, 1.0)
    assert s.expected_rounds == 1.0 == s.shannon_bound


def test_incomplete_povm_gets_residual_leaf():
    out = OutcomeSet([Bell(0, 1), Fail()], [0.5, 0.5], [[SQRT_HALF, SQRT_HALF], [SQRT_HALF, 0.0]])
    tree = build_tree(out)
    assert tree.labels[-1] == Residual()
    assert tree.probabilities[-1] == 0.0
    np.testing.assert_allclose(tree.kraus[-1], [0.0, SQRT_HALF], atol=1e-15)


@pytest.mark.parametrize(
    "probs, y",
    [([0.6, 0.4], 1), ([0.5, 0.25, 0.25], 1), ([0.25] * 4, 2), ([0.3, 0.2, 0.2, 0.2, 0.1], 2), ([0.9, 0.05, 0.05], 1)],
)
def test_near_even_split(probs, y):
    assert near_even_split(probs) == y


def test_near_even_split_needs_two():
    with pytest.raises(DomainError):
        near_even_split([1.0])


def test_bad_inputs():
    empty = OutcomeSet([], np.zeros(0), np.zeros((0, 3)))
    with pytest.raises(DomainError):
        build_tree(empty)
    with pytest.raises(DomainError):
        build_tree(hardy.qubit_outcomes(0.5), "huffman")
    with pytest.raises(DomainError):
        tree_stats(build_tree(hardy.qubit_outcomes(0.5)), 0.0)


def test_residual_leaf_on_short_truncation():
    tree = build_tree(hardy.qubit_outcomes(0.8, 12))
    assert tree.labels[-1] == Residual()
    assert tree.n_outcomes == len(tree.labels) - 1


case = st.tuples(st.sampled_from(["qubit", "qudit"]), st.sampled_from([OOPR, NEAR_EVEN]), st.floats(0.05, 0.93))


@given(case)
@settings(max_examples=40, deadline=None)
def test_node_completeness_and_path_composition(args):
    scheme, variant, lam = args
    tree = build_tree(outcomes_for(scheme, lam), variant)
    for nd in tree.internal_nodes():
        np.testing.assert_allclose(nd.b0**2 + nd.b1**2, 1.0, atol=1e-12)
        assert np.all((nd.b0 >= 0) & (nd.b0 <= 1) & (nd.b1 >= 0) & (nd.b1 <= 1))
        c0, c1 = (tree.nodes[c] for c in nd.children)
        assert (c0.lo, c1.hi, c0.hi) == (nd.lo, nd.hi, c1.lo)
    for k in range(tree.n_outcomes):
        np.testing.assert_allclose(tree.path_kraus(k), tree.kraus[k], atol=1e-10)


@given(case)
@settings(max_examples=40, deadline=None)
def test_branch_probabilities(args):
    scheme, variant, lam = args
    tree = build_tree(outcomes_for(scheme, lam), variant)
    for nd in tree.internal_nodes():
        c0, c1 = (tree.nodes[c] for c in nd.children)
        assert c0.probability + c1.probability == pytest.approx(nd.probability, abs=1e-14)


@pytest.mark.parametrize("scheme", ["qubit", "qudit"])
def test_shannon_bound_and_dominance(scheme):
    for db in np.linspace(0.25, 15, 60):
        out = outcomes_for(scheme, db_to_lambda(db))
        s_o = tree_stats(bintree.build_oopr_tree(out), 1.0)
        s_n = tree_stats(bintree.build_near_even_tree(out), 1.0)
        assert s_o.expected_rounds >= s_o.shannon_bound - 1e-9
        assert s_n.expected_rounds >= s_n.shannon_bound - 1e-9
        assert s_n.expected_rounds <= s_o.expected_rounds + 1e-9


def test_qubit_trees_coincide_below_threshold():
    for lam in np.linspace(0.05, SQRT_HALF - 1e-6, 40):
        out = hardy.qubit_outcomes(lam)
        assert bintree.trees_identical(bintree.build_oopr_tree(out), bintree.build_near_even_tree(out))
    out = hardy.qubit_outcomes(0.8)
    assert not bintree.trees_identical(bintree.build_oopr_tree(out), bintree.build_near_even_tree(out))


def test_qudit_trees_coincide_below_the_threshold_squeezing():
    # The root split changes where (1 - x)^2 (1 + 2x) = 1/2, i.e. x = 1/2,
    # which is lambda = 1/sqrt(2) (7.66 dB) rather than 8 dB.
    threshold_db = lambda_to_db(SQRT_HALF)
    for db in np.linspace(0.1, threshold_db - 0.01, 40):
        out = qudit.qudit_outcomes(db_to_lambda(db))
        assert bintree.trees_identical(bintree.build_oopr_tree(out), bintree.build_near_even_tree(out))
    for db in (threshold_db + 0.01, 7.8, 8.0):
        out = qudit.qudit_outcomes(db_to_lambda(db))
        assert not bintree.trees_identical(bintree.build_oopr_tree(out), bintree.build_near_even_tree(out))


def test_qudit_near_bound_around_5_5_db():
    # closest approach is about 1 % of H near 5.7 dB
    gaps = []
    for db in np.linspace(5.0, 6.0, 21):
        s = tree_stats(bintree.build_near_even_tree(qudit.qudit_outcomes(db_to_lambda(db))), 1.0)
        gaps.append((s.expected_rounds - s.shannon_bound) / s.shannon_bound)
    assert min(gaps) < 0.0105


@pytest.mark.xfail(strict=True, reason="closest approach is ~1% of H, not 1e-3")
def test_qudit_within_1e3_of_bound_at_5_5_db():
    best = min(
        (s := tree_stats(bintree.build_near_even_tree(qudit.qudit_outcomes(db_to_lambda(db))), 1.0)).expected_rounds
        - (1 + 1e-3) * s.shannon_bound
        for db in np.linspace(5.0, 6.0, 101)
    )
    assert best <= 0


def test_dominance_strict_at_08():
    out = hardy.qubit_outcomes(0.8)
    e_o = tree_stats(bintree.build_oopr_tree(out), pmax_qubit(0.8)).efficiency
    e_n = tree_stats(bintree.build_near_even_tree(out), pmax_qubit(0.8)).efficiency
    assert e_n < e_o


def test_stats_fields():
    tree = bintree.build_near_even_tree(qudit.qudit_outcomes(0.6))
    y = qudit.average_entanglement(0.6)
    s = tree_stats(tree, y)
    assert s.efficiency == pytest.approx(s.expected_rounds / y)
    assert s.efficiency_bound == pytest.approx(s.shannon_bound / y)
    assert 0 <= s.rounds_error < 1e-9
    assert 0 <= s.entropy_error < 1e-9


def test_rounds_match_explicit_sum():
    out = hardy.qubit_outcomes(0.75)
    tree = bintree.build_near_even_tree(out)
    depth = {tree.labels[k]: len(bits) for k, bits in tree.paths().items()}
    explicit = math.fsum(p * depth[lab] for lab, p in zip(out.labels, out.probabilities))
    assert tree_stats(tree, 1.0).expected_rounds == pytest.approx(explicit, rel=1e-14)


def test_dot_and_json_export():
    tree = bintree.build_near_even_tree(hardy.qubit_outcomes(0.8, 30))
    dot = tree.to_dot()
    assert dot.startswith('digraph "near_even" {') and dot.rstrip().endswith("}")
    assert 'label="Bell(0,2)\\nP=0.2949"' in dot
    assert dot.count("->") == 2 * len(tree.internal_nodes())
    data = json.loads(tree.to_json())
    assert data["variant"] == "near_even"
    root = data["nodes"][0]
    assert len(root["b0"]) == tree.dim
    assert data["nodes"][root["children"][0]]["probability"] == pytest.approx(0.483, abs=1e-3)
