# %% [markdown]
# # Realising many outcomes with binary measurements
#
# Any Fock-diagonal POVM can be run as a sequence of two-outcome
# measurements.  Peeling off one outcome per round is simple; splitting each
# group into near-equal halves uses fewer rounds on average, and no tree can
# beat the Shannon entropy of the outcome distribution.

# %%
from cvdv import bintree, hardy, qudit, spectrum, transform

out = hardy.qubit_outcomes(0.8)
tree = bintree.build_near_even_tree(out)
left, right = (tree.nodes[c] for c in tree.root.children)
print("root B0 group:", [str(tree.labels[i]) for i in left.members], f"P={left.probability:.4f}")
print(tree.to_dot().splitlines()[3])

# %% [markdown]
# Rounds per ebit for both constructions against the entropy bound.

# %%
print("  dB   scheme   oopr    near-even  bound")
for db in (3.0, 5.5, 7.66, 10.0, 13.0):
    lam = spectrum.db_to_lambda(db)
    for scheme in ("qubit", "qudit"):
        if scheme == "qubit":
            outcomes, y = hardy.qubit_outcomes(lam), transform.pmax_qubit(lam)
        else:
            outcomes, y = qudit.qudit_outcomes(lam), qudit.average_entanglement(lam)
        s_o = bintree.tree_stats(bintree.build_oopr_tree(outcomes), y)
        s_n = bintree.tree_stats(bintree.build_near_even_tree(outcomes), y)
        print(f"{db:5.2f}  {scheme:6}  {s_o.efficiency:6.3f}  {s_n.efficiency:9.3f}  {s_n.efficiency_bound:6.3f}")

# %% [markdown]
# Below the threshold each outcome outweighs all later ones together, so the
# two constructions build the same chain.

# %%
for lam in (0.3, 0.5, 0.7):
    o = hardy.qubit_outcomes(lam)
    same = bintree.trees_identical(bintree.build_oopr_tree(o), bintree.build_near_even_tree(o))
    print(f"lam={lam}: identical={same}")
