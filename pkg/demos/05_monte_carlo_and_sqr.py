# %% [markdown]
# # Simulating the protocol and compiling it to a qubit ancilla
#
# Sampling trajectories through the near-even tree reproduces the outcome
# probabilities, and each heralded state is exactly the advertised target.

# %%
from cvdv import bintree, hardy, mcsim

out = hardy.qubit_outcomes(0.8)
tree = bintree.build_near_even_tree(out)
batch = mcsim.simulate(tree, mcsim.tmsv_state(0.8, out.dim), 200_000, seed=1)
summ = mcsim.empirical_stats(batch)
for k in range(5):
    print(f"{summ.labels[k]!s:10} freq={summ.frequencies[k]:.4f} "
          f"[{summ.ci_low[k]:.4f}, {summ.ci_high[k]:.4f}] expected={summ.expected[k]:.4f}")
print(f"mean rounds {summ.mean_rounds:.4f} +- {summ.rounds_stderr:.4f}, "
      f"analytic {bintree.tree_stats(tree, 1.0).expected_rounds:.4f}")
print(next(batch.transcripts()))

# %% [markdown]
# Each binary step is one photon-number-selective qubit rotation followed by
# reading the qubit: `|g>` applies `B0`, `|e>` applies `B1`.

# %%
worst = max(mcsim.sqr_equivalence(nd.b0, nd.b1) for nd in tree.internal_nodes())
print(f"{len(tree.internal_nodes())} nodes, worst deviation {worst:.1e}")
