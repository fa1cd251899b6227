# %% [markdown]
# # Outcomes and measurement operators from the column chart
#
# Each slab of the rearranged two-column chart is one outcome.  A slab with
# colours `(n, m)` heralds `(|nn> + |mm>)/sqrt 2`.

# %%
import numpy as np

from cvdv import census, hardy, mcsim

chart = hardy.build_chart(0.8)
print("regime:", chart.regime)
print("first boundaries:", np.round(chart.boundaries[:8], 4))

out = hardy.qubit_outcomes(0.8)
for lab, p in zip(out.labels[:8], out.probabilities[:8]):
    print(f"{lab!s:10} {p:.4f}")
print("unenumerated mass:", out.tail_mass)

# %% [markdown]
# Every Kraus operator is diagonal in Alice's Fock basis and projects the
# squeezed state exactly onto its target.

# %%
state = mcsim.tmsv_state(0.8, out.dim)
worst = 0.0
for lab, k in zip(out.labels, out.kraus):
    post, _ = mcsim.apply_kraus(state, k)
    worst = max(worst, 1 - mcsim.fidelity(post, lab))
print(f"worst infidelity over {len(out)} outcomes: {worst:.1e}")
print(f"completeness deviation: {hardy.completeness_check(out, out.dim - 1):.1e}")

# %% [markdown]
# Below threshold a failure slab appears, and the number of outcomes grows
# only linearly with the truncation.

# %%
weak = hardy.qubit_outcomes(0.5)
print("lam=0.5:", [(str(l), round(float(p), 5)) for l, p in zip(weak.labels[:4], weak.probabilities[:4])])
print(" N  nielsen  bvn   areas")
for n in (4, 8, 12, 16, 20):
    print(f"{n:2d}  {census.povm_count('nielsen', n):7d}  {census.bvn_count_formula(n):5.1f}  "
          f"{census.hardy_count_observed(0.8, n):3d}")
