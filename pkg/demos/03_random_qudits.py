# %% [markdown]
# # Keeping all the entanglement: random-dimension qudit pairs
#
# Cutting the untouched chart at every column height gives a maximally
# entangled pair of random dimension `d` with probability
# `d x^(d-1) (1-x)^2`, `x = lam^2`.

# %%
from cvdv import qudit, spectrum, transform

out = qudit.qudit_outcomes(0.5)
print([(str(l), round(float(p), 6)) for l, p in zip(out.labels[:4], out.probabilities[:4])])

# %% [markdown]
# The mean entanglement tracks the input entropy, and the difference
# saturates at Euler's constant over `ln 2`.

# %%
print("   lam     S_tmsv     S_avg   qubit P_max    gap")
for lam in (0.3, 0.6, 0.9, 0.99, 0.999):
    s, avg = spectrum.tmsv_entropy(lam), qudit.average_entanglement(lam)
    print(f"{lam:6.3f}  {s:9.5f}  {avg:8.5f}  {transform.pmax_qubit(lam):11.5f}  {s - avg:.6f}")
print(f"limit {qudit.GAP_LIMIT:.6f}")
