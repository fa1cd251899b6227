# %% [markdown]
# # When does a squeezed state become one Bell pair for sure?
#
# A two-mode squeezed vacuum with `lam = tanh(r)` has the geometric Schmidt
# spectrum `(1 - lam^2) lam^(2n)`.  Turning it into a maximally entangled
# qubit pair by local operations succeeds with certainty exactly when its
# spectrum is majorized by `(1/2, 1/2)`.

# %%
import numpy as np

from cvdv import census, spectrum, transform

qubit = transform.max_entangled(2)
for lam in (0.5, 0.7, spectrum.THRESHOLD_LAMBDA, 0.8):
    s = spectrum.tmsv_spectrum(lam)
    print(f"lam={lam:.4f}  dB={spectrum.lambda_to_db(lam):6.3f}  "
          f"deterministic={transform.majorizes(s, qubit)!s:5}  P_max={transform.vidal_pmax(s, qubit):.4f}")

# %% [markdown]
# The switch sits at `lam = 1/sqrt(2)`, where the state carries exactly two
# ebits.

# %%
s, err = spectrum.entanglement_entropy(spectrum.tmsv_spectrum(spectrum.THRESHOLD_LAMBDA))
print(f"threshold squeezing {spectrum.lambda_to_db(spectrum.THRESHOLD_LAMBDA):.4f} dB, entropy {s:.10f} (+{err:.1e})")

# %% [markdown]
# Below the threshold the best probability is `2 lam^2`.  Post-selecting
# single clicks on two copies does about half as well at weak squeezing.

# %%
print(" dB     p_max     spdc     ratio")
for db in np.arange(0.5, 10.1, 1.5):
    lam = spectrum.db_to_lambda(db)
    p, q = transform.pmax_qubit(lam), census.spdc_rate(lam)
    print(f"{db:4.1f}  {p:.5f}  {q:.5f}  {q / p:.3f}")
