"""
Free chain in a weak field: the steady current from a finite open box
compared with the closed-form band integral for a cosine dispersion.
"""
# %%
import math

from nesskubo import (LatticeSpec, PotentialSpec, ThermoParams, site_conductivity, solvable_conductivity,
                      solvable_current, steady_current)

# %%
# A box of 2N+1 sites, observed at the centre so boundary effects are small.
params = ThermoParams(beta=10.0, mu=0.0, lam=0.5, E=0.1)
for N in (25, 50, 100, 200):
    j = steady_current(LatticeSpec(1, N), PotentialSpec.zero(), params, (0,))
    print(f"N={N:4d}  j(centre) = {j:.12f}")

# %%
# The translation-invariant limit is a one-dimensional integral over the band.
print(f"closed form      = {solvable_current(params):.12f}")

# %%
# Linear response: the Kubo conductivity on a torus against the closed form.
torus = LatticeSpec(1, 200, "periodic")
for beta in (5.0, 20.0, math.inf):
    p = ThermoParams(beta, 0.0, 0.5)
    print(f"beta={beta:>5}  sigma(torus) = {site_conductivity(torus, PotentialSpec.zero(), p):.10f}"
          f"  closed form = {solvable_conductivity(p):.10f}")
