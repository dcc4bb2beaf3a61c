"""
At zero temperature the intraband conductivity is a Fermi-surface
integral.  The leading small-lam term evaluated on a k-grid converges to
it as the grid is refined.
"""
# %%
import math

from nesskubo import (PeriodicProblem, band_structure, conductivity_bloch_leading,
                      fermi_surface_conductivity)

lam = 0.1
for period, values, mu in (((2,), [1.0, -1.0], 1.8), ((3,), [0.5, 0.0, -0.5], 0.3)):
    exact = fermi_surface_conductivity(band_structure(PeriodicProblem(period, values, (64,))), mu, lam)
    print(f"\ncell {values}, mu={mu}: Fermi surface sigma = {exact:.10f}")
    for m in (64, 256, 1024, 4096):
        bands = band_structure(PeriodicProblem(period, values, (m,)))
        lead = conductivity_bloch_leading(bands, math.inf, mu, lam)
        print(f"  M={m:5d}  grid leading term = {lead:.10f}  diff = {lead - exact:.2e}")
