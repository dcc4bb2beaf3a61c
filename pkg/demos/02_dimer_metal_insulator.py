"""
Two-site periodic potential (+1, -1): a gap opens around zero energy.
With the chemical potential inside a band the conductivity grows like
1/lam; inside the gap it stays bounded as the dissipation vanishes.
"""
# %%
import numpy as np

from nesskubo import PeriodicProblem, band_structure, conductivity_bloch_parts, gap_check

bands = band_structure(PeriodicProblem((2,), [1.0, -1.0], (2048,)))
print("band edges:", np.round(bands.energies.min(axis=0), 4), np.round(bands.energies.max(axis=0), 4))

# %%
for mu in (1.8, 0.0):
    print(f"\nmu = {mu} ({gap_check(bands, mu).kind})")
    for lam in (0.4, 0.2, 0.1, 0.05, 0.025):
        parts = conductivity_bloch_parts(bands, 20.0, mu, lam)
        print(f"  lam={lam:<6} sigma={parts.total:.6e}  lam*sigma={lam * parts.total:.6e}"
              f"  interband={parts.off_diagonal:.3e}")
