"""
Driving the command-line front end from Python: a lam sweep for the
dimer crystal written as an INI configuration.
"""
# %%
import csv
import tempfile
from pathlib import Path

from nesskubo.cli import main

CONFIG = """\
[run]
format = csv

[potential]
kind = periodic
periods = 2
values = 1.0 -1.0

[thermo]
beta = 20
mu = 1.8
lambda = 0.1

[bloch]
k_points = 400

[sweep]
axis = lambda
command = bloch-conductivity
values = 0.4 0.2 0.1 0.05
"""

# %%
with tempfile.TemporaryDirectory() as tmp:
    cfg = Path(tmp) / "dimer.ini"
    cfg.write_text(CONFIG)
    out = Path(tmp) / "sigma.csv"
    status = main(["sweep", "--config", str(cfg), "--out", str(out)])
    print("exit status", status)
    for row in csv.DictReader(out.read_text().splitlines()):
        print(f"lam={float(row['sweep_value']):<5g} sigma={float(row['sigma']):.10f}"
              f"  leading={float(row['sigma_leading']):.10f}  phase={row['phase']}")
