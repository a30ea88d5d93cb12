"""Exit time of the baseline scenario under grid refinement.

Writes convergence.csv (n_cells, dt, t_star) and prints the Richardson
estimate.  ``--fine`` adds the n_cells=4096, dt=1e-6 reference run (~1 min).
"""

import argparse
from pathlib import Path

import numpy as np

from stefan_kinetic.oracle import richardson
from stefan_kinetic.results import write_csv
from stefan_kinetic.scenarios import get_scenario

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--out", default="results/convergence")
ap.add_argument("--levels", default="256,512,1024,2048,4096")
ap.add_argument("--fine", action="store_true")
args = ap.parse_args()

sc = get_scenario("exit-baseline")
levels = [int(n) for n in args.levels.split(",")]
rows = []
for n in levels:
    res = sc.run(n_cells=n, **{"solver.t_end": 0.4, "output.stride": 10**9})
    rows.append((n, 1.0 / n, res.exit.t_star))
    print(f"n_cells={n:5d}  dt=ds  t*={res.exit.t_star:.12f}")
t = [r[2] for r in rows]
gaps = np.abs(np.diff(t))
print("gap ratios:", np.round(gaps[:-1] / gaps[1:], 4).tolist())
print(f"Richardson (last two levels): {richardson(t):.12f}")
if args.fine:
    res = sc.run(n_cells=4096, **{"solver.dt": 1e-6, "solver.t_end": 0.33, "output.stride": 10**9})
    rows.append((4096, 1e-6, res.exit.t_star))
    print(f"fine reference n_cells=4096 dt=1e-6: t*={res.exit.t_star!r}")

out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
write_csv(out / "convergence.csv", ["n_cells", "dt", "t_star"], [np.array(c) for c in zip(*rows)])
