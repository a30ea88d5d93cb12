"""Post-exit decay rate of the baseline run against the first Dirichlet eigenvalue."""

from stefan_kinetic.analysis import check_l2_decay
from stefan_kinetic.scenarios import get_scenario

for n in (256, 512, 1024, 2048):
    res = get_scenario("exit-baseline").run(n_cells=n)
    print(f"n_cells={n:5d}  {check_l2_decay(res).detail}")
