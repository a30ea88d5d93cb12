"""L2(0,T;L2) distance between sharp and mollified sources as epsilon shrinks."""

import argparse

from stefan_kinetic import experiments as E

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--n-cells", type=int, default=512)
args = ap.parse_args()

factors = (16, 8, 4, 2)
for variant in ("interface", "local"):
    for profile in ("bump", "cosine"):
        norms = E.mollified_vs_sharp(args.n_cells, factors, variant=variant, profile=profile)
        print(f"{variant:9s} {profile:6s} " + "  ".join(f"{f}ds:{x:.3e}" for f, x in zip(factors, norms)))
