"""Observed convergence orders on the manufactured decaying-sine solution."""

from stefan_kinetic import experiments as E

for scheme in ("backward_euler", "crank_nicolson"):
    print(f"{scheme:15s} spatial  {E.spatial_orders(scheme).round(4).tolist()}")
    print(f"{scheme:15s} temporal {E.temporal_orders(scheme).round(4).tolist()}")
