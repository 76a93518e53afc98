"""
Convergence in time and space
=============================

The scheme is second order in time and spectrally accurate in space. We
measure both with run-to-run differences:

* ``E(tau)`` compares runs with ``tau`` and ``tau/2`` on the same grid;
* ``E(N)`` compares runs with ``N`` and ``2N`` at the coarse points.
"""

from fsav_nls import parse_config
from fsav_nls.experiments import cmd_converge_space, cmd_converge_time


def show(table):
    for v, e, o in zip(table.values, table.errors, table.orders):
        order = "" if o is None else (o if isinstance(o, str) else f"{o:.2f}")
        print(f"  {table.parameter} = {v:<8g} error = {e:.3e}  order = {order}")


# Temporal ladder on the 1D example: tau = 0.01, 0.005, 0.0025, 0.00125.
cfg = parse_config("preset=ex4_1\nalpha=1.7")
print("time, 1D, alpha = 1.7")
show(cmd_converge_time(cfg, "out/convergence"))

# Spatial ladder: the error collapses by orders of magnitude per doubling
# until the time error (tau = 1e-4 here) takes over.
cfg = parse_config("preset=ex4_1\nalpha=1.7\ntau=1e-4\nt_final=1\nns=32,64,128")
print("space, 1D, alpha = 1.7")
show(cmd_converge_space(cfg, "out/convergence"))
