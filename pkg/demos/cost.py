"""
Cost: linearly implicit versus fully implicit
=============================================

Each SAV step is two forward and one inverse FFT with fixed multipliers.
The Crank-Nicolson comparator needs a fixed-point loop, each iteration a
transform pair, and typically 4-6 iterations per step here. With
``beta = 0`` the comparator is linear and converges in one iteration; it
then costs a single transform pair per step and beats the SAV step, which
still carries its auxiliary-variable machinery. The advantage of the SAV
scheme is specific to the nonlinear problem.
"""

from fsav_nls import parse_config
from fsav_nls.experiments import cmd_compare_cost

for extra in ("", "\nbeta=0\nc0=1"):
    cfg = parse_config("preset=ex4_1\nalpha=1.7\nt_final=10\ntaus=0.01,0.001" + extra)
    print("beta = 0 (linear)" if extra else "beta = 2")
    for r in cmd_compare_cost(cfg, "out/cost"):
        print(f"  {r.scheme:4s} tau={r.tau:<6g} wall={r.wall_seconds:6.3f}s  "
              f"per step={1e6 * r.per_step:6.1f}us  inner iterations={r.inner_iterations}")
