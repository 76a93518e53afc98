"""
Two dimensions with a trap
==========================

The 2D Gaussian ``2/sqrt(pi) exp(-x^2-y^2)`` in a harmonic trap
``(x^2+y^2)/2`` and in an optical lattice ``10(sin^2 pi x + sin^2 pi y)``.
In 2D the operator is diagonal in the 2D Fourier basis with eigenvalue
``lambda_kx + lambda_ky``; no Kronecker matrix is ever formed.

The runs go through the CLI layer and write ``conservation.csv`` and
``|u|`` snapshots into ``out/``.
"""

from fsav_nls import parse_config
from fsav_nls.experiments import cmd_run

for preset, alpha in (("ex4_3_V1", 1.3), ("ex4_3_V2", 1.9)):
    cfg = parse_config(f"preset={preset}\nalpha={alpha}\nstride=20\nsnapshot_times=0,1,2")
    out = cmd_run(cfg, f"out/{preset}")
    rec = out.record
    print(f"{preset}: alpha={alpha}, {out.info['steps']} steps, max RH = {rec.max_rh():.1e}, "
          f"max RM = {rec.max_rm():.1e}")
    for path in out.files:
        print("   wrote", path)
