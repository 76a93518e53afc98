"""Command line entry point ``fsav-nls``.

Exit codes: 0 success, 2 configuration error, 3 solver error, 4 a
``--check`` threshold was not met.
"""

import argparse
import logging
import sys

import scipy.fft

from . import experiments
from .config import load_config
from .errors import ConfigError, FsavError

log = logging.getLogger("fsav_nls")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CHECK = 0, 2, 3, 4


def _check_run(cfg, out):
    rh = out.record.max_rh()
    ok = rh <= cfg.rh_tol
    print(f"max RH = {rh:.3e} (limit {cfg.rh_tol:.1e}): {'PASS' if ok else 'FAIL'}")
    return ok


def _check_time(cfg, table):
    orders = table.numeric_orders()
    ok = all(abs(o - cfg.order_target) <= cfg.order_tol for o in orders)
    shown = ", ".join(f"{o:.3f}" for o in orders) or "none"
    print(f"orders [{shown}] within {cfg.order_target}+-{cfg.order_tol}: {'PASS' if ok else 'FAIL'}")
    return ok


def _check_space(cfg, table):
    errs = table.errors
    ok = all(b < a for a, b in zip(errs, errs[1:]))
    print(f"errors decrease monotonically: {'PASS' if ok else 'FAIL'}")
    return ok


def _check_cost(cfg, rows):
    ok = True
    for tau in sorted({r.tau for r in rows}, reverse=True):
        by = {r.scheme: r for r in rows if r.tau == tau}
        f, c = by["fsav"], by["cnf"]
        cell = c.status == "ok" and f.wall_seconds < c.wall_seconds
        ok &= cell
        print(f"tau={tau:g}: fsav {f.wall_seconds:.3f}s vs cnf {c.wall_seconds:.3f}s: {'PASS' if cell else 'FAIL'}")
    return ok


COMMANDS = {
    "run": (experiments.cmd_run, _check_run),
    "converge-time": (experiments.cmd_converge_time, _check_time),
    "converge-space": (experiments.cmd_converge_space, _check_space),
    "compare-cost": (experiments.cmd_compare_cost, _check_cost),
}


def build_parser():
    p = argparse.ArgumentParser(prog="fsav-nls", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="key=value configuration file")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--check", action="store_true", help="verify thresholds; exit 4 on failure")
    p.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    cmd, check = COMMANDS[args.command]
    try:
        with scipy.fft.set_workers(max(1, args.threads)):
            result = cmd(cfg, out_dir=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FsavError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    if args.check and not check(cfg, result):
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
