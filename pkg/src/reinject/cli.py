"""Command-line entry point.

    reinject levels [--stages P] [--v-dc V]
    reinject simulate --config scenario.cfg --out run.csv
    reinject compare-stages --config scenario.cfg [--sweep]
    reinject thd run.csv v_load_a_V

Exit status: 0 ok, 2 configuration error, 3 simulation error, 4 analysis error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .analysis import harmonic_spectrum, thd
from .converter import ConverterParams, enumerate_states
from .errors import AnalysisError, ConfigError, ReinjectError
from .export import read_csv, split_header, write_csv
from .report import summarize
from .scenario import Scenario, load_scenario
from .simulation import run_simulation

log = logging.getLogger("reinject")


def _scenario(args) -> Scenario:
    return load_scenario(args.config) if args.config else Scenario()


def level_table(params: ConverterParams) -> list[str]:
    rows = enumerate_states(params)
    width = max(params.p, len("state"))
    out = [f"{'state':>{width}}  {'value':>6}  {'voltage_V':>14}"]
    for r in rows:
        out.append(f"{str(r.word):>{width}}  {r.state_value:>6d}  {r.voltage:>14.6g}")
    return out


def cmd_levels(args) -> int:
    if args.config:
        params = _scenario(args).converter
        if args.stages is not None or args.v_dc is not None:
            params = ConverterParams(args.stages or params.p, args.v_dc or params.v_dc, params.weighting)
    else:
        params = ConverterParams(args.stages if args.stages is not None else 3, args.v_dc if args.v_dc is not None else 2.0)
    print("\n".join(level_table(params)))
    return 0


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    log.info("simulating %d-stage scenario %s for %g s", sc.stages, sc.digest(), sc.duration)
    bundle = run_simulation(sc)
    out = args.out or "simulation.csv"
    write_csv(bundle.select(sc.output), out)
    if not args.quiet:
        print(f"wrote {bundle.n_samples} samples to {out}")
        print("\n".join(summarize(bundle, sc).lines(sc.stages)))
    return 0


def stage_thds(base: Scenario, stage_counts) -> dict[int, float]:
    """Load-voltage THD of ``base`` re-run at each stage count.

    An explicit DC link voltage is held fixed; an automatic one follows the
    stage count so every run has the same full injection swing.
    """
    out = {}
    for p in stage_counts:
        sc = base.with_(stages=p)
        bundle = run_simulation(sc)
        spec = harmonic_spectrum(bundle.series(f"v_load_{sc.phase}"), sc.frequency, sc.cycles, sc.start_cycle, sc.harmonics)
        out[p] = thd(spec)
    return out


def cmd_compare_stages(args) -> int:
    base = _scenario(args)
    counts = [1, 2, 3] if args.sweep else [1, 3]
    res = stage_thds(base, counts)
    for p, v in res.items():
        print(f"p={p}: load THD {v:.4f} %")
    lo, hi = counts[-1], counts[0]
    ratio = res[lo] / res[hi] if res[hi] > 0 else float("nan")
    print(f"THD(p={lo}) / THD(p={hi}) = {ratio:.4f}")
    if args.sweep:
        mono = all(res[a] >= res[b] for a, b in zip(counts, counts[1:]))
        print(f"non-increasing with stage count: {'yes' if mono else 'no'}")
    return 0


def cmd_thd(args) -> int:
    bundle = read_csv(args.csv)
    name, _ = split_header(args.column)
    if name not in bundle:
        raise AnalysisError(f"column {args.column!r} not in {args.csv}")
    spec = harmonic_spectrum(bundle.series(name), args.frequency, args.cycles, args.start_cycle, args.harmonics)
    print(f"{args.column}: THD {thd(spec):.4f} % (fundamental {spec[1]:.6g} peak, H={spec.H})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="scenario document")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output CSV path")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="reinject", parents=[common], description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("levels", parents=[common], help="print the switching-state level table")
    p.add_argument("--stages", "-p", type=int)
    p.add_argument("--v-dc", type=float)
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("simulate", parents=[common], help="run a scenario, write CSV, print summary")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare-stages", parents=[common], help="load THD at 1 vs 3 stages")
    p.add_argument("--sweep", action="store_true", help="also run 2 stages")
    p.set_defaults(func=cmd_compare_stages)

    p = sub.add_parser("thd", parents=[common], help="THD of one CSV column")
    p.add_argument("csv")
    p.add_argument("column")
    p.add_argument("--frequency", type=float, default=50.0)
    p.add_argument("--cycles", type=int, default=50)
    p.add_argument("--start-cycle", type=int, default=75)
    p.add_argument("--harmonics", type=int, default=49)
    p.set_defaults(func=cmd_thd)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("config", None), ("out", None), ("quiet", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ReinjectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
