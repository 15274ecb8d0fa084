"""Command-line entry point: ``subsql design|modes|noise|metrics|sweep|spectrum``.

Exit codes: 0 success, 2 configuration error, 3 numerical error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from .config import DEFAULT_SWEEPS, ConfigError, SweepSpec, load_config
from .designer import EvaluationError, InvalidConfig, cluster_points, design_branches
from .metrics import compute_metrics
from .modal import NumericalError
from .model import InvalidArgument, InvalidStack
from .optics import spectrum, write_spectrum_csv
from .output import (
    emit_csv,
    emit_svg,
    read_noise_csv,
    write_design_csv,
    write_metrics_csv,
    write_modes_csv,
    write_noise_csv,
)
from .pipeline import SweepError, run_point, run_sweep

log = logging.getLogger("subsql")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _threads(args, cfg) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("SUBSQL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SUBSQL_THREADS={env!r} is not an integer") from None
    return cfg.threads


def _load(args):
    cfg, sweep = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed, ga=replace(cfg.ga, seed=args.seed))
    if args.damping is not None:
        cfg = replace(cfg, damping=args.damping)
    if sweep is not None:
        sweep = replace(sweep, base=cfg)
    return cfg, sweep


def cmd_design(args) -> None:
    cfg, _ = _load(args)
    n = args.seeds if args.seeds is not None else cfg.design_seeds
    seeds = [cfg.seed + i for i in range(n)]
    results = design_branches(
        cfg.stack(),
        seeds,
        cfg.ga,
        threads=_threads(args, cfg),
        target_ppm=cfg.target_ppm,
        min_pair_nm=cfg.min_pair_nm,
        wavelength=cfg.wavelength_nm,
    )
    write_design_csv(results, args.out)
    good = [r.pair for r in results if r.converged]
    if good:
        log.info("%d/%d seeds converged into %d branch(es)", len(good), n, len(cluster_points(good)))


def cmd_modes(args) -> None:
    cfg, _ = _load(args)
    res = run_point(cfg)
    k = min(args.n_modes, len(res.modes))
    coupling = replace(
        res.coupling,
        coupling=res.coupling.coupling[:k],
        m_eff=res.coupling.m_eff[:k],
        coupled=res.coupling.coupled[:k],
    )
    write_modes_csv(res.modes[:k], coupling, args.out)


def cmd_noise(args) -> None:
    cfg, _ = _load(args)
    res = run_point(cfg)
    write_noise_csv(res.tn, res.sql, args.out)
    if args.svg:
        emit_svg(res.tn, res.sql, args.svg, res.metrics)


def cmd_metrics(args) -> None:
    cfg, _ = _load(args)
    if args.noise:
        tn, sql = read_noise_csv(args.noise)
        metrics = compute_metrics(tn, sql, log_base=cfg.bwe_log_base)
    else:
        metrics = run_point(cfg).metrics
    write_metrics_csv(metrics, args.out)


def cmd_sweep(args) -> None:
    cfg, sweep = _load(args)
    if args.param:
        sweep = SweepSpec(args.param, DEFAULT_SWEEPS[args.param], cfg)
    if sweep is None:
        raise ConfigError("no sweep configured; add a 'sweep' section or pass --param", "sweep")
    emit_csv(run_sweep(sweep, threads=_threads(args, cfg)), args.out)


def cmd_spectrum(args) -> None:
    cfg, _ = _load(args)
    lo, hi = cfg.spectrum_range_nm
    write_spectrum_csv(spectrum(cfg.stack(), lo, hi, cfg.spectrum_points), args.out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (defaults apply when omitted)")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--seed", type=int, help="base random seed")
    common.add_argument("--threads", type=int, help="worker threads (env SUBSQL_THREADS)")
    common.add_argument("--damping", choices=["structural", "viscous"])
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="subsql", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common], help="optimise the support pair")
    p.add_argument("--seeds", type=int, help="number of independent GA seeds")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("modes", parents=[common], help="mechanical modes and effective masses")
    p.add_argument("--n-modes", type=int, default=10)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("noise", parents=[common], help="thermal noise and SQL spectra")
    p.add_argument("--svg", help="also write a log-log plot")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("metrics", parents=[common], help="sub-SQL figures of merit")
    p.add_argument("--noise", help="read spectra from a 'noise' CSV instead of recomputing")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sweep", parents=[common], help="geometry sweep")
    p.add_argument("--param", choices=sorted(DEFAULT_SWEEPS), help="run the default grid for this parameter")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", parents=[common], help="mirror reflectance spectrum")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args.func(args)
    except SweepError as exc:
        log.error("%s", exc)
        cause = exc.__cause__
        if isinstance(cause, (NumericalError, EvaluationError, ArithmeticError)):
            return EXIT_NUMERICAL
        return EXIT_IO if isinstance(cause, OSError) else EXIT_CONFIG
    except (ConfigError, InvalidConfig, InvalidArgument, InvalidStack) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (NumericalError, EvaluationError, ArithmeticError) as exc:
        log.error("numerical error: %s", exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
