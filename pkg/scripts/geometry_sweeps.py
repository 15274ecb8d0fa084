"""Run every default geometry sweep and tabulate frequencies and sub-SQL metrics.

Besides the sweep CSVs (outermost-crossing metrics), a second table reports
the first sub-SQL lobe only, which is the reading closest to a plot that
stops at the first crossing back above the SQL.

    python scripts/geometry_sweeps.py --out results/sweeps --threads 4
"""

import argparse
import math
from pathlib import Path

from subsql.config import DEFAULT_SWEEPS, RunConfig, SweepSpec
from subsql.metrics import SubSqlMetrics, compute_metrics
from subsql.output import emit_csv
from subsql.pipeline import run_point, run_sweep


def first_lobe(cfg: RunConfig, parameter: str, value):
    res = run_point(cfg.with_value(parameter, value))
    m = compute_metrics(res.tn, res.sql, log_base=cfg.bwe_log_base, upper="first")
    if not isinstance(m, SubSqlMetrics):
        return (math.nan,) * 5
    return m.r_max, m.f_max, m.f_l, m.f_h, m.bwe


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--temperature", type=float, default=10.0)
    ap.add_argument("--out", type=Path, default=Path("results/sweeps"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    base = RunConfig(temperature_k=args.temperature)

    for parameter, values in DEFAULT_SWEEPS.items():
        rows = run_sweep(SweepSpec(parameter, values, base), threads=args.threads)
        emit_csv(rows, args.out / f"{parameter}.csv")
        print(f"\n{parameter}")
        print(f"{'value':>8} {'f1':>9} {'f_pitch':>9} {'r_max':>7} {'f_max':>9} {'f_l':>9} {'f_h':>9} {'bwe':>6} dips"
              f" | lobe: {'r_max':>6} {'f_max':>9} {'f_l':>9} {'f_h':>9}")
        for value, r in zip(values, rows):
            lobe = first_lobe(base, parameter, value)
            print(
                f"{r.value:8.2f} {r.f1_hz:9.1f} {r.f_pitch_hz:9.1f} {r.r_max:7.2f} {r.f_max_hz:9.3g} "
                f"{r.f_l_hz:9.3g} {r.f_h_hz:9.3g} {r.bwe:6.2f} {r.dip_count:4d} | "
                f"{lobe[0]:6.2f} {lobe[1]:9.3g} {lobe[2]:9.3g} {lobe[3]:9.3g}"
            )


if __name__ == "__main__":
    main()
