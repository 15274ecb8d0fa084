"""Thermal noise against the SQL for the three reference support pairs.

Writes, per pair, the noise CSV, a log-log SVG, the modes table and the
metrics row at the default geometry.

    python scripts/noise_budget.py --out results/noise
"""

import argparse
from pathlib import Path

from subsql.config import DEFAULT_SWEEPS, RunConfig
from subsql.metrics import SubSqlMetrics
from subsql.output import emit_svg, write_metrics_csv, write_modes_csv, write_noise_csv
from subsql.pipeline import run_point


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=float, default=55.0, help="cantilever length (um)")
    ap.add_argument("--temperature", type=float, default=10.0)
    ap.add_argument("--damping", choices=["structural", "viscous"], default="structural")
    ap.add_argument("--out", type=Path, default=Path("results/noise"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for pair in DEFAULT_SWEEPS["support_pair_nm"]:
        cfg = RunConfig(
            support_pair_nm=pair, length_um=args.length, temperature_k=args.temperature, damping=args.damping
        )
        res = run_point(cfg)
        tag = f"pair_{sum(pair):.1f}nm"
        write_noise_csv(res.tn, res.sql, args.out / f"{tag}_noise.csv")
        write_modes_csv(res.modes, res.coupling, args.out / f"{tag}_modes.csv")
        write_metrics_csv(res.metrics, args.out / f"{tag}_metrics.csv")
        emit_svg(res.tn, res.sql, args.out / f"{tag}.svg", res.metrics)
        m = res.metrics
        kept = int(res.retained.sum())
        print(f"{tag}: f1 {res.modes[0].frequency:.1f} Hz, m_eff {res.sql_mass:.3e} kg, {kept} modes retained")
        if isinstance(m, SubSqlMetrics):
            edge = " (upper edge at grid limit)" if m.upper_open else ""
            print(
                f"  r_max {m.r_max:.2f} at {m.f_max:.3g} Hz, band {m.f_l:.3g}-{m.f_h:.3g} Hz{edge}, "
                f"bwe {m.bwe:.2f}, {m.dip_count} dips"
            )
        else:
            print(f"  no sub-SQL region (max ratio {m.r_max:.3f})")


if __name__ == "__main__":
    main()
