"""Support-pair design study.

Calibrates the AlGaAs index so the thinnest reference support pair transmits
the target, scans the (t_GaAs, t_AlGaAs) plane for the iso-transmission
contour, then runs the hybrid GA from several seeds and reports which parts
of the contour it lands on.

    python scripts/design_branches.py --seeds 10 --out results/design
"""

import argparse
import logging
from pathlib import Path

import numpy as np

from subsql.designer import GaConfig, calibrate_index, cluster_points, design_branches
from subsql.model import reference_stack
from subsql.optics import rt_from_matrix, stack_matrix, transmission_ppm
from subsql.output import write_design_csv

REFERENCE_PAIRS = [(50.7, 52.1), (41.2, 40.9), (35.8, 34.7)]


def scan(template, step, lam, target):
    """Transmission on a square grid of support pairs (slow path through the TMM)."""
    axis = np.arange(10.0, 120.0 + step / 2, step)
    head = template.with_support_pair(0.0, 0.0)
    prefix = stack_matrix(head, lam)
    n1 = template.layers[-2].material.refr_index
    n2 = template.layers[-1].material.refr_index
    t1, t2 = np.meshgrid(axis, axis, indexing="ij")
    d1, d2 = 2 * np.pi * n1 * t1 / lam, 2 * np.pi * n2 * t2 / lam
    m1 = np.stack([np.cos(d1), 1j * np.sin(d1) / n1, 1j * n1 * np.sin(d1), np.cos(d1)], -1).reshape(*d1.shape, 2, 2)
    m2 = np.stack([np.cos(d2), 1j * np.sin(d2) / n2, 1j * n2 * np.sin(d2), np.cos(d2)], -1).reshape(*d2.shape, 2, 2)
    _, T = rt_from_matrix(prefix @ m1 @ m2, template.incident_index, template.exit_index)
    return axis, 1e6 * T


def contour(axis, ppm, target):
    pts = []
    v = ppm - target
    i, j = np.nonzero(np.sign(v[:, :-1]) != np.sign(v[:, 1:]))
    t = v[i, j] / (v[i, j] - v[i, j + 1])
    pts.append(np.column_stack([axis[i], axis[j] + t * (axis[1] - axis[0])]))
    i, j = np.nonzero(np.sign(v[:-1]) != np.sign(v[1:]))
    t = v[i, j] / (v[i, j] - v[i + 1, j])
    pts.append(np.column_stack([axis[i] + t * (axis[1] - axis[0]), axis[j]]))
    return np.vstack(pts)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--target-ppm", type=float, default=250.0)
    ap.add_argument("--min-pair", type=float, default=50.0)
    ap.add_argument("--step", type=float, default=0.1, help="scan resolution (nm)")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/design"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out.mkdir(parents=True, exist_ok=True)
    lam = 1078.0

    template = reference_stack(REFERENCE_PAIRS[-1])
    print("quarter-wave indices:")
    for pair in REFERENCE_PAIRS:
        print(f"  {pair}: {transmission_ppm(reference_stack(pair), lam):8.2f} ppm")
    axis, ppm = scan(template, args.step, lam, args.target_ppm)
    print(f"  best reachable over the box: {ppm.min():.2f} ppm")

    mat = calibrate_index(template, "AlGaAs", args.target_ppm, lam)
    template = template.with_materials({"AlGaAs": mat})
    print(f"calibrated AlGaAs index: {mat.refr_index:.6f}")
    for pair in REFERENCE_PAIRS:
        print(f"  {pair}: {transmission_ppm(template.with_support_pair(*pair), lam):8.2f} ppm")

    axis, ppm = scan(template, args.step, lam, args.target_ppm)
    pts = contour(axis, ppm, args.target_ppm)
    pts = pts[pts.sum(axis=1) >= args.min_pair]
    np.savetxt(args.out / "contour.csv", pts, delimiter=",", header="t_gaas_nm,t_algaas_nm", comments="", fmt="%.6f")
    sums = pts.sum(axis=1)
    print(f"iso-transmission contour: {len(pts)} points, pair sum {sums.min():.1f}-{sums.max():.1f} nm")
    for pair in REFERENCE_PAIRS:
        d = np.min(np.hypot(*(pts - np.array(pair)).T))
        print(f"  {pair} lies {d:.2f} nm from the contour")

    results = design_branches(
        template,
        range(args.seeds),
        GaConfig(),
        threads=args.threads,
        target_ppm=args.target_ppm,
        min_pair_nm=args.min_pair,
    )
    write_design_csv(results, args.out / "design.csv")
    good = [r.pair for r in results if r.converged]
    print(f"GA: {len(good)}/{args.seeds} seeds converged into {len(cluster_points(good))} branch(es)")
    for r in results:
        print(f"  seed {r.seed}: ({r.pair[0]:.2f}, {r.pair[1]:.2f}) nm -> {r.achieved_ppm:.3f} ppm")


if __name__ == "__main__":
    main()
