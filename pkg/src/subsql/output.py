"""Byte-stable CSV and SVG writers."""

from __future__ import annotations

import io
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .designer import DesignResult
from .metrics import NoSubSqlRegion, SubSqlMetrics, compute_metrics
from .modal import Mode, ReadoutCoupling
from .model import InvalidArgument
from .noise import FrequencyGrid, NoiseSpectrum
from .pipeline import SweepRow

__all__ = [
    "SWEEP_HEADER",
    "emit_csv",
    "emit_svg",
    "render_svg",
    "write_noise_csv",
    "read_noise_csv",
    "write_modes_csv",
    "write_metrics_csv",
    "write_design_csv",
]

SWEEP_HEADER = "param,value,f1_hz,f_pitch_hz,f_high_hz,r_max,f_max_hz,f_l_hz,f_h_hz,bwe,dip_count"


def _write(path: str | Path, text: str) -> None:
    if str(path) == "-":
        sys.stdout.write(text)
        return
    # newline="" keeps LF on every platform
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _e9(x: float) -> str:
    return f"{x:.9e}"


def emit_csv(rows: Iterable[SweepRow], path: str | Path) -> None:
    buf = io.StringIO()
    buf.write(SWEEP_HEADER + "\n")
    for r in rows:
        nums = (r.value, r.f1_hz, r.f_pitch_hz, r.f_high_hz, r.r_max, r.f_max_hz, r.f_l_hz, r.f_h_hz, r.bwe)
        buf.write(",".join([r.param, *map(_e9, nums), str(int(r.dip_count))]) + "\n")
    _write(path, buf.getvalue())


def write_noise_csv(tn: NoiseSpectrum, sql: NoiseSpectrum, path: str | Path) -> None:
    if tn.grid != sql.grid:
        raise InvalidArgument("TN and SQL spectra are on different grids")
    buf = io.StringIO()
    buf.write("frequency_hz,tn_asd_m_rthz,sql_asd_m_rthz,ratio_sql_over_tn\n")
    for f, a, b in zip(tn.frequencies, tn.asd, sql.asd):
        buf.write(f"{f:.12e},{a:.12e},{b:.12e},{b / a:.12e}\n")
    _write(path, buf.getvalue())


def read_noise_csv(path: str | Path) -> tuple[NoiseSpectrum, NoiseSpectrum]:
    """Inverse of ``write_noise_csv``; the log grid is reconstructed and checked."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    f = data[:, 0]
    if len(f) < 2:
        raise InvalidArgument("noise file needs at least two rows")
    ppd = int(round((len(f) - 1) / math.log10(f[-1] / f[0])))
    grid = FrequencyGrid(float(f[0]), float(f[-1]), ppd)
    if len(grid) != len(f) or not np.allclose(grid.frequencies, f, rtol=1e-9, atol=0):
        raise InvalidArgument(f"{path}: frequencies are not a uniform log grid")
    return NoiseSpectrum(grid, data[:, 1]), NoiseSpectrum(grid, data[:, 2])


def write_modes_csv(modes: Sequence[Mode], coupling: ReadoutCoupling, path: str | Path) -> None:
    buf = io.StringIO()
    buf.write("mode_index,label,frequency_hz,m_eff_kg,coupled\n")
    for m, meff, ok in zip(modes, coupling.m_eff, coupling.coupled):
        buf.write(f"{m.index},{m.label},{m.frequency:.12e},{meff:.12e},{str(bool(ok)).lower()}\n")
    _write(path, buf.getvalue())


def write_metrics_csv(metrics: SubSqlMetrics | NoSubSqlRegion, path: str | Path) -> None:
    buf = io.StringIO()
    buf.write("r_max,f_max_hz,f_l_hz,f_h_hz,bwe,dip_count\n")
    if isinstance(metrics, SubSqlMetrics):
        nums = (metrics.r_max, metrics.f_max, metrics.f_l, metrics.f_h, metrics.bwe)
        dips = metrics.dip_count
    else:
        nums = (metrics.r_max, math.nan, math.nan, math.nan, math.nan)
        dips = 0
    buf.write(",".join([*map(_e9, nums), str(dips)]) + "\n")
    _write(path, buf.getvalue())


def write_design_csv(results: Iterable[DesignResult], path: str | Path) -> None:
    buf = io.StringIO()
    buf.write("seed,t_gaas_nm,t_algaas_nm,achieved_ppm,evaluations,converged\n")
    for r in results:
        buf.write(
            f"{r.seed},{_e9(r.pair[0])},{_e9(r.pair[1])},{_e9(r.achieved_ppm)},"
            f"{r.evaluations},{str(r.converged).lower()}\n"
        )
    _write(path, buf.getvalue())


W, H = 720, 480
LEFT, RIGHT, TOP, BOTTOM = 80, 20, 20, 50


def render_svg(tn: NoiseSpectrum, sql: NoiseSpectrum, metrics: SubSqlMetrics | NoSubSqlRegion | None = None) -> str:
    """Log-log plot of TN and SQL with the sub-SQL band shaded."""
    if tn.grid != sql.grid:
        raise InvalidArgument("TN and SQL spectra are on different grids")
    if metrics is None:
        metrics = compute_metrics(tn, sql)
    f = tn.frequencies
    x0, x1 = math.log10(f[0]), math.log10(f[-1])
    lo = math.floor(math.log10(min(tn.asd.min(), sql.asd.min())))
    hi = math.ceil(math.log10(max(tn.asd.max(), sql.asd.max())))
    if hi == lo:
        hi += 1
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(freq):
        return LEFT + (math.log10(freq) - x0) / (x1 - x0) * pw

    def py(val):
        return TOP + (hi - math.log10(val)) / (hi - lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
    ]
    if isinstance(metrics, SubSqlMetrics):
        a, b = px(metrics.f_l), px(metrics.f_h)
        out.append(
            f'<rect class="subsql-band" x="{a:.2f}" y="{TOP}" width="{b - a:.2f}" height="{ph}" '
            'fill="#9ecae1" fill-opacity="0.35"/>'
        )
    grid_lines = []
    for d in range(math.ceil(x0), math.floor(x1) + 1):
        x = px(10.0**d)
        grid_lines.append(f'<line x1="{x:.2f}" y1="{TOP}" x2="{x:.2f}" y2="{TOP + ph}" stroke="#ddd"/>')
        grid_lines.append(f'<text x="{x:.2f}" y="{TOP + ph + 18}" font-size="11" text-anchor="middle">1e{d}</text>')
    for d in range(lo, hi + 1):
        y = py(10.0**d)
        grid_lines.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{LEFT + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        grid_lines.append(f'<text x="{LEFT - 6}" y="{y + 4:.2f}" font-size="11" text-anchor="end">1e{d}</text>')
    out += grid_lines
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for name, spec, colour in (("tn", tn, "#d62728"), ("sql", sql, "#1f77b4")):
        pts = " ".join(f"{px(fv):.2f},{py(v):.2f}" for fv, v in zip(f, spec.asd))
        out.append(f'<polyline class="{name}" fill="none" stroke="{colour}" stroke-width="1.2" points="{pts}"/>')
    out.append(
        f'<text x="{LEFT + pw / 2:.2f}" y="{H - 10}" font-size="12" text-anchor="middle">'
        f"{escape('frequency (Hz)')}</text>"
    )
    out.append(
        f'<text x="16" y="{TOP + ph / 2:.2f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">{escape("ASD (m/√Hz)")}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(tn: NoiseSpectrum, sql: NoiseSpectrum, path: str | Path, metrics=None) -> None:
    _write(path, render_svg(tn, sql, metrics))
