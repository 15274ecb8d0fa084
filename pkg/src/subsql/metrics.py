"""Figures of merit of the region where thermal noise sits below the SQL."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import InvalidArgument
from .noise import NoiseSpectrum

__all__ = ["SubSqlMetrics", "NoSubSqlRegion", "compute_metrics", "sub_sql_ratio"]


@dataclass(frozen=True)
class SubSqlMetrics:
    r_max: float
    f_max: float
    f_l: float
    f_h: float
    bwe: float
    dip_count: int
    # region touches the grid edge, so the crossing there is the grid bound
    lower_open: bool = False
    upper_open: bool = False


@dataclass(frozen=True)
class NoSubSqlRegion:
    r_max: float  # largest SQL/TN ratio seen, <= 1

    def __bool__(self) -> bool:
        return False


def sub_sql_ratio(tn: NoiseSpectrum, sql: NoiseSpectrum) -> np.ndarray:
    if tn.grid != sql.grid:
        raise InvalidArgument("TN and SQL spectra are on different grids")
    return sql.asd / tn.asd


def _crossing(lf: np.ndarray, lr: np.ndarray, i: int) -> float:
    # log-log linear interpolation of ratio == 1 between grid points i, i+1
    t = -lr[i] / (lr[i + 1] - lr[i])
    return math.exp(lf[i] + t * (lf[i + 1] - lf[i]))


def compute_metrics(
    tn: NoiseSpectrum,
    sql: NoiseSpectrum,
    log_base: float = 10.0,
    upper: str = "outermost",
) -> SubSqlMetrics | NoSubSqlRegion:
    """Extract R_MAX, f_MAX, f_L, f_H, BWE and the interior dip count.

    ``upper="outermost"`` takes the highest down-crossing as f_H and the
    global maximum as R_MAX; ``upper="first"`` stops at the first
    down-crossing after f_L and searches R_MAX inside that lobe only.
    """
    if upper not in ("outermost", "first"):
        raise InvalidArgument(f"unknown upper-edge rule {upper!r}")
    ratio = sub_sql_ratio(tn, sql)
    above = ratio > 1.0
    if not above.any():
        return NoSubSqlRegion(float(ratio.max()))

    f = tn.frequencies
    lf, lr = np.log(f), np.log(ratio)
    idx = np.flatnonzero(above)
    lo = int(idx[0])
    if upper == "outermost":
        hi = int(idx[-1])
    else:
        gaps = np.flatnonzero(np.diff(idx) > 1)
        hi = int(idx[gaps[0]]) if len(gaps) else int(idx[-1])

    f_l = f[0] if lo == 0 else _crossing(lf, lr, lo - 1)
    f_h = f[-1] if hi == len(f) - 1 else _crossing(lf, lr, hi)

    k = lo + int(np.argmax(ratio[lo : hi + 1]))
    inside = above[lo : hi + 1]
    dips = int(np.count_nonzero(~inside[1:] & inside[:-1]))

    bwe = math.log10(f_h / f_l) if log_base == 10.0 else math.log(f_h / f_l) / math.log(log_base)
    return SubSqlMetrics(
        r_max=float(ratio[k]),
        f_max=float(f[k]),
        f_l=float(f_l),
        f_h=float(f_h),
        bwe=float(bwe),
        dip_count=dips,
        lower_open=lo == 0,
        upper_open=hi == len(f) - 1,
    )
