"""End-to-end evaluation: stack -> geometry -> modes -> spectra -> metrics."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import ConfigError, RunConfig, SweepSpec
from .metrics import NoSubSqlRegion, SubSqlMetrics, compute_metrics
from .modal import Mode, ReadoutCoupling, assemble, readout_coupling, solve_modes
from .model import InvalidArgument, pad_mass
from .noise import NoiseSpectrum, sql_asd, thermal_asd_mode, total_thermal_asd, viscous_asd_mode

__all__ = ["PointResult", "SweepRow", "SweepError", "run_point", "run_sweep", "mode_q"]

log = logging.getLogger(__name__)


class SweepError(RuntimeError):
    def __init__(self, parameter, value, cause):
        super().__init__(f"sweep point {parameter}={value!r} failed: {cause}")
        self.parameter = parameter
        self.value = value


@dataclass(frozen=True, eq=False)
class PointResult:
    modes: tuple[Mode, ...]
    coupling: ReadoutCoupling
    retained: np.ndarray  # bool mask over modes
    tn: NoiseSpectrum
    sql: NoiseSpectrum
    metrics: SubSqlMetrics | NoSubSqlRegion
    sql_mass: float


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: float
    f1_hz: float
    f_pitch_hz: float
    f_high_hz: float
    r_max: float
    f_max_hz: float
    f_l_hz: float
    f_h_hz: float
    bwe: float
    dip_count: int


def mode_q(config: RunConfig, mode: Mode) -> float:
    """Per-mode Q: ``mode<k>`` override, then label override, then the default."""
    ov = config.q_overrides
    return ov.get(f"mode{mode.index}", ov.get(mode.label, config.q_default))


def _modes_up_to(model, f_max: float) -> list[Mode]:
    """Solve enough modes to pass ``f_max`` (or all of them)."""
    n_all = 2 * model.n_elements
    n = min(32, n_all)
    while True:
        modes = solve_modes(model, n)
        if modes[-1].frequency > f_max or n == n_all:
            return modes
        n = min(2 * n, n_all)


def run_point(config: RunConfig) -> PointResult:
    try:
        stack = config.stack()
        geometry = config.geometry()
    except InvalidArgument as exc:
        raise ConfigError(str(exc), "stack/geometry") from None
    model = assemble(geometry, stack, config.n_elements)
    modes = _modes_up_to(model, config.grid.f_max)
    coupling = readout_coupling(modes, model.end_body.center_offset, config.spot_um * 1e-6)

    grid = config.grid
    freqs = np.array([m.frequency for m in modes])
    retained = coupling.coupled & (freqs < grid.f_max)
    asd_mode = thermal_asd_mode if config.damping == "structural" else viscous_asd_mode
    parts = [
        asd_mode(grid, 2 * math.pi * m.frequency, coupling.m_eff[i], mode_q(config, m), config.temperature_k)
        for i, m in enumerate(modes)
        if retained[i]
    ]
    if not parts:
        raise ConfigError("no coupled mode below the grid's upper frequency", "grid.f_max_hz")
    tn = total_thermal_asd(parts)

    if config.sql_mass == "pad":
        m_sql = pad_mass(stack, config.radius_um)
    else:
        if not coupling.coupled[0]:
            raise ConfigError("fundamental mode is decoupled at this spot; use sql_mass='pad'", "sql_mass")
        m_sql = float(coupling.m_eff[0])
    sql = sql_asd(m_sql, grid)
    metrics = compute_metrics(tn, sql, log_base=config.bwe_log_base)
    return PointResult(tuple(modes), coupling, retained, tn, sql, metrics, m_sql)


def _row(parameter: str, value, result: PointResult) -> SweepRow:
    modes = result.modes
    pitch = next((m.frequency for m in modes if m.label == "pitch"), math.nan)
    kept = [m.frequency for m, keep in zip(modes, result.retained) if keep]
    met = result.metrics
    if isinstance(met, SubSqlMetrics):
        fields = (met.r_max, met.f_max, met.f_l, met.f_h, met.bwe, met.dip_count)
    else:
        fields = (met.r_max, math.nan, math.nan, math.nan, math.nan, 0)
    v = float(sum(value)) if isinstance(value, tuple) else float(value)
    return SweepRow(parameter, v, modes[0].frequency, pitch, max(kept), *fields)


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[SweepRow]:
    """Evaluate every sweep value; rows come back in input order."""

    def one(value):
        try:
            return _row(spec.parameter, value, run_point(spec.base.with_value(spec.parameter, value)))
        except Exception as exc:
            raise SweepError(spec.parameter, value, exc) from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, spec.values))
    return [one(v) for v in spec.values]
