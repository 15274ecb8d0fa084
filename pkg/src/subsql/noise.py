"""Thermal-noise and SQL displacement amplitude spectral densities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .model import CONSTANTS, InvalidArgument

__all__ = [
    "FrequencyGrid",
    "NoiseSpectrum",
    "ThermalParams",
    "thermal_asd_mode",
    "viscous_asd_mode",
    "total_thermal_asd",
    "sql_asd",
]


@dataclass(frozen=True)
class FrequencyGrid:
    f_min: float = 10.0
    f_max: float = 1e7
    points_per_decade: int = 200

    def __post_init__(self):
        if not (0 < self.f_min < self.f_max):
            raise InvalidArgument("need 0 < f_min < f_max")
        if self.points_per_decade < 1:
            raise InvalidArgument("points_per_decade must be >= 1")

    @cached_property
    def frequencies(self) -> np.ndarray:
        decades = math.log10(self.f_max / self.f_min)
        n = max(2, int(round(decades * self.points_per_decade)) + 1)
        f = np.logspace(math.log10(self.f_min), math.log10(self.f_max), n)
        f.setflags(write=False)
        return f

    @property
    def omega(self) -> np.ndarray:
        return 2 * np.pi * self.frequencies

    def __len__(self) -> int:
        return len(self.frequencies)


@dataclass(frozen=True, eq=False)
class NoiseSpectrum:
    grid: FrequencyGrid
    asd: np.ndarray  # m/sqrt(Hz)

    def __post_init__(self):
        asd = np.asarray(self.asd, dtype=float)
        if asd.shape != (len(self.grid),):
            raise InvalidArgument("spectrum length does not match its grid")
        asd.setflags(write=False)
        object.__setattr__(self, "asd", asd)

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies


@dataclass(frozen=True)
class ThermalParams:
    temperature: float
    q: float

    def __post_init__(self):
        if not (self.temperature > 0 and self.q > 0):
            raise InvalidArgument("temperature and Q must be positive")


def _check(omega_m, m_eff, q, temperature):
    if not (omega_m > 0 and m_eff > 0 and q > 0 and temperature > 0):
        raise InvalidArgument("omega_m, m_eff, Q and T must all be positive")


def thermal_asd_mode(grid: FrequencyGrid, omega_m: float, m_eff: float, q: float, temperature: float) -> NoiseSpectrum:
    """Structural (frequency-independent loss angle 1/Q) damping."""
    _check(omega_m, m_eff, q, temperature)
    w = grid.omega
    wm2 = omega_m * omega_m
    psd = 4 * CONSTANTS.k_B * temperature * wm2 / (q * m_eff * w * ((wm2 - w * w) ** 2 + wm2 * wm2 / q**2))
    return NoiseSpectrum(grid, np.sqrt(psd))


def viscous_asd_mode(grid: FrequencyGrid, omega_m: float, m_eff: float, q: float, temperature: float) -> NoiseSpectrum:
    """Velocity-proportional damping with the same on-resonance Q."""
    _check(omega_m, m_eff, q, temperature)
    w = grid.omega
    wm2 = omega_m * omega_m
    psd = 4 * CONSTANTS.k_B * temperature * omega_m / (q * m_eff * ((wm2 - w * w) ** 2 + wm2 * w * w / q**2))
    return NoiseSpectrum(grid, np.sqrt(psd))


def total_thermal_asd(spectra: Sequence[NoiseSpectrum]) -> NoiseSpectrum:
    """Quadrature sum of per-mode spectra sharing one grid."""
    if not spectra:
        raise InvalidArgument("no spectra to sum")
    grid = spectra[0].grid
    if any(s.grid != grid for s in spectra[1:]):
        raise InvalidArgument("spectra are on different grids")
    psd = np.zeros(len(grid))
    for s in spectra:
        psd += s.asd**2
    return NoiseSpectrum(grid, np.sqrt(psd))


def sql_asd(m: float, grid: FrequencyGrid) -> NoiseSpectrum:
    """Free-mass standard quantum limit, sqrt(hbar / (2 m)) / omega."""
    if not m > 0:
        raise InvalidArgument("mass must be > 0")
    return NoiseSpectrum(grid, math.sqrt(CONSTANTS.hbar / (2 * m)) / grid.omega)
