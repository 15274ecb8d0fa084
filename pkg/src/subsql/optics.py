"""Normal-incidence transfer-matrix optics for lossless multilayers.

Characteristic-matrix convention: a layer of index n and thickness t maps
the tangential (E, H) fields across it with

    [[cos d, i sin d / n], [i n sin d, cos d]],   d = 2 pi n t / lambda.
"""

from __future__ import annotations

import io
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import InvalidArgument, Stack

__all__ = [
    "TransferMatrix",
    "ReflectanceSpectrum",
    "layer_matrix",
    "stack_matrix",
    "stack_rt",
    "transmission_ppm",
    "spectrum",
    "high_reflectance_bandwidth",
    "write_spectrum_csv",
]


@dataclass(frozen=True)
class TransferMatrix:
    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @classmethod
    def from_array(cls, a: np.ndarray) -> "TransferMatrix":
        return cls(complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix.from_array(self.to_array() @ other.to_array())

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21


@dataclass(frozen=True, eq=False)
class ReflectanceSpectrum:
    wavelengths: np.ndarray  # nm
    R: np.ndarray
    T: np.ndarray


def _char_matrix(n: float, t: float, lam) -> np.ndarray:
    # broadcasts over lam; result has shape lam.shape + (2, 2)
    lam = np.asarray(lam, dtype=float)
    d = 2.0 * np.pi * n * t / lam
    c, s = np.cos(d), np.sin(d)
    out = np.empty(lam.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = 1j * s / n
    out[..., 1, 0] = 1j * n * s
    out[..., 1, 1] = c
    return out


def layer_matrix(n: float, t: float, lam: float) -> TransferMatrix:
    if not lam > 0:
        raise InvalidArgument(f"wavelength must be > 0, got {lam}")
    if n < 1 or t < 0:
        raise InvalidArgument("need n >= 1 and t >= 0")
    return TransferMatrix.from_array(_char_matrix(n, t, lam))


def stack_matrix(stack: Stack, lam) -> np.ndarray:
    """Product of layer matrices in propagation order; vectorised over ``lam``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise InvalidArgument("wavelength must be > 0")
    m = np.broadcast_to(np.eye(2, dtype=complex), lam.shape + (2, 2)).copy()
    for layer in stack.layers:
        m = m @ _char_matrix(layer.material.refr_index, layer.thickness, lam)
    return m


def rt_from_matrix(m: np.ndarray, n_in: float, n_out: float, independent_t: bool = False):
    """Reflectance and transmittance from an assembled characteristic matrix.

    With ``independent_t`` the transmittance comes from the transmitted
    amplitude instead of ``1 - R``; only useful for checking conservation.
    """
    b = m[..., 0, 0] + m[..., 0, 1] * n_out
    c = m[..., 1, 0] + m[..., 1, 1] * n_out
    denom = n_in * b + c
    r = (n_in * b - c) / denom
    R = np.abs(r) ** 2
    if independent_t:
        t_amp = 2.0 * n_in / denom
        T = (n_out / n_in) * np.abs(t_amp) ** 2
    else:
        T = 1.0 - R
    return R, T


def stack_rt(stack: Stack, lam: float, independent_t: bool = False) -> tuple[float, float]:
    """Return ``(R, T)`` at one wavelength (nm)."""
    if not lam > 0:
        raise InvalidArgument(f"wavelength must be > 0, got {lam}")
    m = stack_matrix(stack, lam)
    R, T = rt_from_matrix(m, stack.incident_index, stack.exit_index, independent_t)
    return float(np.clip(R, 0.0, 1.0)), float(np.clip(T, 0.0, 1.0))


def transmission_ppm(stack: Stack, lam: float) -> float:
    return 1e6 * stack_rt(stack, lam)[1]


def spectrum(stack: Stack, lam_min: float, lam_max: float, n_points: int) -> ReflectanceSpectrum:
    if not (0 < lam_min < lam_max) or n_points < 2:
        raise InvalidArgument("need 0 < lam_min < lam_max and n_points >= 2")
    lam = np.linspace(lam_min, lam_max, int(n_points))
    R, T = rt_from_matrix(stack_matrix(stack, lam), stack.incident_index, stack.exit_index)
    return ReflectanceSpectrum(lam, np.clip(R, 0.0, 1.0), np.clip(T, 0.0, 1.0))


def high_reflectance_bandwidth(spec: ReflectanceSpectrum, threshold: float = 0.999) -> float:
    """Width (nm) of the contiguous band around the reflectance peak with R above ``threshold``."""
    above = spec.R > threshold
    if not above.any():
        return 0.0
    k = int(np.argmax(spec.R))
    lo = k
    while lo > 0 and above[lo - 1]:
        lo -= 1
    hi = k
    while hi < len(above) - 1 and above[hi + 1]:
        hi += 1
    return float(spec.wavelengths[hi] - spec.wavelengths[lo])


def write_spectrum_csv(spec: ReflectanceSpectrum, path: str | Path) -> None:
    buf = io.StringIO()
    buf.write("wavelength_nm,R,T\n")
    for lam, R, T in zip(spec.wavelengths, spec.R, spec.T):
        buf.write(f"{lam:.12e},{R:.12e},{T:.12e}\n")
    if str(path) == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_bytes(buf.getvalue().encode("utf-8"))
