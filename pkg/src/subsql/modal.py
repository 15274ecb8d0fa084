"""Reduced-order modal model: composite Euler-Bernoulli cantilever + rigid pad.

The beam is meshed with Hermite-cubic elements (deflection and slope per
node), clamped at the root. The mirror pad is a rigid disk whose centre sits
a distance ``c`` beyond the beam tip; it enters the tip node through the
rigid-body mass matrix

    [[m,   m c],
     [m c, J_tip]],   J_tip = m r^2 / 4 + m c^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .model import Geometry, InvalidArgument, InvalidStack, Stack, pad_mass

__all__ = [
    "NumericalError",
    "EndBody",
    "BeamModel",
    "Mode",
    "ReadoutCoupling",
    "composite_bending_stiffness",
    "assemble",
    "beam_matrices",
    "modal_analysis",
    "solve_modes",
    "readout_coupling",
    "DECOUPLED_THRESHOLD",
]

DECOUPLED_THRESHOLD = 1e-6


class NumericalError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EndBody:
    mass: float  # kg
    rotary_inertia: float  # kg m^2, about the beam tip
    center_offset: float  # m, pad centre beyond the tip

    @property
    def central_inertia(self) -> float:
        return self.rotary_inertia - self.mass * self.center_offset**2


@dataclass(frozen=True)
class BeamModel:
    n_elements: int
    element_length: float  # m
    bending_stiffness: float  # N m^2
    mass_per_length: float  # kg/m
    end_body: EndBody | None = None

    def __post_init__(self):
        if self.n_elements < 4:
            raise InvalidArgument("need at least 4 elements")
        if not (self.element_length > 0 and self.bending_stiffness > 0 and self.mass_per_length > 0):
            raise InvalidArgument("beam properties must be positive")
        eb = self.end_body
        if eb is not None and (eb.mass < 0 or eb.rotary_inertia < 0 or eb.center_offset < 0):
            raise InvalidArgument("end body properties must be non-negative")

    @property
    def length(self) -> float:
        return self.n_elements * self.element_length

    @property
    def beam_mass(self) -> float:
        return self.mass_per_length * self.length


@dataclass(frozen=True)
class Mode:
    index: int
    frequency: float  # Hz
    tip_deflection: float  # kg^-1/2
    tip_slope: float  # kg^-1/2 m^-1
    label: str  # fundamental | pitch | higher


@dataclass(frozen=True, eq=False)
class ReadoutCoupling:
    coupling: np.ndarray  # kg^-1/2
    m_eff: np.ndarray  # kg, NaN where decoupled
    coupled: np.ndarray  # bool


def composite_bending_stiffness(layers: Sequence[tuple[float, float]], width: float) -> float:
    """Transformed-section EI for stacked layers given as ``(E [Pa], t [m])`` bottom-up."""
    z0 = 0.0
    centroids = []
    for _, t in layers:
        centroids.append(z0 + t / 2)
        z0 += t
    ea = sum(E * t for E, t in layers)
    zn = sum(E * t * z for (E, t), z in zip(layers, centroids)) / ea
    return width * sum(E * (t**3 / 12 + t * (z - zn) ** 2) for (E, t), z in zip(layers, centroids))


def assemble(geometry: Geometry, stack: Stack, n_elements: int = 100) -> BeamModel:
    """Build the beam model; the cantilever cross-section is the support pair."""
    if len(stack) < 2:
        raise InvalidStack("stack must end with the two support layers")
    support = stack.layers[-2:]
    if abs(sum(l.thickness for l in support) - geometry.t) > 1e-6 * geometry.t:
        raise InvalidStack("geometry.t does not match the stack's support pair")
    w = geometry.w * 1e-6
    # bottom layer first; EI does not depend on the order anyway
    layers = [(l.material.youngs_modulus, l.thickness * 1e-9) for l in reversed(support)]
    ei = composite_bending_stiffness(layers, w)
    rho_a = w * sum(l.material.density * l.thickness * 1e-9 for l in support)
    m = pad_mass(stack, geometry.r)
    r = geometry.r * 1e-6
    c = r
    body = EndBody(mass=m, rotary_inertia=m * r**2 / 4 + m * c**2, center_offset=c)
    return BeamModel(n_elements, geometry.l * 1e-6 / n_elements, ei, rho_a, body)


def beam_matrices(model: BeamModel) -> tuple[np.ndarray, np.ndarray]:
    """Global stiffness and mass matrices with the root clamped.

    DOF order: (w_1, theta_1, ..., w_N, theta_N); the last two are the tip.
    """
    h, ne = model.element_length, model.n_elements
    ei, ra = model.bending_stiffness, model.mass_per_length
    ke = ei / h**3 * np.array(
        [
            [12, 6 * h, -12, 6 * h],
            [6 * h, 4 * h * h, -6 * h, 2 * h * h],
            [-12, -6 * h, 12, -6 * h],
            [6 * h, 2 * h * h, -6 * h, 4 * h * h],
        ]
    )
    me = ra * h / 420 * np.array(
        [
            [156, 22 * h, 54, -13 * h],
            [22 * h, 4 * h * h, 13 * h, -3 * h * h],
            [54, 13 * h, 156, -22 * h],
            [-13 * h, -3 * h * h, -22 * h, 4 * h * h],
        ]
    )
    n = 2 * (ne + 1)
    K = np.zeros((n, n))
    M = np.zeros((n, n))
    for e in range(ne):
        s = slice(2 * e, 2 * e + 4)
        K[s, s] += ke
        M[s, s] += me
    eb = model.end_body
    if eb is not None:
        mc = eb.mass * eb.center_offset
        M[-2:, -2:] += np.array([[eb.mass, mc], [mc, eb.rotary_inertia]])
    return K[2:, 2:], M[2:, 2:]


def modal_analysis(model: BeamModel, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(frequencies [Hz], mass-normalised eigenvectors)``, ascending.

    The heavy pad puts the fundamental some 17 decades below the top of the
    stiffness spectrum, so the problem is solved in flexibility form
    (M v = mu K v, mu = 1/omega^2) where the low modes are the dominant,
    well-conditioned end.
    """
    if not 1 <= n_modes <= 2 * model.n_elements:
        raise InvalidArgument(f"n_modes must be in [1, {2 * model.n_elements}]")
    K, M = beam_matrices(model)
    # scale rotations by the element length so both DOF types are O(1)
    d = np.ones(len(K))
    d[1::2] = 1.0 / model.element_length
    Ks, Ms = K * np.outer(d, d), M * np.outer(d, d)
    scale = Ks.diagonal().max() / Ms.diagonal().max()
    n = len(K)
    try:
        mu, V = scipy.linalg.eigh(Ms * scale, Ks, subset_by_index=[n - n_modes, n - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(
            f"eigensolver failed: cond(K)={np.linalg.cond(K):.3e}, cond(M)={np.linalg.cond(M):.3e}"
        ) from exc
    if np.any(mu <= 0):
        raise NumericalError(f"non-positive eigenvalue {mu.min():.3e}; cond(K)={np.linalg.cond(K):.3e}")
    # Rayleigh-Ritz on the converged subspace restores M-orthonormality
    # to round-off and re-derives omega^2 in the stiffness form
    kr, mr = V.T @ (Ks / scale) @ V, V.T @ Ms @ V
    lam, Q = scipy.linalg.eigh((kr + kr.T) / 2, (mr + mr.T) / 2)
    V = (V @ Q) * d[:, None]
    return np.sqrt(lam * scale) / (2 * np.pi), V


def _label(index: int, w_tip: float, slope: float, eb: EndBody | None) -> str:
    if index == 1:
        return "fundamental"
    if eb is not None and eb.mass > 0:
        # pad rotational kinetic energy exceeds its translational one
        rot = eb.central_inertia * slope**2
        trans = eb.mass * (w_tip + eb.center_offset * slope) ** 2
        if rot > trans:
            return "pitch"
    return "higher"


def solve_modes(model: BeamModel, n_modes: int) -> list[Mode]:
    freqs, V = modal_analysis(model, n_modes)
    if np.any(np.diff(freqs) <= 0):
        raise NumericalError("repeated eigenfrequencies")
    modes = []
    have_pitch = False
    for k, (f, v) in enumerate(zip(freqs, V.T), start=1):
        w_tip, slope = float(v[-2]), float(v[-1])
        # eigenvector sign is arbitrary; fix it so the tip deflects positively
        if w_tip < 0 or (w_tip == 0 and slope < 0):
            w_tip, slope = -w_tip, -slope
        label = _label(k, w_tip, slope, model.end_body)
        if label == "pitch":
            if have_pitch:
                label = "higher"
            have_pitch = True
        modes.append(Mode(k, float(f), w_tip, slope, label))
    return modes


def readout_coupling(modes: Sequence[Mode], c: float, y: float) -> ReadoutCoupling:
    """Shape value of each mode at a spot ``y`` beyond the pad centre (rigid pad)."""
    a = np.array([m.tip_deflection + (c + y) * m.tip_slope for m in modes], dtype=float)
    amax = np.max(np.abs(a)) if len(a) else 0.0
    coupled = np.abs(a) >= DECOUPLED_THRESHOLD * amax if amax > 0 else np.zeros(len(a), bool)
    with np.errstate(divide="ignore"):
        m_eff = np.where(coupled, 1.0 / np.where(coupled, a, 1.0) ** 2, np.nan)
    return ReadoutCoupling(a, m_eff, coupled)
