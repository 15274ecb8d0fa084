"""Domain types, material registry and stack/geometry derivations.

Units follow the field declarations: layer thicknesses in nm, in-plane
geometry in um, everything else SI. Conversion to SI happens once, at the
boundary of the mechanics and noise code.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

__all__ = [
    "InvalidArgument",
    "InvalidStack",
    "Material",
    "Layer",
    "Stack",
    "Geometry",
    "PhysicalConstants",
    "CONSTANTS",
    "DesignPoint",
    "DESIGN_WAVELENGTH_NM",
    "derive_quarter_wave_index",
    "default_materials",
    "load_materials",
    "dump_materials",
    "reference_stack",
    "geometry_from_stack",
    "pad_mass",
]


class InvalidArgument(ValueError):
    """A scalar argument is outside its admissible range."""


class InvalidStack(ValueError):
    """The layer stack does not have the shape an operation requires."""


DESIGN_WAVELENGTH_NM = 1078.0
GAAS_QW_NM = 76.6
ALGAAS_QW_NM = 89.5
INGAP_NM = 29.6


@dataclass(frozen=True)
class PhysicalConstants:
    k_B: float = 1.380649e-23  # J/K, exact (SI 2019)
    hbar: float = 1.054571817e-34  # J s


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class Material:
    name: str
    refr_index: float
    density: float  # kg/m^3
    youngs_modulus: float  # Pa
    loss_angle: float = 1e-4

    def __post_init__(self):
        if self.refr_index < 1:
            raise InvalidArgument(f"{self.name}: refractive index {self.refr_index} < 1")
        if self.density <= 0 or self.youngs_modulus <= 0:
            raise InvalidArgument(f"{self.name}: density and Young's modulus must be positive")
        if self.loss_angle < 0:
            raise InvalidArgument(f"{self.name}: negative loss angle")


@dataclass(frozen=True)
class Layer:
    material: Material
    thickness: float  # nm

    def __post_init__(self):
        if not self.thickness >= 0:
            raise InvalidArgument(f"layer thickness must be >= 0, got {self.thickness}")


@dataclass(frozen=True)
class Stack:
    """Multilayer listed from the light-incidence side to the exit side."""

    layers: tuple[Layer, ...]
    incident_index: float = 1.0
    exit_index: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.incident_index < 1 or self.exit_index < 1:
            raise InvalidArgument("ambient indices must be >= 1")

    def __len__(self) -> int:
        return len(self.layers)

    @property
    def total_thickness(self) -> float:
        return sum(layer.thickness for layer in self.layers)

    def with_support_pair(self, t_first: float, t_second: float) -> "Stack":
        """Return a copy with the last two layer thicknesses replaced."""
        if len(self.layers) < 2:
            raise InvalidStack("stack has no support pair")
        a, b = self.layers[-2:]
        layers = self.layers[:-2] + (replace(a, thickness=t_first), replace(b, thickness=t_second))
        return replace(self, layers=layers)

    def with_materials(self, materials: Mapping[str, Material]) -> "Stack":
        """Swap every layer's material for the registry entry of the same name."""
        layers = tuple(
            replace(layer, material=materials.get(layer.material.name, layer.material))
            for layer in self.layers
        )
        return replace(self, layers=layers)


@dataclass(frozen=True)
class Geometry:
    l: float  # um, cantilever length
    w: float  # um, cantilever width
    t: float  # nm, cantilever thickness
    r: float  # um, pad radius
    th: float  # um, pad thickness
    y: float  # um, laser spot offset from pad center

    def __post_init__(self):
        for name in ("l", "w", "t", "r", "th"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"geometry.{name} must be > 0")
        if not 0 <= self.y < self.r:
            raise InvalidArgument(f"spot offset y={self.y} must satisfy 0 <= y < r={self.r}")


@dataclass(frozen=True)
class DesignPoint:
    stack: Stack
    geometry: Geometry
    temperature: float = 10.0
    q_default: float = 1e4
    q_overrides: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "q_overrides", MappingProxyType(dict(self.q_overrides)))
        if not self.temperature > 0:
            raise InvalidArgument("temperature must be > 0")
        if not self.q_default > 0 or any(not q > 0 for q in self.q_overrides.values()):
            raise InvalidArgument("quality factors must be > 0")


def derive_quarter_wave_index(center_wavelength: float, quarter_wave_thickness: float) -> float:
    """Index for which a layer of the given thickness is a quarter wave at the center wavelength."""
    if not (center_wavelength > 0 and quarter_wave_thickness > 0):
        raise InvalidArgument("wavelength and thickness must be positive")
    return center_wavelength / (4.0 * quarter_wave_thickness)


def default_materials() -> dict[str, Material]:
    """Registry defaults.

    Indices come from the quarter-wave condition at 1078 nm; InGaP's index
    and all mechanical values are literature-typical placeholders. InGaP
    borrows the AlGaAs mechanical values.
    """
    n_gaas = derive_quarter_wave_index(DESIGN_WAVELENGTH_NM, GAAS_QW_NM)
    n_algaas = derive_quarter_wave_index(DESIGN_WAVELENGTH_NM, ALGAAS_QW_NM)
    return {
        "GaAs": Material("GaAs", n_gaas, 5317.0, 85.9e9),
        "AlGaAs": Material("AlGaAs", n_algaas, 3885.0, 83.3e9),
        "InGaP": Material("InGaP", 3.20, 3885.0, 83.3e9),
    }


def load_materials(source: str | Path | Mapping) -> dict[str, Material]:
    """Read a ``{"materials": [...]}`` document (path, JSON text or parsed dict)."""
    if isinstance(source, Mapping):
        doc = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(source).read_text(encoding="utf-8")
        doc = json.loads(text)
    out = {}
    for entry in doc["materials"]:
        mat = Material(
            name=entry["name"],
            refr_index=float(entry["refr_index"]),
            density=float(entry["density_kg_m3"]),
            youngs_modulus=float(entry["youngs_modulus_pa"]),
            loss_angle=float(entry.get("loss_angle", 1e-4)),
        )
        out[mat.name] = mat
    return out


def dump_materials(materials: Mapping[str, Material] | Iterable[Material]) -> str:
    mats = materials.values() if isinstance(materials, Mapping) else materials
    doc = {
        "materials": [
            {
                "name": m.name,
                "refr_index": m.refr_index,
                "density_kg_m3": m.density,
                "youngs_modulus_pa": m.youngs_modulus,
                "loss_angle": m.loss_angle,
            }
            for m in mats
        ]
    }
    return json.dumps(doc, indent=2, sort_keys=False)


def reference_stack(
    support_pair: tuple[float, float] = (35.8, 34.7),
    pairs: int = 22,
    materials: Mapping[str, Material] | None = None,
    incident_index: float = 1.0,
    exit_index: float = 1.0,
) -> Stack:
    """The mirror-pad stack: quarter-wave GaAs/AlGaAs pairs, InGaP etch stop, support pair."""
    mats = default_materials() if materials is None else dict(materials)
    gaas, algaas, ingap = mats["GaAs"], mats["AlGaAs"], mats["InGaP"]
    layers = [Layer(gaas, GAAS_QW_NM), Layer(algaas, ALGAAS_QW_NM)] * pairs
    layers += [Layer(ingap, INGAP_NM), Layer(gaas, support_pair[0]), Layer(algaas, support_pair[1])]
    return Stack(tuple(layers), incident_index, exit_index)


def geometry_from_stack(stack: Stack, r: float, l: float, w: float, y: float) -> Geometry:
    """Cantilever thickness is the support pair; pad thickness is the whole stack."""
    if len(stack) < 2:
        raise InvalidStack("stack needs at least the two support layers")
    t = stack.layers[-2].thickness + stack.layers[-1].thickness
    th_nm = stack.total_thickness
    return Geometry(l=l, w=w, t=t, r=r, th=th_nm * 1e-3, y=y)


def pad_mass(stack: Stack, r: float) -> float:
    """Mass (kg) of a disk of radius ``r`` um cut from the stack."""
    if not r > 0:
        raise InvalidArgument("pad radius must be > 0")
    areal = math.fsum(layer.material.density * layer.thickness * 1e-9 for layer in stack.layers)
    return math.pi * (r * 1e-6) ** 2 * areal
