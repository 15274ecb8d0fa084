"""Run configuration: JSON document -> validated, immutable ``RunConfig``."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

import jsonschema

from .designer import GaConfig, calibrate_index
from .model import (
    ALGAAS_QW_NM,
    DESIGN_WAVELENGTH_NM,
    GAAS_QW_NM,
    INGAP_NM,
    Geometry,
    InvalidArgument,
    Layer,
    Material,
    Stack,
    default_materials,
    geometry_from_stack,
)
from .noise import FrequencyGrid

__all__ = [
    "ConfigError",
    "RunConfig",
    "SweepSpec",
    "DEFAULT_SWEEPS",
    "config_schema",
    "load_config",
    "parse_config",
]

DEFAULT_SWEEPS = {
    "length_um": (25.0, 40.0, 55.0, 70.0, 85.0, 100.0),
    "width_um": (6.0, 8.0, 10.0, 12.0),
    "radius_um": (12.0, 22.0, 32.0, 42.0),
    "spot_um": (2.75, 3.75, 4.75, 5.75),
    "support_pair_nm": ((35.8, 34.7), (41.2, 40.9), (50.7, 52.1)),
}


class ConfigError(ValueError):
    """Configuration is malformed or inconsistent; ``path`` locates the offending key."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@lru_cache(maxsize=1)
def config_schema() -> dict:
    text = resources.files("subsql").joinpath("config_schema.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class RunConfig:
    materials: Mapping[str, Material] = field(default_factory=default_materials)
    pairs: int = 22
    gaas_nm: float = GAAS_QW_NM
    algaas_nm: float = ALGAAS_QW_NM
    etch_stop_nm: float = INGAP_NM
    support_pair_nm: tuple[float, float] = (35.8, 34.7)
    incident_index: float = 1.0
    exit_index: float = 1.0
    wavelength_nm: float = DESIGN_WAVELENGTH_NM
    length_um: float = 55.0
    width_um: float = 8.0
    radius_um: float = 32.0
    spot_um: float = 3.75
    temperature_k: float = 10.0
    q_default: float = 1e4
    q_overrides: Mapping[str, float] = field(default_factory=dict)
    grid: FrequencyGrid = FrequencyGrid()
    damping: str = "structural"
    sql_mass: str = "fundamental"
    n_elements: int = 100
    bwe_log_base: float = 10.0
    seed: int = 0
    threads: int = 1
    target_ppm: float = 250.0
    min_pair_nm: float = 50.0
    design_seeds: int = 10
    ga: GaConfig = GaConfig()
    spectrum_range_nm: tuple[float, float] = (1000.0, 1160.0)
    spectrum_points: int = 1601

    def __post_init__(self):
        object.__setattr__(self, "materials", MappingProxyType(dict(self.materials)))
        object.__setattr__(self, "q_overrides", MappingProxyType(dict(self.q_overrides)))
        object.__setattr__(self, "support_pair_nm", tuple(map(float, self.support_pair_nm)))
        if self.damping not in ("structural", "viscous"):
            raise ConfigError(f"unknown damping model {self.damping!r}", "damping")
        if self.sql_mass not in ("fundamental", "pad"):
            raise ConfigError(f"unknown SQL mass choice {self.sql_mass!r}", "sql_mass")
        if not 0 <= self.spot_um < self.radius_um:
            raise ConfigError(
                f"spot offset {self.spot_um} um must lie inside the pad radius {self.radius_um} um",
                "geometry.spot_um",
            )
        for name in ("GaAs", "AlGaAs", "InGaP"):
            if name not in self.materials:
                raise ConfigError(f"material {name!r} is not defined", "materials")

    def stack(self) -> Stack:
        m = self.materials
        layers = [Layer(m["GaAs"], self.gaas_nm), Layer(m["AlGaAs"], self.algaas_nm)] * self.pairs
        layers.append(Layer(m["InGaP"], self.etch_stop_nm))
        layers += [Layer(m["GaAs"], self.support_pair_nm[0]), Layer(m["AlGaAs"], self.support_pair_nm[1])]
        return Stack(tuple(layers), self.incident_index, self.exit_index)

    def geometry(self) -> Geometry:
        return geometry_from_stack(self.stack(), self.radius_um, self.length_um, self.width_um, self.spot_um)

    def with_value(self, parameter: str, value) -> "RunConfig":
        """Copy with one sweep parameter replaced."""
        if parameter == "support_pair_nm":
            return replace(self, support_pair_nm=tuple(value))
        if parameter in ("length_um", "width_um", "radius_um", "spot_um"):
            return replace(self, **{parameter: float(value)})
        raise ConfigError(f"unknown sweep parameter {parameter!r}", "sweep.parameter")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    base: RunConfig = RunConfig()

    def __post_init__(self):
        if self.parameter not in DEFAULT_SWEEPS:
            raise ConfigError(f"unknown sweep parameter {self.parameter!r}", "sweep.parameter")
        values = tuple(tuple(map(float, v)) if self.parameter == "support_pair_nm" else float(v) for v in self.values)
        if not values:
            raise ConfigError("sweep has no values", "sweep.values")
        keys = [sum(v) if isinstance(v, tuple) else v for v in values]
        if any(b <= a for a, b in zip(keys, keys[1:])):
            raise ConfigError("sweep values must be strictly ascending", "sweep.values")
        for v in values:
            try:
                self.base.with_value(self.parameter, v)
            except (ConfigError, InvalidArgument) as exc:
                raise ConfigError(f"value {v!r} is invalid: {exc}", "sweep.values") from exc
        object.__setattr__(self, "values", values)


def _get(doc: Mapping, key: str, default):
    return doc.get(key, default) if doc is not None else default


def parse_config(doc: Mapping[str, Any]) -> tuple[RunConfig, SweepSpec | None]:
    """Validate a parsed JSON document and build the run (and optional sweep) config."""
    try:
        jsonschema.validate(doc, config_schema())
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path)
        raise ConfigError(exc.message, path) from None

    materials = default_materials()
    for i, entry in enumerate(doc.get("materials", [])):
        base = materials.get(entry["name"])
        fields = {
            "refr_index": entry.get("refr_index", base.refr_index if base else None),
            "density": entry.get("density_kg_m3", base.density if base else None),
            "youngs_modulus": entry.get("youngs_modulus_pa", base.youngs_modulus if base else None),
            "loss_angle": entry.get("loss_angle", base.loss_angle if base else 1e-4),
        }
        if any(v is None for v in fields.values()):
            raise ConfigError("new materials need every property", f"materials.{i}")
        try:
            materials[entry["name"]] = Material(entry["name"], **fields)
        except InvalidArgument as exc:
            raise ConfigError(str(exc), f"materials.{i}") from None

    st, geo, q = doc.get("stack", {}), doc.get("geometry", {}), doc.get("q", {})
    grid_doc, des, spec_doc = doc.get("grid", {}), doc.get("design", {}), doc.get("spectrum", {})
    d = RunConfig()
    try:
        grid = FrequencyGrid(
            _get(grid_doc, "f_min_hz", d.grid.f_min),
            _get(grid_doc, "f_max_hz", d.grid.f_max),
            _get(grid_doc, "points_per_decade", d.grid.points_per_decade),
        )
    except InvalidArgument as exc:
        raise ConfigError(str(exc), "grid") from None
    seed = doc.get("seed", d.seed)
    try:
        ga = GaConfig(
            population_size=_get(des, "population_size", d.ga.population_size),
            max_generations=_get(des, "max_generations", d.ga.max_generations),
            tournament_size=_get(des, "tournament_size", d.ga.tournament_size),
            restart_diversity_threshold=_get(des, "restart_diversity_threshold", d.ga.restart_diversity_threshold),
            crossover_rate=_get(des, "crossover_rate", d.ga.crossover_rate),
            seed=seed,
            gene_bounds=tuple(map(tuple, _get(des, "gene_bounds_nm", d.ga.gene_bounds))),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), "design") from None

    base = doc.get("bwe_log_base", 10)
    kwargs = dict(
        materials=materials,
        pairs=_get(st, "pairs", d.pairs),
        gaas_nm=_get(st, "gaas_nm", d.gaas_nm),
        algaas_nm=_get(st, "algaas_nm", d.algaas_nm),
        etch_stop_nm=_get(st, "etch_stop_nm", d.etch_stop_nm),
        support_pair_nm=tuple(_get(st, "support_pair_nm", d.support_pair_nm)),
        incident_index=_get(st, "incident_index", d.incident_index),
        exit_index=_get(st, "exit_index", d.exit_index),
        wavelength_nm=_get(st, "wavelength_nm", d.wavelength_nm),
        length_um=_get(geo, "length_um", d.length_um),
        width_um=_get(geo, "width_um", d.width_um),
        radius_um=_get(geo, "radius_um", d.radius_um),
        spot_um=_get(geo, "spot_um", d.spot_um),
        temperature_k=doc.get("temperature_k", d.temperature_k),
        q_default=_get(q, "default", d.q_default),
        q_overrides=_get(q, "overrides", {}),
        grid=grid,
        damping=doc.get("damping", d.damping),
        sql_mass=doc.get("sql_mass", d.sql_mass),
        n_elements=doc.get("n_elements", d.n_elements),
        bwe_log_base=math.e if base == "e" else float(base),
        seed=seed,
        threads=doc.get("threads", d.threads),
        target_ppm=_get(des, "target_ppm", d.target_ppm),
        min_pair_nm=_get(des, "min_pair_nm", d.min_pair_nm),
        design_seeds=_get(des, "seeds", d.design_seeds),
        ga=ga,
        spectrum_range_nm=(
            _get(spec_doc, "wavelength_min_nm", d.spectrum_range_nm[0]),
            _get(spec_doc, "wavelength_max_nm", d.spectrum_range_nm[1]),
        ),
        spectrum_points=_get(spec_doc, "n_points", d.spectrum_points),
    )
    try:
        cfg = RunConfig(**kwargs)
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from None

    cal = doc.get("calibrate_index")
    if cal is not None:
        ref = tuple(cal.get("reference_pair_nm", cfg.support_pair_nm))
        template = replace(cfg, support_pair_nm=ref).stack()
        if cal["material"] not in cfg.materials:
            raise ConfigError(f"unknown material {cal['material']!r}", "calibrate_index.material")
        try:
            mat = calibrate_index(template, cal["material"], cal.get("target_ppm", cfg.target_ppm), cfg.wavelength_nm)
        except InvalidArgument as exc:
            raise ConfigError(str(exc), "calibrate_index") from None
        cfg = replace(cfg, materials={**cfg.materials, mat.name: mat})

    sweep = None
    if "sweep" in doc:
        sw = doc["sweep"]
        values = sw.get("values", DEFAULT_SWEEPS[sw["parameter"]])
        sweep = SweepSpec(sw["parameter"], tuple(values), cfg)
    return cfg, sweep


def load_config(path: str | Path | None) -> tuple[RunConfig, SweepSpec | None]:
    if path is None:
        return parse_config({})
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", str(path)) from None
    return parse_config(doc)
