"""Microresonator design below the standard quantum limit.

Bragg-mirror support-pair design, reduced-order modal analysis, thermal
noise / SQL spectra and sub-SQL figures of merit.
"""

from .model import (
    CONSTANTS,
    Geometry,
    Layer,
    Material,
    Stack,
    default_materials,
    geometry_from_stack,
    pad_mass,
    reference_stack,
)
from .config import RunConfig, SweepSpec, load_config, parse_config
from .pipeline import run_point, run_sweep

__version__ = "0.1.0"
