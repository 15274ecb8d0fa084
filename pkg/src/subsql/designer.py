"""Hybrid micro-genetic / pattern-search design of the mirror support pair.

The micro-GA keeps a population of five, carries the best individual over
unchanged, breeds the rest by tournament selection and blend crossover and
never mutates; once the population has collapsed it is re-seeded at random,
keeping only the elite. The GA best is then polished by a compass (axis-aligned) pattern
search.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .model import DESIGN_WAVELENGTH_NM, InvalidArgument, InvalidStack, Material, Stack
from .optics import _char_matrix, rt_from_matrix, stack_matrix

__all__ = [
    "EvaluationError",
    "InvalidConfig",
    "GaConfig",
    "GaResult",
    "DesignResult",
    "micro_ga",
    "local_refine",
    "hybrid_minimize",
    "support_pair_objective",
    "design_support_pair",
    "design_branches",
    "cluster_points",
    "calibrate_index",
]

log = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]


class EvaluationError(RuntimeError):
    def __init__(self, x, value):
        super().__init__(f"objective returned {value!r} at x={list(map(float, x))}")
        self.x = np.array(x, dtype=float)
        self.value = value


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 5
    max_generations: int = 80
    tournament_size: int = 2
    restart_diversity_threshold: float = 1e-3
    crossover_rate: float = 1.0
    blend_alpha: float = 0.5
    seed: int = 0
    gene_bounds: tuple[tuple[float, float], ...] = ((10.0, 120.0), (10.0, 120.0))

    def __post_init__(self):
        object.__setattr__(self, "gene_bounds", tuple(tuple(map(float, b)) for b in self.gene_bounds))
        if self.population_size < 3:
            raise InvalidConfig("population_size must be >= 3")
        if not 1 <= self.tournament_size <= self.population_size:
            raise InvalidConfig("tournament_size must be in [1, population_size]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise InvalidConfig("crossover_rate must be a probability")
        if self.max_generations < 1:
            raise InvalidConfig("max_generations must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise InvalidConfig("seed must be an unsigned 64-bit integer")
        for lo, hi in self.gene_bounds:
            if not lo < hi:
                raise InvalidConfig(f"bad gene bounds [{lo}, {hi}]")

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.gene_bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.gene_bounds])


@dataclass(frozen=True, eq=False)
class GaResult:
    x: np.ndarray
    fun: float
    history: tuple[float, ...]
    evaluations: int
    restarts: int


@dataclass(frozen=True)
class DesignResult:
    pair: tuple[float, float]  # (t_GaAs, t_AlGaAs) nm
    achieved_ppm: float
    fitness_history: tuple[float, ...]
    evaluations: int
    converged: bool
    seed: int = 0


def _checked(objective: Objective, counter: list[int]) -> Objective:
    def f(x):
        counter[0] += 1
        value = float(objective(x))
        if not math.isfinite(value):
            raise EvaluationError(x, value)
        return value

    return f


def micro_ga(objective: Objective, config: GaConfig) -> GaResult:
    """Minimise ``objective`` over the configured box with a micro-GA."""
    rng = np.random.default_rng(config.seed)
    lo, hi = config.lower, config.upper
    span = hi - lo
    n_pop, n_dim = config.population_size, len(lo)
    counter = [0]
    f = _checked(objective, counter)

    pop = lo + rng.random((n_pop, n_dim)) * span
    fit = np.array([f(x) for x in pop])
    history = []
    restarts = 0

    for _ in range(config.max_generations):
        e = int(np.argmin(fit))
        elite, elite_fit = pop[e].copy(), fit[e]
        history.append(float(elite_fit))

        spread = np.max((pop.max(axis=0) - pop.min(axis=0)) / span)
        if spread < config.restart_diversity_threshold:
            restarts += 1
            fresh = lo + rng.random((n_pop - 1, n_dim)) * span
            pop = np.vstack([elite, fresh])
            fit = np.concatenate([[elite_fit], [f(x) for x in fresh]])
            continue

        children = np.empty((n_pop - 1, n_dim))
        for k in range(n_pop - 1):
            p1 = pop[_tournament(fit, config.tournament_size, rng)]
            p2 = pop[_tournament(fit, config.tournament_size, rng)]
            if rng.random() < config.crossover_rate:
                u = rng.uniform(-config.blend_alpha, 1.0 + config.blend_alpha, n_dim)
                child = p1 + u * (p2 - p1)
            else:
                child = p1.copy()
            children[k] = np.clip(child, lo, hi)
        pop = np.vstack([elite, children])
        fit = np.concatenate([[elite_fit], [f(x) for x in children]])

    e = int(np.argmin(fit))
    if fit[e] < history[-1]:
        history.append(float(fit[e]))
    return GaResult(pop[e].copy(), float(fit[e]), tuple(history), counter[0], restarts)


def _tournament(fit: np.ndarray, size: int, rng: np.random.Generator) -> int:
    picks = rng.choice(len(fit), size=size, replace=False)
    return int(picks[np.argmin(fit[picks])])


def local_refine(
    objective: Objective,
    x0: Sequence[float],
    bounds: Sequence[tuple[float, float]],
    step: float = 1.0,
    min_step: float = 1e-3,
    max_iter: int = 100_000,
) -> np.ndarray:
    """Compass pattern search; only strict improvements are accepted."""
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    x = np.array(x0, dtype=float)
    if np.any(x < lo) or np.any(x > hi):
        raise InvalidArgument("x0 outside bounds")
    fx = float(objective(x))
    for _ in range(max_iter):
        if step < min_step:
            break
        improved = False
        for i in range(len(x)):
            for sign in (1.0, -1.0):
                cand = x.copy()
                cand[i] = np.clip(cand[i] + sign * step, lo[i], hi[i])
                if cand[i] == x[i]:
                    continue
                fc = float(objective(cand))
                if fc < fx:
                    x, fx, improved = cand, fc, True
                    break
        if not improved:
            step *= 0.5
    return x


def hybrid_minimize(objective: Objective, config: GaConfig) -> tuple[np.ndarray, GaResult]:
    ga = micro_ga(objective, config)
    x = local_refine(objective, ga.x, config.gene_bounds)
    return x, ga


def support_pair_objective(
    template: Stack,
    target_ppm: float = 250.0,
    min_pair_nm: float = 50.0,
    wavelength: float = DESIGN_WAVELENGTH_NM,
    penalty: float = 1e6,
) -> tuple[Objective, Callable[[np.ndarray], float]]:
    """Return ``(objective, ppm)`` closures over the template's support pair.

    The fixed part of the stack is multiplied out once; each evaluation
    only builds the two support-layer matrices.
    """
    if len(template) < 2:
        raise InvalidStack("template needs two trailing support layers")
    head = Stack(template.layers[:-2], template.incident_index, template.exit_index)
    prefix = stack_matrix(head, wavelength)
    n1 = template.layers[-2].material.refr_index
    n2 = template.layers[-1].material.refr_index

    def ppm(x) -> float:
        m = prefix @ _char_matrix(n1, x[0], wavelength) @ _char_matrix(n2, x[1], wavelength)
        _, T = rt_from_matrix(m, template.incident_index, template.exit_index)
        return 1e6 * float(T)

    def objective(x) -> float:
        return abs(ppm(x) - target_ppm) + penalty * max(0.0, min_pair_nm - (x[0] + x[1]))

    return objective, ppm


def design_support_pair(
    template: Stack,
    target_ppm: float = 250.0,
    min_pair_nm: float = 50.0,
    wavelength: float = DESIGN_WAVELENGTH_NM,
    config: GaConfig = GaConfig(),
    tol_ppm: float = 1.0,
) -> DesignResult:
    """Find support-pair thicknesses meeting the transmission target.

    ``converged`` is set when the refined design is feasible and within
    ``tol_ppm`` of the target.
    """
    if config.upper[:2].sum() < min_pair_nm:
        raise InvalidConfig(
            f"gene bounds cannot reach the minimum pair thickness {min_pair_nm} nm"
        )
    objective, ppm = support_pair_objective(template, target_ppm, min_pair_nm, wavelength)
    counter = [0]
    counted = _checked(objective, counter)
    x, ga = hybrid_minimize(counted, config)
    achieved = ppm(x)
    feasible = x[0] + x[1] >= min_pair_nm
    fx = objective(x)
    history = ga.history + (fx,) if fx < ga.history[-1] else ga.history
    return DesignResult(
        pair=(float(x[0]), float(x[1])),
        achieved_ppm=achieved,
        fitness_history=history,
        evaluations=counter[0],
        converged=bool(feasible and abs(achieved - target_ppm) <= tol_ppm),
        seed=config.seed,
    )


def design_branches(
    template: Stack,
    seeds: Sequence[int],
    config: GaConfig = GaConfig(),
    threads: int = 1,
    **kwargs,
) -> list[DesignResult]:
    """Run independent designs, one per seed; results come back in seed order."""
    configs = [replace(config, seed=int(s)) for s in seeds]

    def run(cfg):
        return design_support_pair(template, config=cfg, **kwargs)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, configs))
    return [run(cfg) for cfg in configs]


def cluster_points(points, radius: float = 2.0) -> list[np.ndarray]:
    """Greedy leader clustering in input order; returns one centre per cluster."""
    centres: list[np.ndarray] = []
    for p in np.atleast_2d(np.asarray(points, dtype=float)):
        if not any(np.hypot(*(p - c)) <= radius for c in centres):
            centres.append(p)
    return centres


def calibrate_index(
    template: Stack,
    material: str,
    target_ppm: float = 250.0,
    wavelength: float = DESIGN_WAVELENGTH_NM,
    bracket: tuple[float, float] | None = None,
) -> Material:
    """Solve for one material's index so that ``template`` transmits ``target_ppm``.

    Every layer made of ``material`` gets the new index. Raises
    ``InvalidArgument`` when no sign change is found inside the bracket.
    """
    current = next((l.material for l in template.layers if l.material.name == material), None)
    if current is None:
        raise InvalidArgument(f"material {material!r} not in stack")

    def excess(n):
        mat = replace(current, refr_index=n)
        stack = template.with_materials({material: mat})
        m = stack_matrix(stack, wavelength)
        _, T = rt_from_matrix(m, stack.incident_index, stack.exit_index)
        return 1e6 * float(T) - target_ppm

    lo, hi = bracket or (max(1.0, 0.9 * current.refr_index), current.refr_index)
    grid = np.linspace(lo, hi, 41)
    vals = np.array([excess(n) for n in grid])
    sign_change = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    if not len(sign_change):
        raise InvalidArgument(f"target {target_ppm} ppm not bracketed for {material} in [{lo}, {hi}]")
    # nearest root to the starting index
    k = sign_change[-1] if hi == current.refr_index else sign_change[0]
    n = brentq(excess, grid[k], grid[k + 1], xtol=1e-14)
    log.info("calibrated %s index %.6f -> %.6f", material, current.refr_index, n)
    return replace(current, refr_index=float(n))
