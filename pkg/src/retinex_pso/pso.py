"""Bounded particle swarm optimisation of retinex parameters.

The swarm is synchronous: every particle moves, all fitness values are
computed, then personal and global bests are updated. Together with a
single seeded generator this makes a run reproducible bit for bit.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .image_io import RgbImage
from .objective import fitness as image_fitness
from .retinex import (
    DEFAULT_WEIGHTS,
    PARAM_TYPES,
    MsrcrParams,
    MsrmcrParams,
    RetinexParams,
    ScaleWeights,
    enhance,
    params_from_dict,
)


@dataclass(frozen=True)
class ParamBounds:
    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if not len(self.names) == len(self.lower) == len(self.upper):
            raise ValueError("bounds names/lower/upper lengths differ")
        for n, lo, hi in zip(self.names, self.lower, self.upper):
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValueError(f"invalid interval for {n}: [{lo}, {hi}]")

    @property
    def dimensions(self) -> int:
        return len(self.names)

    @property
    def lo(self) -> np.ndarray:
        return np.array(self.lower, dtype=np.float64)

    @property
    def hi(self) -> np.ndarray:
        return np.array(self.upper, dtype=np.float64)

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def with_overrides(self, **intervals) -> "ParamBounds":
        lower, upper = list(self.lower), list(self.upper)
        for name, (lo, hi) in intervals.items():
            i = self.names.index(name)
            lower[i], upper[i] = float(lo), float(hi)
        return ParamBounds(self.names, tuple(lower), tuple(upper))

    def to_dict(self) -> dict:
        return {"names": list(self.names), "lower": list(self.lower), "upper": list(self.upper)}

    def intervals(self) -> dict[str, tuple[float, float]]:
        return {n: (lo, hi) for n, lo, hi in zip(self.names, self.lower, self.upper)}

    @classmethod
    def from_dict(cls, d: dict) -> "ParamBounds":
        return cls(tuple(d["names"]), tuple(map(float, d["lower"])), tuple(map(float, d["upper"])))


_SIGMA_BOUNDS = {"sigma1": (1.0, 80.0), "sigma2": (81.0, 150.0), "sigma3": (151.0, 256.0)}
_VARIANT_BOUNDS = {
    "msrmcr": {**_SIGMA_BOUNDS, "c_strength": (100.0, 125.0), "gain": (0.0, 5.0), "offset": (-50.0, 0.0)},
    "msrcr": {**_SIGMA_BOUNDS, "gain": (150.0, 200.0), "alpha": (100.0, 125.0),
              "beta": (0.0, 50.0), "offset": (-50.0, 0.0)},
}


def default_bounds(variant: str) -> ParamBounds:
    """Search box for ``variant`` in the parameter order of its params class."""
    table = _VARIANT_BOUNDS[variant]
    names = PARAM_TYPES[variant].names
    return ParamBounds(names, tuple(table[n][0] for n in names), tuple(table[n][1] for n in names))


@dataclass(frozen=True)
class SwarmConfig:
    particle_count: int = 30
    max_iterations: int = 30
    w_max: float = 2.0
    w_min: float = 0.0
    c1_range: tuple[float, float] = (0.0, 2.0)
    c2_range: tuple[float, float] = (0.0, 2.0)
    rng_seed: int = 0
    velocity_fraction: float = 0.5

    def __post_init__(self):
        if self.particle_count < 1:
            raise ValueError(f"particle_count must be >= 1, got {self.particle_count}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.w_max >= self.w_min >= 0:
            raise ValueError(f"need w_max >= w_min >= 0, got {self.w_max}, {self.w_min}")
        for rng in (self.c1_range, self.c2_range):
            if not 0 <= rng[0] <= rng[1]:
                raise ValueError(f"invalid acceleration range {rng}")

    @classmethod
    def fixed_acceleration(cls, c: float = 2.0, **kw) -> "SwarmConfig":
        """Conventional PSO with constant c1 = c2 = ``c``."""
        return cls(c1_range=(c, c), c2_range=(c, c), **kw)


@dataclass
class Swarm:
    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_fitness: np.ndarray
    gbest_position: np.ndarray
    gbest_fitness: float
    iteration: int
    rng: np.random.Generator = field(repr=False)

    @property
    def size(self) -> int:
        return self.positions.shape[0]


def inertia(iteration: int, cfg: SwarmConfig) -> float:
    """Linearly decaying inertia weight, ``w_max`` at 0 down to ``w_min`` at the end."""
    if not 0 <= iteration <= cfg.max_iterations:
        raise ValueError(f"iteration {iteration} outside [0, {cfg.max_iterations}]")
    return cfg.w_max - iteration * (cfg.w_max - cfg.w_min) / cfg.max_iterations


def init_swarm(bounds: ParamBounds, cfg: SwarmConfig, dimensions: Optional[int] = None) -> Swarm:
    """Uniform random positions inside ``bounds`` with zero velocity.

    Personal-best fitness starts at ``-inf``; :func:`evaluate_initial` scores
    the starting positions.
    """
    if dimensions is not None and dimensions != bounds.dimensions:
        raise ValueError(f"bounds have {bounds.dimensions} dimensions, expected {dimensions}")
    rng = np.random.default_rng(cfg.rng_seed)
    lo, hi = bounds.lo, bounds.hi
    pos = lo + rng.random((cfg.particle_count, bounds.dimensions)) * (hi - lo)
    pos = np.clip(pos, lo, hi)
    return Swarm(
        positions=pos,
        velocities=np.zeros_like(pos),
        pbest_positions=pos.copy(),
        pbest_fitness=np.full(cfg.particle_count, -np.inf),
        gbest_position=pos[0].copy(),
        gbest_fitness=-np.inf,
        iteration=0,
        rng=rng,
    )


Evaluator = Callable[[Callable[[np.ndarray], float], Iterable[np.ndarray]], Iterable[float]]


def _evaluate(fitness_of, positions, evaluator: Optional[Evaluator]) -> np.ndarray:
    rows = [p.copy() for p in positions]
    values = evaluator(fitness_of, rows) if evaluator is not None else map(fitness_of, rows)
    return np.array([float(v) for v in values], dtype=np.float64)


def _update_bests(swarm: Swarm, values: np.ndarray) -> None:
    improved = values > swarm.pbest_fitness
    swarm.pbest_positions[improved] = swarm.positions[improved]
    swarm.pbest_fitness[improved] = values[improved]
    best = int(np.argmax(swarm.pbest_fitness))
    if swarm.pbest_fitness[best] > swarm.gbest_fitness:
        swarm.gbest_fitness = float(swarm.pbest_fitness[best])
        swarm.gbest_position = swarm.pbest_positions[best].copy()


def evaluate_initial(swarm: Swarm, fitness_of, evaluator: Optional[Evaluator] = None) -> Swarm:
    _update_bests(swarm, _evaluate(fitness_of, swarm.positions, evaluator))
    return swarm


def step(swarm: Swarm, fitness_of, iteration: int, cfg: SwarmConfig, bounds: ParamBounds,
         evaluator: Optional[Evaluator] = None) -> Swarm:
    """Advance every particle once and refresh the bests.

    Velocities are limited to ``velocity_fraction`` of each interval width.
    A coordinate pushed past a bound is clamped and its velocity zeroed.
    The swarm is updated in place and returned.
    """
    rng = swarm.rng
    n, d = swarm.positions.shape
    w = inertia(iteration, cfg)
    c1 = rng.uniform(*cfg.c1_range)
    c2 = rng.uniform(*cfg.c2_range)
    r1 = rng.random((n, d))
    r2 = rng.random((n, d))
    x = swarm.positions
    v = (w * swarm.velocities
         + c1 * r1 * (swarm.pbest_positions - x)
         + c2 * r2 * (swarm.gbest_position - x))
    vmax = cfg.velocity_fraction * (bounds.hi - bounds.lo)
    v = np.clip(v, -vmax, vmax)
    moved = x + v
    clamped = np.clip(moved, bounds.lo, bounds.hi)
    v[clamped != moved] = 0.0
    swarm.positions = clamped
    swarm.velocities = v
    _update_bests(swarm, _evaluate(fitness_of, clamped, evaluator))
    swarm.iteration = iteration + 1
    return swarm


def optimize(fitness_of, bounds: ParamBounds, cfg: SwarmConfig,
             evaluator: Optional[Evaluator] = None,
             callback: Optional[Callable[[Swarm], None]] = None) -> tuple[Swarm, list[float]]:
    """Maximise ``fitness_of`` over ``bounds``; returns the final swarm and gbest history.

    ``history[k]`` is the global best after iteration ``k + 1``.
    """
    swarm = evaluate_initial(init_swarm(bounds, cfg), fitness_of, evaluator)
    history = []
    for it in range(cfg.max_iterations):
        step(swarm, fitness_of, it, cfg, bounds, evaluator)
        history.append(swarm.gbest_fitness)
        if callback is not None:
            callback(swarm)
    return swarm, history


@dataclass(frozen=True)
class TuneResult:
    best_params: RetinexParams
    best_fitness: float
    history: list[float]
    evaluations: int
    seed: int
    bounds: ParamBounds

    def to_dict(self) -> dict:
        return {
            "variant": self.best_params.variant,
            "best_params": self.best_params.to_dict(),
            "best_fitness": self.best_fitness,
            "history": list(self.history),
            "evaluations": self.evaluations,
            "seed": self.seed,
            "bounds": self.bounds.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TuneResult":
        return cls(
            best_params=params_from_dict(d["best_params"]),
            best_fitness=float(d["best_fitness"]),
            history=[float(h) for h in d["history"]],
            evaluations=int(d["evaluations"]),
            seed=int(d["seed"]),
            bounds=ParamBounds.from_dict(d["bounds"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "TuneResult":
        return cls.from_dict(json.loads(text))


def decode(variant: str, position: Sequence[float]) -> RetinexParams:
    return PARAM_TYPES[variant].from_vector(position)


def tune(img: RgbImage, variant: str, bounds: Optional[ParamBounds] = None,
         cfg: Optional[SwarmConfig] = None, threshold: Optional[float] = None,
         weights: ScaleWeights = DEFAULT_WEIGHTS, evaluator: Optional[Evaluator] = None,
         callback: Optional[Callable[[Swarm], None]] = None) -> TuneResult:
    """Search retinex parameters that maximise the edge/entropy fitness of ``img``.

    ``variant`` is ``"msrcr"`` or ``"msrmcr"``. ``evaluator`` may be a
    parallel map such as ``ThreadPoolExecutor().map``; results do not depend
    on evaluation order.
    """
    if variant not in PARAM_TYPES:
        raise ValueError(f"unknown variant {variant!r}")
    bounds = bounds or default_bounds(variant)
    cfg = cfg or SwarmConfig()
    expected = PARAM_TYPES[variant].names
    if bounds.names != expected:
        raise ValueError(f"bounds for {variant} must be ordered {expected}, got {bounds.names}")

    def fitness_of(position):
        return image_fitness(enhance(img, decode(variant, position), weights), threshold).fitness

    swarm, history = optimize(fitness_of, bounds, cfg, evaluator, callback)
    return TuneResult(
        best_params=decode(variant, swarm.gbest_position),
        best_fitness=swarm.gbest_fitness,
        history=history,
        evaluations=cfg.particle_count * (cfg.max_iterations + 1),
        seed=cfg.rng_seed,
        bounds=bounds,
    )


__all__ = [
    "ParamBounds", "SwarmConfig", "Swarm", "TuneResult", "default_bounds", "inertia",
    "init_swarm", "evaluate_initial", "step", "optimize", "tune", "decode",
    "MsrcrParams", "MsrmcrParams",
]
