"""Sampling continuous models into NCMS trajectory sets on a time grid."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import (
    DEFAULT_CAP,
    DEFAULT_EPS,
    GridInterval,
    TimeGrid,
    Trajectory,
    TrajectorySet,
    VectorSpace,
    closure,
)
from ..errors import ResourceCapError
from .dynamics import SwitchedSpec, VectorFieldSpec, quantize, rk4_step
from .expr import Predicate


@dataclass(frozen=True)
class GeneratorConfig:
    """Seeds, quantization and state constraint for :func:`generate_trajset`.

    ``start_indices=None`` starts every seed at every grid index ``0..N-1``.
    With ``left_open`` set, a run whose first sample violates the constraint
    is kept as a left-open trajectory ``(i, j]`` from the next sample on.
    """

    seeds: tuple
    resolution: float | tuple = 1e-9
    eps: float = DEFAULT_EPS
    constraint: Predicate | None = None
    left_open: bool = False
    start_indices: tuple | None = None

    def __post_init__(self):
        seeds = tuple(tuple(float(c) for c in np.atleast_1d(s)) for s in self.seeds)
        if not seeds:
            raise ValueError("at least one seed state is required")
        if len({len(s) for s in seeds}) != 1:
            raise ValueError("seed states must share one dimension")
        if np.any(np.asarray(self.resolution, dtype=float) <= 0):
            raise ValueError("quantization resolution must be positive")
        object.__setattr__(self, "seeds", seeds)

    @staticmethod
    def lattice(lower: Sequence[float], upper: Sequence[float], step: Sequence[float]) -> tuple:
        """Seeds on an axis-aligned lattice, bounds inclusive."""
        axes = [
            np.arange(lo, hi + st / 2, st) for lo, hi, st in zip(lower, upper, step)
        ]
        return tuple(tuple(float(c) for c in p) for p in itertools.product(*axes))


def _sample(x: np.ndarray, resolution) -> tuple:
    return tuple(float(c) for c in quantize(x, resolution))


def _mode_sequences(spec, length: int):
    if isinstance(spec, VectorFieldSpec):
        yield (spec,) * length
        return
    fields = [f for _, f in spec.modes]
    yield from itertools.product(fields, repeat=length)


def _segment(start: int, samples: list[tuple], ok: list[bool], left_open: bool) -> Trajectory | None:
    """Cut a sampled run at its first constraint violation."""
    if ok[0]:
        end = ok.index(False) if False in ok else len(ok)
        if end < 2:
            return None
        return Trajectory(GridInterval(start, start + end - 1), samples[:end])
    if left_open and len(ok) > 1 and ok[1]:
        rest = ok[1:]
        end = 1 + (rest.index(False) if False in rest else len(rest))
        return Trajectory(GridInterval(start, start + end - 1, lo_open=True), samples[1:end])
    return None


def generate_trajset(
    spec: VectorFieldSpec | SwitchedSpec,
    cfg: GeneratorConfig,
    grid: TimeGrid,
    cap: int = DEFAULT_CAP,
) -> TrajectorySet:
    """Sample every (seed, start index, mode sequence) run and close the result.

    Samples are integrated with RK4 on the grid step and stored quantized.
    The emitted runs are closed under grid restrictions and under gluing at
    equal states, so the returned set satisfies CPR and the Markov property.
    """
    dim = spec.dim
    if len(cfg.seeds[0]) != dim:
        raise ValueError(f"seed dimension {len(cfg.seeds[0])} does not match the field dimension {dim}")
    n_modes = 1 if isinstance(spec, VectorFieldSpec) else len(spec.modes)
    starts = range(grid.horizon) if cfg.start_indices is None else cfg.start_indices
    total = sum(n_modes ** (grid.horizon - i) for i in starts) * len(cfg.seeds)
    if total > cap:
        raise ResourceCapError(f"{total} sampled runs", cap)

    h = float(grid.step)
    runs: list[Trajectory] = []
    for seed in cfg.seeds:
        for i in starts:
            for fields in _mode_sequences(spec, grid.horizon - i):
                x = np.array(seed)
                samples = [_sample(x, cfg.resolution)]
                for k, field in enumerate(fields):
                    x = rk4_step(field, x, float(grid.time(i + k)), h)
                    samples.append(_sample(x, cfg.resolution))
                if cfg.constraint is None:
                    ok = [True] * len(samples)
                else:
                    ok = [cfg.constraint(s, float(grid.time(i + k))) for k, s in enumerate(samples)]
                run = _segment(i, samples, ok, cfg.left_open)
                if run is not None:
                    runs.append(run)
    space = VectorSpace(dim, cfg.eps)
    return closure(TrajectorySet(grid, space, runs), cap)
