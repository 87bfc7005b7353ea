"""Vector fields, switched systems, fixed-step RK4 and state quantization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expr import Time, eval_expr, parse_expr, to_text


def _uses_time(node) -> bool:
    if isinstance(node, Time):
        return True
    children = getattr(node, "args", None) or [
        getattr(node, a) for a in ("operand", "left", "right", "base") if hasattr(node, a)
    ]
    return any(_uses_time(c) for c in children)


@dataclass(frozen=True)
class VectorFieldSpec:
    """Right-hand side ``x' = F(x, t)``, one expression per coordinate."""

    components: tuple

    def __post_init__(self):
        if not self.components:
            raise ValueError("a vector field needs at least one component")

    @classmethod
    def parse(cls, texts: Sequence[str]) -> VectorFieldSpec:
        dim = len(texts)
        return cls(tuple(parse_expr(t, dim) for t in texts))

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def uses_time(self) -> bool:
        return any(_uses_time(c) for c in self.components)

    def __call__(self, x: Sequence[float], t: float = 0.0) -> np.ndarray:
        return np.array([eval_expr(c, x, t) for c in self.components], dtype=float)

    def __str__(self) -> str:
        return ", ".join(to_text(c) for c in self.components)


@dataclass(frozen=True)
class SwitchedSpec:
    """Finitely many modes; any mode may be active on any grid step."""

    modes: tuple  # ((name, VectorFieldSpec), ...)

    def __post_init__(self):
        if not self.modes:
            raise ValueError("a switched system needs at least one mode")
        dims = {spec.dim for _, spec in self.modes}
        if len(dims) != 1:
            raise ValueError(f"all modes must share one dimension, got {sorted(dims)}")

    @classmethod
    def from_dict(cls, modes: dict) -> SwitchedSpec:
        return cls(tuple((name, spec) for name, spec in modes.items()))

    @property
    def dim(self) -> int:
        return self.modes[0][1].dim

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.modes]


def rk4_step(field: VectorFieldSpec, x: Sequence[float], t: float, h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step."""
    x = np.asarray(x, dtype=float)
    k1 = field(x, t)
    k2 = field(x + 0.5 * h * k1, t + 0.5 * h)
    k3 = field(x + 0.5 * h * k2, t + 0.5 * h)
    k4 = field(x + h * k3, t + h)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def quantize(x, resolution) -> np.ndarray:
    """Round each coordinate to the nearest multiple of its resolution, ties away from zero."""
    x = np.asarray(x, dtype=float)
    res = np.broadcast_to(np.asarray(resolution, dtype=float), x.shape)
    if np.any(res <= 0):
        raise ValueError("quantization resolution must be positive")
    q = np.sign(x) * np.floor(np.abs(x) / res + 0.5) * res
    return q + 0.0  # normalise -0.0
