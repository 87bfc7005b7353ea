"""Continuous models (ODEs and switched systems) sampled into trajectory sets."""

from .dynamics import SwitchedSpec, VectorFieldSpec, quantize, rk4_step
from .expr import Predicate, eval_expr, parse_expr, parse_predicate, to_text
from .generate import GeneratorConfig, generate_trajset

__all__ = [
    "GeneratorConfig",
    "Predicate",
    "SwitchedSpec",
    "VectorFieldSpec",
    "eval_expr",
    "generate_trajset",
    "parse_expr",
    "parse_predicate",
    "quantize",
    "rk4_step",
    "to_text",
]
