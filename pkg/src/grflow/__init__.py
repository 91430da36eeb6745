"""Aggregation dynamics on group rings K[G] over finite groups."""
from .dynamics import Ensemble, SimConfig, random_ensemble, simulate
from .equilibria import classify, null_space, residual
from .groups import FiniteGroup, parse_group_spec
from .ring import FieldMode, GroupRingElement

__all__ = [
    "Ensemble",
    "FieldMode",
    "FiniteGroup",
    "GroupRingElement",
    "SimConfig",
    "classify",
    "null_space",
    "parse_group_spec",
    "random_ensemble",
    "residual",
    "simulate",
]
