"""Orbits of the Markoff-type surfaces x^2 + y^2 + z^2 - xyz - 2 = k over F_p."""

from ._accel import backend_name
from .analytics import chen_check, compute_hk, conjecture_check, count_formula, weyl_count
from .ff import ConfigError, FieldElem, QuadElem, legendre, sqrt_mod
from .sl2 import Mat2, PairAB, classify_pair, tower_witness
from .surface import decompose_level, enumerate_level, exceptional_set, orbit_of

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "FieldElem",
    "Mat2",
    "PairAB",
    "QuadElem",
    "backend_name",
    "chen_check",
    "classify_pair",
    "compute_hk",
    "conjecture_check",
    "count_formula",
    "decompose_level",
    "enumerate_level",
    "exceptional_set",
    "legendre",
    "orbit_of",
    "sqrt_mod",
    "tower_witness",
    "weyl_count",
]
