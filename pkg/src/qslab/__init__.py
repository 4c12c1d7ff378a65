"""Exact tools for cellular automata acting on quasisturmian shifts."""

from .errors import QSLabError
from .partition import IntervalPartition, parse_partition
from .rules import GeneralRule, LinearRule, parse_rule
from .torus import TorusPoint, parse_angle, parse_point, precision
from .window import SymbolWindow

__version__ = "0.1.0"

__all__ = [
    "GeneralRule",
    "IntervalPartition",
    "LinearRule",
    "QSLabError",
    "SymbolWindow",
    "TorusPoint",
    "parse_angle",
    "parse_partition",
    "parse_point",
    "parse_rule",
    "precision",
]
