"""Pareto-set approximation for multiobjective LPs via conic programming."""

from . import conic, molp, regions, rules
from .errors import ParetopolyError

__version__ = "0.1.0"
