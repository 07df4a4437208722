"""Exact fantastack desingularization data for systems of binomials."""

__version__ = "0.1.0"

from .errors import FanstalkError  # noqa: E402
from .parser import Binomial, BinomialSystem, VariableOrder, parse_binomial, parse_system  # noqa: E402
from .polyhedra import Cone, Fan, newton_polyhedron, tropical_fan  # noqa: E402
from .fantastack import StackyFan, build_stacky_fan, charts, kernel_lattice  # noqa: E402
from .transform import pullback, problematic_primes  # noqa: E402

__all__ = [
    "Binomial",
    "BinomialSystem",
    "Cone",
    "Fan",
    "FanstalkError",
    "StackyFan",
    "VariableOrder",
    "build_stacky_fan",
    "charts",
    "kernel_lattice",
    "newton_polyhedron",
    "parse_binomial",
    "parse_system",
    "problematic_primes",
    "pullback",
    "tropical_fan",
]
