"""Polynomial solutions of X S'' + Y S' + Z S = 0 through Bethe ansatz equations."""
from qes.models import BetheSolution, OdeSpec, SolverConfig
from qes.poly import ComplexPoly
from qes.solver import solve_all

__version__ = "1.0.0"

__all__ = ["BetheSolution", "ComplexPoly", "OdeSpec", "SolverConfig", "solve_all", "__version__"]
