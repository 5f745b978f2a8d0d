"""Solver for the curved-exam effort game.

Students choose effort in [0, 1]; if the class mean falls short of a target
``m`` everybody gets the same free points to lift it to ``m``.  The package
computes exact best replies, all pure equilibria, best-response dynamics and
brute-force cross-checks.
"""
from .core import GameParams, Profile, grade, utility
from .equilibrium import EquilibriumRecord, Kind, enumerate_equilibria
from .errors import CurveGameError, DomainError, NonConvergence, ValidationError
from .response import BestResponse, Region, best_response, jump_point

__all__ = [
    "BestResponse", "CurveGameError", "DomainError", "EquilibriumRecord", "GameParams", "Kind",
    "NonConvergence", "Profile", "Region", "ValidationError", "best_response",
    "enumerate_equilibria", "grade", "jump_point", "utility",
]
__version__ = "0.1.0"
