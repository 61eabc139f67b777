"""Wright-kernel operators, non-local boundary relations and explicit solvers
for the time-fractional diffusion-wave equation ``u_xx = D^alpha u``."""

from .errors import (
    DiffwaveError,
    DomainError,
    InputError,
    NonConvergence,
    NumericalError,
    ParseError,
    QuadratureFailure,
    ValidationError,
)
from .func import Func1D
from .special import fundamental_solution, wright_phi
from .samarskii import ProblemSpec, evaluate_solution, solve
from .wave import WaveSpec, evaluate_wave_solution

__version__ = "0.1.0"

__all__ = [
    "DiffwaveError",
    "DomainError",
    "Func1D",
    "InputError",
    "NonConvergence",
    "NumericalError",
    "ParseError",
    "ProblemSpec",
    "QuadratureFailure",
    "ValidationError",
    "WaveSpec",
    "evaluate_solution",
    "evaluate_wave_solution",
    "fundamental_solution",
    "solve",
    "wright_phi",
]
