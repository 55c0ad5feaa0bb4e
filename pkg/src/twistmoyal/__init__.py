"""Twisted Moyal phase space: star products, the factorising change of
variables, star-operator expansions and the resulting spectrum."""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DomainError, GridError, OscillatorResidualError,
                     ParameterError, RepresentationError, TruncationWarning, TwistMoyalError)
from .grid import Axis, Grid
from .operators import (AnalyticFunction, DiffOperator, apply_numeric, expand_left_star,
                        h1_star_operator, trig_to_shift)
from .params import DeformationParams
from .phase import PhaseFunction, phase_variables
from .specfun import QuadratureSpec, bessel_k, hermite, integrate, psi1, psi2
from .spectrum import (EigenSolution, ResidualReport, assemble, ode_residual1, ode_residual2,
                       residual_im, residual_real)
from .star import commutator, expand_star, jacobiator, star
from .tilde import TildeFunction, moyal_star
from .transform import (CommutatorTable, backward, forward, pullback, sector_commutator_check,
                        tilde_commutator_table, transform_hamiltonian)

__all__ = [
    "Axis", "AnalyticFunction", "CommutatorTable", "ConvergenceError", "DeformationParams",
    "DiffOperator", "DomainError", "EigenSolution", "Grid", "GridError", "OscillatorResidualError",
    "ParameterError", "PhaseFunction", "QuadratureSpec", "RepresentationError", "ResidualReport",
    "TildeFunction", "TruncationWarning", "TwistMoyalError", "apply_numeric", "assemble",
    "backward", "bessel_k", "commutator", "expand_left_star", "expand_star", "forward",
    "h1_star_operator", "hermite", "integrate", "jacobiator", "moyal_star", "ode_residual1",
    "ode_residual2", "phase_variables", "psi1", "psi2", "pullback", "residual_im", "residual_real",
    "sector_commutator_check", "star", "tilde_commutator_table", "transform_hamiltonian",
    "trig_to_shift",
]
