"""External-solver driving, solution parsing and the exhaustive oracle."""

from .backends import (BACKENDS, SOLVER_PATH_ENV, CbcBackend, HighsBackend, SolverBackend,
                       get_backend, solve)
from .oracle import OracleError, brute_force_oracle, feasible_patterns
from .solution import (FEAS_TOL, INT_TOL, Solution, SolveLimits, SolverError, Status,
                       parse_solution_file)

__all__ = [
    "BACKENDS", "SOLVER_PATH_ENV", "CbcBackend", "HighsBackend", "SolverBackend", "get_backend",
    "solve", "OracleError", "brute_force_oracle", "feasible_patterns", "FEAS_TOL", "INT_TOL",
    "Solution", "SolveLimits", "SolverError", "Status", "parse_solution_file",
]
