"""Sparse LP (revised simplex) and MILP (branch and bound) solvers."""

from .bnb import solve_lp, solve_milp
from .lpformat import dump_lp, to_lp_text
from .presolve import Recovery, presolve
from .problem import LinearProgram, MilpProblem, ProblemBuilder, ProblemError, Solution

__all__ = ["LinearProgram", "MilpProblem", "ProblemBuilder", "ProblemError", "Solution",
           "solve_lp", "solve_milp", "presolve", "Recovery", "dump_lp", "to_lp_text"]
