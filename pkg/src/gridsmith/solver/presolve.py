"""Removal of fixed variables and empty rows, with an exact recovery map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import LinearProgram, MilpProblem, Solution, as_milp


@dataclass(frozen=True)
class Recovery:
    n_vars: int
    kept_cols: np.ndarray
    fixed_cols: np.ndarray
    fixed_vals: np.ndarray
    kept_rows: np.ndarray
    original: LinearProgram
    infeasible: bool = False

    def expand(self, x_reduced) -> np.ndarray:
        x = np.zeros(self.n_vars)
        x[self.kept_cols] = x_reduced
        x[self.fixed_cols] = self.fixed_vals
        return x

    def postsolve(self, sol: Solution) -> Solution:
        if sol.x is None:
            return sol
        x = self.expand(sol.x)
        out = Solution(sol.status, x=x, objective=self.original.objective(x), bound=sol.bound,
                       gap=sol.gap, iterations=sol.iterations, nodes=sol.nodes,
                       message=sol.message, dual_objective=sol.dual_objective)
        if sol.duals is not None:
            y = np.zeros(self.original.n_rows)
            y[self.kept_rows] = sol.duals
            out.duals = y
            out.reduced_costs = self.original.c - self.original.A.T @ y
        return out


def presolve(problem, tol: float = 1e-9):
    """Return ``(reduced_problem, recovery)``.

    Fixed columns (``lo == hi``) are substituted into the right-hand side and
    objective offset; rows left without coefficients are checked and dropped.
    ``recovery.infeasible`` flags an empty row whose constant comparison fails.
    """
    milp = as_milp(problem)
    lp = milp.lp
    fixed = lp.lo == lp.hi
    fixed_cols = np.flatnonzero(fixed)
    kept_cols = np.flatnonzero(~fixed)
    fixed_vals = lp.lo[fixed_cols].copy()
    A = lp.A.tocsc()
    b = lp.b - A[:, fixed_cols] @ fixed_vals
    offset = lp.offset + float(lp.c[fixed_cols] @ fixed_vals)
    A_red = A[:, kept_cols].tocsr()
    nnz = np.diff(A_red.indptr)
    empty = nnz == 0
    infeasible = False
    for i in np.flatnonzero(empty):
        s, rhs = lp.senses[i], b[i]
        lim = tol * (1 + abs(lp.b[i]))
        if (s == "<=" and rhs < -lim) or (s == ">=" and rhs > lim) or (s == "=" and abs(rhs) > lim):
            infeasible = True
    kept_rows = np.flatnonzero(~empty)
    reduced = LinearProgram(
        c=lp.c[kept_cols], A=A_red[kept_rows], senses=tuple(lp.senses[i] for i in kept_rows),
        b=b[kept_rows], lo=lp.lo[kept_cols], hi=lp.hi[kept_cols],
        var_names=tuple(lp.var_names[j] for j in kept_cols),
        row_names=tuple(lp.row_names[i] for i in kept_rows), offset=offset, sense=lp.sense)
    rec = Recovery(lp.n_vars, kept_cols, fixed_cols, fixed_vals, kept_rows, lp, infeasible)
    red = MilpProblem(reduced, tuple(milp.kinds[j] for j in kept_cols))
    if isinstance(problem, LinearProgram):
        return red.lp, rec
    return red, rec
