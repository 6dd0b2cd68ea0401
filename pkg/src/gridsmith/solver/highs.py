"""LP relaxations through HiGHS for models too large for the dense simplex.

:class:`HighsSession` loads a model once; branch and bound then only
changes column bounds and restarts dual simplex from the parent's basis.
"""

from __future__ import annotations

import math

import highspy
import numpy as np

from .problem import LinearProgram, Solution

INF = highspy.kHighsInf


def _row_bounds(lp: LinearProgram):
    senses = np.array(lp.senses)
    lower = np.where(senses == "<=", -INF, lp.b)
    upper = np.where(senses == ">=", INF, lp.b)
    return lower, upper


def _clip_inf(a):
    return np.clip(a, -INF, INF)


class HighsSession:
    def __init__(self, lp: LinearProgram, feas_tol: float = 1e-8, opt_tol: float = 1e-9):
        self.lp = lp
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("threads", 1)
        h.setOptionValue("solver", "simplex")
        h.setOptionValue("primal_feasibility_tolerance", max(feas_tol, 1e-10))
        h.setOptionValue("dual_feasibility_tolerance", max(opt_tol, 1e-10))
        model = highspy.HighsLp()
        model.num_col_ = lp.n_vars
        model.num_row_ = lp.n_rows
        model.col_cost_ = lp.min_form_c()
        model.col_lower_ = _clip_inf(lp.lo)
        model.col_upper_ = _clip_inf(lp.hi)
        lower, upper = _row_bounds(lp)
        model.row_lower_ = lower
        model.row_upper_ = upper
        A = lp.A.tocsc()
        model.a_matrix_.format_ = highspy.MatrixFormat.kColwise
        model.a_matrix_.start_ = A.indptr
        model.a_matrix_.index_ = A.indices
        model.a_matrix_.value_ = A.data
        h.passModel(model)
        self.h = h
        self._idx = np.arange(lp.n_vars, dtype=np.int32)

    def solve(self, lo=None, hi=None, basis=None, cutoff=math.inf) -> tuple[Solution, object]:
        """Solve under the given column bounds.

        ``cutoff`` is a min-form objective (offset included) above which the
        relaxation is of no interest; dual simplex may then stop early and the
        result has status ``"cutoff"``.
        """
        h = self.h
        lp = self.lp
        lo = lp.lo if lo is None else lo
        hi = lp.hi if hi is None else hi
        h.changeColsBounds(lp.n_vars, self._idx, _clip_inf(np.asarray(lo, float)),
                           _clip_inf(np.asarray(hi, float)))
        if basis is not None:
            # dual simplex stays feasible after a bound change
            h.setOptionValue("presolve", "off")
            h.setOptionValue("simplex_strategy", 1)
            h.setBasis(basis)
        else:
            # cold starts: primal simplex is markedly faster on plan models
            h.setOptionValue("presolve", "on")
            h.setOptionValue("simplex_strategy", 4)
            h.clearSolver()
        sgn = -1.0 if lp.sense == "max" else 1.0
        h.setOptionValue("objective_bound", float(min(cutoff - sgn * lp.offset, INF)))
        h.run()
        status = h.getModelStatus()
        info = h.getInfo()
        if status == highspy.HighsModelStatus.kObjectiveBound:
            return Solution("cutoff", iterations=info.simplex_iteration_count), None
        if status == highspy.HighsModelStatus.kInfeasible:
            return Solution("infeasible", iterations=info.simplex_iteration_count), None
        if status in (highspy.HighsModelStatus.kUnbounded,
                      highspy.HighsModelStatus.kUnboundedOrInfeasible):
            if basis is None:
                return Solution("unbounded", iterations=info.simplex_iteration_count), None
            # ambiguous verdict from a warm start: settle it from scratch
            return self.solve(lo, hi, None, cutoff)
        if status != highspy.HighsModelStatus.kOptimal:
            return Solution("error", message=h.modelStatusToString(status)), None
        sol = h.getSolution()
        x = np.clip(np.array(sol.col_value), lo, hi)
        y = np.array(sol.row_dual)
        d = np.array(sol.col_dual)
        obj = float(lp.min_form_c() @ x)
        out = Solution("optimal", x=x, objective=sgn * obj + lp.offset, duals=sgn * y,
                       reduced_costs=sgn * d,
                       dual_objective=sgn * float(info.objective_function_value) + lp.offset,
                       iterations=info.simplex_iteration_count)
        return out, h.getBasis()


def solve_lp_highs(lp: LinearProgram, feas_tol: float = 1e-8, opt_tol: float = 1e-9) -> Solution:
    return HighsSession(lp, feas_tol, opt_tol).solve()[0]
