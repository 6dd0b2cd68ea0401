"""Best-bound branch and bound over LP relaxations."""

from __future__ import annotations

import heapq
import math

import numpy as np

from .highs import HighsSession, solve_lp_highs
from .presolve import presolve
from .problem import LinearProgram, MilpProblem, Solution, as_milp
from .simplex import solve_lp as solve_lp_simplex

# own simplex handles anything up to this many rows x columns
SIMPLEX_MAX_CELLS = 50_000


def lp_backend(lp: LinearProgram, backend: str = "auto"):
    if backend == "simplex":
        return solve_lp_simplex
    if backend == "highs":
        return solve_lp_highs
    if backend != "auto":
        raise ValueError(f"unknown LP backend {backend!r}")
    if lp.n_rows * lp.n_vars <= SIMPLEX_MAX_CELLS:
        return solve_lp_simplex
    return solve_lp_highs


def solve_lp(lp: LinearProgram, feas_tol: float = 1e-8, opt_tol: float = 1e-9,
             backend: str = "auto") -> Solution:
    """Solve an LP with the revised simplex (or HiGHS for large models)."""
    return lp_backend(lp, backend)(lp, feas_tol=feas_tol, opt_tol=opt_tol)


def _most_fractional(x, int_idx, int_tol):
    frac = x[int_idx] - np.floor(x[int_idx])
    dist = np.minimum(frac, 1.0 - frac)
    cand = dist > int_tol
    if not cand.any():
        return -1
    score = np.where(cand, dist, -1.0)
    # argmax returns the lowest index among ties
    return int(int_idx[int(np.argmax(score))])


def solve_milp(problem, int_tol: float = 1e-6, rel_gap: float = 1e-6,
               node_limit: int = 100_000, backend: str = "auto",
               feas_tol: float = 1e-8, use_presolve: bool = True) -> Solution:
    """Best-bound branch and bound.

    Nodes are ordered by (relaxation bound, node id).  The branching variable
    is the most fractional integer column, lowest index on ties.  When
    ``node_limit`` is hit the best incumbent is returned with status
    ``node_limit`` and the remaining gap.
    """
    milp = as_milp(problem)
    if use_presolve:
        reduced, rec = presolve(milp)
        if rec.infeasible:
            return Solution("infeasible", message="presolve: empty row violated")
        sol = _branch_and_bound(reduced, int_tol, rel_gap, node_limit, backend, feas_tol)
        return rec.postsolve(sol)
    return _branch_and_bound(milp, int_tol, rel_gap, node_limit, backend, feas_tol)


def _branch_and_bound(milp: MilpProblem, int_tol, rel_gap, node_limit, backend, feas_tol):
    lp = milp.lp
    sgn = -1.0 if lp.sense == "max" else 1.0
    mask = milp.integer_mask
    int_idx = np.flatnonzero(mask)
    lo0 = lp.lo.copy()
    hi0 = lp.hi.copy()
    lo0[mask] = np.ceil(lo0[mask] - int_tol)
    hi0[mask] = np.floor(hi0[mask] + int_tol)
    if np.any(lo0 > hi0):
        return Solution("infeasible", message="empty integer domain")
    solver = lp_backend(lp, backend)
    if solver is solve_lp_highs:
        session = HighsSession(lp, feas_tol=feas_tol)

        def relax(lo, hi, basis=None, cutoff=math.inf):
            return session.solve(lo, hi, basis, cutoff)
    else:
        def relax(lo, hi, basis=None, cutoff=math.inf):
            return solver(lp.with_bounds(lo, hi), feas_tol=feas_tol), None

    root, root_basis = relax(lo0, hi0)
    if root.status != "optimal":
        return Solution(root.status, nodes=1, message=root.message)
    if int_idx.size == 0:
        root.bound = root.objective
        root.gap = 0.0
        root.nodes = 1
        return root

    incumbent_x = None
    incumbent = math.inf  # min-form objective
    counter = 0
    heap = [(sgn * root.objective, counter, lo0, hi0, root, root_basis)]
    nodes = 0
    iters = 0

    # dive from the root, fixing the most fractional integer to its nearest
    # value each step, so pruning has an incumbent from the start
    dlo, dhi, dsol, dbasis = lo0.copy(), hi0.copy(), root, root_basis
    for _ in range(int_idx.size):
        j = _most_fractional(dsol.x, int_idx, int_tol)
        if j < 0:
            incumbent = sgn * dsol.objective
            incumbent_x = dsol.x.copy()
            incumbent_x[int_idx] = np.round(incumbent_x[int_idx])
            break
        dlo[j] = dhi[j] = min(max(np.round(dsol.x[j]), dlo[j]), dhi[j])
        dsol, dbasis = relax(dlo, dhi, dbasis)
        if dsol.status != "optimal":
            break

    def cutoff():
        if incumbent_x is None:
            return math.inf
        return incumbent - rel_gap * max(1.0, abs(incumbent))

    def gap_closed(bound):
        if incumbent_x is None:
            return False
        return incumbent - bound <= rel_gap * max(1.0, abs(incumbent))

    while heap:
        bound, _, lo, hi, sol, basis = heapq.heappop(heap)
        if gap_closed(bound):
            heap.clear()
            heapq.heappush(heap, (bound, -1, lo, hi, sol, basis))
            break
        if nodes >= node_limit:
            heapq.heappush(heap, (bound, -1, lo, hi, sol, basis))
            break
        nodes += 1
        iters += sol.iterations
        j = _most_fractional(sol.x, int_idx, int_tol)
        if j < 0:
            if bound < incumbent:
                incumbent = bound
                incumbent_x = sol.x.copy()
                incumbent_x[int_idx] = np.round(incumbent_x[int_idx])
            continue
        v = sol.x[j]
        for side in (0, 1):
            clo, chi = lo.copy(), hi.copy()
            if side == 0:
                chi[j] = math.floor(v)
            else:
                clo[j] = math.ceil(v)
            child, child_basis = relax(clo, chi, basis, cutoff())
            if child.status != "optimal":
                continue
            cb = sgn * child.objective
            if gap_closed(cb):
                continue
            counter += 1
            heapq.heappush(heap, (cb, counter, clo, chi, child, child_basis))

    best_bound = heap[0][0] if heap else incumbent
    best_bound = min(best_bound, incumbent)
    if incumbent_x is None:
        status = "node_limit" if heap else "infeasible"
        return Solution(status, nodes=nodes, iterations=iters, bound=sgn * best_bound)
    gap = (incumbent - best_bound) / max(1.0, abs(incumbent))
    status = "optimal" if gap <= rel_gap else "node_limit"
    x = np.clip(incumbent_x, lp.lo, lp.hi)
    return Solution(status, x=x, objective=lp.objective(x), bound=sgn * best_bound,
                    gap=max(gap, 0.0), nodes=nodes, iterations=iters)
