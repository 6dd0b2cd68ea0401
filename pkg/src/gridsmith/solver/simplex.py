"""Bounded-variable revised primal simplex with a dense basis inverse.

Rows are brought to equality form with one logical (slack) column per row,
``A x + s = b``.  Phase 1 minimises the sum of artificial columns, which are
then fixed at zero for phase 2.  Dantzig pricing is used until a run of
degenerate pivots exceeds ``bland_after``; Bland's rule then takes over until
a pivot makes progress again.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .problem import LinearProgram, Solution

AT_LO, AT_HI, FREE, BASIC = 0, 1, 2, 3


class _Tableau:
    def __init__(self, M, cost, lo, hi, b, refactor_every):
        self.M = M  # CSC, m x N
        self.cost = cost
        self.lo = lo
        self.hi = hi
        self.b = b
        self.m, self.N = M.shape
        self.refactor_every = refactor_every
        self.status = np.full(self.N, AT_LO, dtype=np.int8)
        self.x = np.zeros(self.N)
        self.basis = np.zeros(self.m, dtype=np.int64)
        self.Binv = np.eye(self.m)
        self.since_refactor = 0

    def column(self, j):
        col = np.zeros(self.m)
        start, end = self.M.indptr[j], self.M.indptr[j + 1]
        col[self.M.indices[start:end]] = self.M.data[start:end]
        return col

    def refactor(self):
        B = self.M[:, self.basis].toarray()
        self.Binv = np.linalg.inv(B)
        self.since_refactor = 0
        nonbasic = self.status != BASIC
        rhs = self.b - self.M[:, nonbasic] @ self.x[nonbasic]
        self.x[self.basis] = self.Binv @ rhs

    def duals(self):
        y = self.cost[self.basis] @ self.Binv
        d = self.cost - self.M.T @ y
        d[self.basis] = 0.0
        return y, d


def _initial_value(lo, hi):
    if np.isfinite(lo):
        return lo, AT_LO
    if np.isfinite(hi):
        return hi, AT_HI
    return 0.0, FREE


def solve_lp(lp: LinearProgram, feas_tol: float = 1e-8, opt_tol: float = 1e-9,
             max_iter: int | None = None, bland_after: int = 50,
             refactor_every: int = 50) -> Solution:
    """Solve ``lp`` with the revised simplex method.

    Returns a :class:`Solution` whose ``duals`` are row multipliers ``y`` and
    ``reduced_costs`` are ``c - A^T y`` (both in the problem's own sense).
    """
    c = np.asarray(lp.min_form_c(), dtype=float)
    m, n = lp.n_rows, lp.n_vars
    senses = lp.senses
    s_lo = np.array([0.0 if s != ">=" else -np.inf for s in senses])
    s_hi = np.array([np.inf if s == "<=" else 0.0 for s in senses])
    if m == 0:
        return _solve_unconstrained(lp, c)

    A = lp.A.tocsc()
    x0 = np.zeros(n)
    st0 = np.zeros(n, dtype=np.int8)
    for j in range(n):
        x0[j], st0[j] = _initial_value(lp.lo[j], lp.hi[j])
    r = lp.b - A @ x0

    # a slack takes the residual when that keeps it within its bounds;
    # otherwise an artificial covers the row
    needs_art = (r < s_lo - feas_tol * (1 + np.abs(lp.b))) | (r > s_hi + feas_tol * (1 + np.abs(lp.b)))
    s_val = np.where(needs_art, np.clip(r, s_lo, s_hi), r)
    s_val = np.where(np.isfinite(s_val), s_val, 0.0)
    resid = r - s_val
    sign = np.where(resid >= 0, 1.0, -1.0)
    art_rows = np.flatnonzero(needs_art)
    k = art_rows.size

    art = sp.csc_matrix((sign[art_rows], (art_rows, np.arange(k))), shape=(m, k))
    M = sp.hstack([A, sp.identity(m, format="csc"), art], format="csc")
    N = n + m + k
    lo = np.concatenate([lp.lo, s_lo, np.zeros(k)])
    hi = np.concatenate([lp.hi, s_hi, np.full(k, np.inf)])
    cost2 = np.concatenate([c, np.zeros(m + k)])
    cost1 = np.concatenate([np.zeros(n + m), np.ones(k)])

    tab = _Tableau(M, cost1, lo, hi, lp.b.astype(float), refactor_every)
    tab.x[:n] = x0
    tab.status[:n] = st0
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        if needs_art[i]:
            sj = n + i
            tab.x[sj] = s_val[i]
            tab.status[sj] = AT_LO if s_val[i] == s_lo[i] else AT_HI
        else:
            basis[i] = n + i
    for kk, i in enumerate(art_rows):
        basis[i] = n + m + kk
    tab.basis = basis
    tab.status[basis] = BASIC
    tab.refactor()

    if max_iter is None:
        max_iter = max(10000, 50 * (m + n))
    scale = 1.0 + float(np.max(np.abs(lp.b)))
    iters = 0
    if k:
        st, it = _iterate(tab, feas_tol, opt_tol, max_iter, bland_after)
        iters += it
        if st == "iteration_limit":
            return Solution("iteration_limit", iterations=iters, message="phase 1 iteration limit")
        infeas = float(tab.x[n + m:].sum())
        if infeas > feas_tol * scale:
            return Solution("infeasible", iterations=iters,
                            message=f"phase 1 ended with infeasibility {infeas:.3g}")
        # artificials are pinned at zero for phase 2
        tab.hi[n + m:] = 0.0
        nb_art = [j for j in range(n + m, N) if tab.status[j] != BASIC]
        tab.x[nb_art] = 0.0
        tab.status[nb_art] = AT_LO
    tab.cost = cost2
    st, it = _iterate(tab, feas_tol, opt_tol, max_iter - iters, bland_after)
    iters += it
    if st != "optimal":
        return Solution(st, iterations=iters)

    tab.refactor()
    y, d = tab.duals()
    x = tab.x[:n].copy()
    x = np.clip(x, lp.lo, lp.hi)
    obj = float(c @ x)
    dual_obj = _dual_objective(lp.b, y, d[: n + m], lo[: n + m], hi[: n + m], opt_tol)
    sgn = -1.0 if lp.sense == "max" else 1.0
    return Solution("optimal", x=x, objective=sgn * obj + lp.offset, duals=sgn * y,
                    reduced_costs=sgn * d[:n], dual_objective=sgn * dual_obj + lp.offset,
                    iterations=iters)


def _dual_objective(b, y, d, lo, hi, tol):
    total = float(b @ y)
    for dj, l, h in zip(d, lo, hi):
        if dj > 0:
            if np.isfinite(l):
                total += dj * l
            elif dj > tol:
                return -np.inf
        elif dj < 0:
            if np.isfinite(h):
                total += dj * h
            elif dj < -tol:
                return -np.inf
    return total


def _solve_unconstrained(lp, c):
    x = np.zeros(lp.n_vars)
    for j, cj in enumerate(c):
        if cj > 0:
            x[j] = lp.lo[j]
        elif cj < 0:
            x[j] = lp.hi[j]
        else:
            x[j] = _initial_value(lp.lo[j], lp.hi[j])[0]
    if not np.all(np.isfinite(x)):
        return Solution("unbounded")
    sgn = -1.0 if lp.sense == "max" else 1.0
    obj = float(c @ x)
    return Solution("optimal", x=x, objective=sgn * obj + lp.offset, duals=np.zeros(0),
                    reduced_costs=sgn * c.copy(), dual_objective=sgn * obj + lp.offset)


def _iterate(tab: _Tableau, feas_tol, opt_tol, max_iter, bland_after):
    degenerate_run = 0
    piv_tol = 1e-9
    for it in range(max_iter):
        y, d = tab.duals()
        st = tab.status
        movable = tab.lo < tab.hi
        elig = np.zeros(tab.N, dtype=bool)
        elig |= (st == AT_LO) & (d < -opt_tol) & movable
        elig |= (st == AT_HI) & (d > opt_tol) & movable
        elig |= (st == FREE) & (np.abs(d) > opt_tol)
        cand = np.flatnonzero(elig)
        if cand.size == 0:
            return "optimal", it
        bland = degenerate_run >= bland_after
        if bland:
            j = int(cand[0])
        else:
            j = int(cand[np.argmax(np.abs(d[cand]))])
        direction = 1.0 if d[j] < 0 else -1.0
        alpha = tab.Binv @ tab.column(j)
        delta = -direction * alpha  # change of x_B per unit step

        xb = tab.x[tab.basis]
        lob = tab.lo[tab.basis]
        hib = tab.hi[tab.basis]
        theta = np.inf
        leave = -1
        leave_to = AT_LO
        dec = delta < -piv_tol
        inc = delta > piv_tol
        ratios = np.full(tab.m, np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios[dec] = (xb[dec] - lob[dec]) / (-delta[dec])
            ratios[inc] = (hib[inc] - xb[inc]) / delta[inc]
        ratios = np.maximum(ratios, 0.0)
        finite = np.flatnonzero(np.isfinite(ratios))
        if finite.size:
            tmin = ratios[finite].min()
            ties = finite[ratios[finite] <= tmin + 1e-12 * (1 + tmin)]
            if bland:
                pick = ties[np.argmin(tab.basis[ties])]
            else:
                pick = ties[np.argmax(np.abs(delta[ties]))]
            theta = float(ratios[pick])
            leave = int(pick)
            leave_to = AT_LO if delta[pick] < 0 else AT_HI
        span = tab.hi[j] - tab.lo[j]
        if np.isfinite(span) and span <= theta:
            # bound flip, basis unchanged
            tab.x[tab.basis] += span * delta
            tab.x[j] = tab.hi[j] if direction > 0 else tab.lo[j]
            tab.status[j] = AT_HI if direction > 0 else AT_LO
            degenerate_run = 0 if span > 0 else degenerate_run + 1
            continue
        if leave < 0:
            return "unbounded", it
        tab.x[tab.basis] += theta * delta
        tab.x[j] += direction * theta
        out = tab.basis[leave]
        tab.x[out] = tab.lo[out] if leave_to == AT_LO else tab.hi[out]
        tab.status[out] = leave_to
        tab.status[j] = BASIC
        tab.basis[leave] = j
        # product-form update of the dense inverse
        piv = alpha[leave]
        row = tab.Binv[leave] / piv
        tab.Binv -= np.outer(alpha, row)
        tab.Binv[leave] = row
        tab.since_refactor += 1
        if tab.since_refactor >= tab.refactor_every:
            tab.refactor()
        degenerate_run = degenerate_run + 1 if theta <= 1e-12 else 0
    return "iteration_limit", max_iter
