import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from gridsmith.solver import (LinearProgram, MilpProblem, ProblemBuilder, ProblemError, dump_lp,
                              presolve, solve_milp)
from gridsmith.solver.bnb import solve_lp
from gridsmith.solver.highs import HighsSession, solve_lp_highs
from gridsmith.solver.lpformat import to_lp_text
from gridsmith.solver.simplex import solve_lp as simplex

from helpers import enumerate_milp, lagrangian_bound, random_lp, random_milp


def lp(c, A, senses, b, lo, hi, sense="min"):
    return LinearProgram(np.array(c, float), sp.csr_matrix(np.array(A, float)), senses,
                         np.array(b, float), np.array(lo, float), np.array(hi, float),
                         sense=sense)


# -- problem construction -----------------------------------------------------------------

def test_duplicate_triplet_rejected():
    with pytest.raises(ProblemError, match="duplicate"):
        LinearProgram.from_triplets([1.0], [(0, 0, 1.0), (0, 0, 2.0)], ["<="], [1.0], [0.0],
                                    [1.0])


def test_construction_checks():
    with pytest.raises(ProblemError):
        lp([1], [[1]], ["<="], [np.inf], [0], [1])
    with pytest.raises(ProblemError):
        lp([1], [[1]], ["<="], [1], [2], [1])
    with pytest.raises(ProblemError):
        lp([1], [[1]], ["<>"], [1], [0], [1])
    base = lp([1], [[1]], ["<="], [1], [0], [1])
    with pytest.raises(ProblemError):
        MilpProblem(base.with_bounds([0], [2]), ["binary"])


def test_builder_merges_repeated_columns():
    b = ProblemBuilder()
    x = b.add_var("x", 0, 10, 1.0)
    b.add_row([(x, 1.0), (x, 2.0)], ">=", 6.0)
    sol = solve_lp(b.build_lp())
    assert sol.x[0] == pytest.approx(2.0)


# -- LP examples ----------------------------------------------------------------------------

def test_single_bound_lp():
    sol = simplex(lp([-1], np.zeros((0, 1)), [], [], [0], [5]))
    assert sol.status == "optimal"
    assert sol.x[0] == pytest.approx(5.0)
    assert sol.objective == pytest.approx(-5.0)


def test_textbook_max():
    # vertex enumeration of the feasible polygon gives (2, 6) with value 36
    p = lp([3, 5], [[1, 0], [0, 2], [3, 2]], ["<=", "<=", "<="], [4, 12, 18], [0, 0],
           [np.inf, np.inf], sense="max")
    sol = simplex(p)
    np.testing.assert_allclose(sol.x, [2, 6], atol=1e-9)
    assert sol.objective == pytest.approx(36.0)
    assert sol.dual_objective == pytest.approx(36.0)
    verts = [(0, 0), (4, 0), (4, 3), (2, 6), (0, 6)]
    assert max(3 * a + 5 * b for a, b in verts) == 36


def test_infeasible_and_unbounded():
    assert simplex(lp([1], [[1], [1]], [">=", "<="], [1, 0], [-np.inf], [np.inf])).status \
        == "infeasible"
    assert simplex(lp([-1], [[1]], [">="], [0], [0], [np.inf])).status == "unbounded"


def test_free_variables_and_equalities():
    p = lp([1, 1], [[1, -1], [1, 1]], ["=", ">="], [1, 3], [-np.inf, -np.inf],
           [np.inf, np.inf])
    sol = simplex(p)
    np.testing.assert_allclose(sol.x, [2, 1], atol=1e-9)


def test_degenerate_cycling_example_terminates():
    # a classic cycling instance for Dantzig's rule with textbook tie-breaking
    c = [-0.75, 150, -1 / 50, 6]
    A = [[0.25, -60, -1 / 25, 9], [0.5, -90, -1 / 50, 3], [0, 0, 1, 0]]
    p = lp(c, A, ["<=", "<=", "<="], [0, 0, 1], [0] * 4, [np.inf] * 4)
    for k in (0, 1, 5):
        sol = simplex(p, bland_after=k)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(-0.05)


def test_duals_satisfy_complementary_slackness():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = random_lp(rng)
        sol = simplex(p)
        act = p.row_activity(sol.x)
        for s, a, bi, y in zip(p.senses, act, p.b, sol.duals):
            if s != "=" and abs(a - bi) > 1e-7:
                assert abs(y) <= 1e-8
        d = sol.reduced_costs
        np.testing.assert_allclose(d, p.c - p.A.T @ sol.duals, atol=1e-8)
        interior = (sol.x > p.lo + 1e-7) & (sol.x < p.hi - 1e-7)
        assert np.all(np.abs(d[interior]) <= 1e-8)


def test_simplex_matches_highs_on_random_lps():
    rng = np.random.default_rng(11)
    for k in range(120):
        p = random_lp(rng, sense="max" if k % 3 == 0 else "min", free_frac=0.2 * (k % 2))
        a = simplex(p)
        b = solve_lp_highs(p)
        assert a.status == b.status == "optimal"
        assert a.objective == pytest.approx(b.objective, rel=1e-7, abs=1e-7)
        assert p.max_violation(a.x) <= 1e-8
        bound = lagrangian_bound(p, a.duals)
        assert abs(a.objective - bound) <= 1e-6 * (1 + abs(a.objective))


def test_highs_session_warm_start_matches_cold_solve():
    rng = np.random.default_rng(5)
    p = random_lp(rng, 8, 8)
    sess = HighsSession(p)
    root, basis = sess.solve()
    lo, hi = p.lo.copy(), p.hi.copy()
    hi[0] = lo[0] + 0.5 * (hi[0] - lo[0])
    warm, _ = sess.solve(lo, hi, basis)
    cold = simplex(p.with_bounds(lo, hi))
    assert warm.objective == pytest.approx(cold.objective, rel=1e-9, abs=1e-9)
    cut, _ = sess.solve(lo, hi, basis, cutoff=cold.objective - 1.0)
    assert cut.status in ("cutoff", "optimal")


def test_backend_selection():
    small = random_lp(np.random.default_rng(0), 3, 3)
    assert solve_lp(small, backend="simplex").objective == pytest.approx(
        solve_lp(small, backend="highs").objective)
    with pytest.raises(ValueError):
        solve_lp(small, backend="glpk")


# -- MILP ----------------------------------------------------------------------------------

def test_binary_knapsack_example():
    p = MilpProblem(lp([5, 4], [[3, 2]], ["<="], [4], [0, 0], [1, 1], sense="max"),
                    ["binary", "binary"])
    sol = solve_milp(p)
    np.testing.assert_allclose(sol.x, [1, 0])
    assert sol.objective == pytest.approx(5.0)


def test_continuous_milp_equals_lp():
    rng = np.random.default_rng(8)
    p = random_lp(rng, 6, 5)
    a = solve_milp(MilpProblem(p, ["continuous"] * 6))
    b = simplex(p)
    assert a.objective == pytest.approx(b.objective, abs=1e-9)
    assert a.nodes == 1


def test_general_integers():
    # max x + y, 2x + 2y <= 7, integer -> 3
    p = MilpProblem(lp([1, 1], [[2, 2]], ["<="], [7], [0, 0], [10, 10], sense="max"),
                    ["integer", "integer"])
    sol = solve_milp(p)
    assert sol.objective == pytest.approx(3.0)
    assert np.all(sol.x == np.round(sol.x))


def test_milp_vs_enumeration_and_relaxation_bound():
    rng = np.random.default_rng(21)
    for _ in range(25):
        p = random_milp(rng, n_bin=int(rng.integers(1, 8)))
        sol = solve_milp(p)
        best = enumerate_milp(p, simplex)
        if not np.isfinite(best):
            assert sol.status == "infeasible"
            continue
        assert sol.objective == pytest.approx(best, abs=1e-6)
        relax = simplex(p.lp)
        assert sol.objective >= relax.objective - 1e-9
        assert p.lp.max_violation(sol.x) <= 1e-8


def test_node_limit_reports_incumbent_and_gap():
    rng = np.random.default_rng(4)
    hit = 0
    for _ in range(30):
        p = random_milp(rng, n_bin=10, n_cont=2, m=6)
        full = solve_milp(p)
        lim = solve_milp(p, node_limit=1)
        if lim.status == "node_limit":
            hit += 1
            assert lim.gap > 0 or lim.x is None
            if lim.x is not None:
                assert lim.objective >= full.objective - 1e-9
            assert lim.bound <= full.objective + 1e-9
    assert hit > 0


def test_empty_integer_domain_is_infeasible():
    p = MilpProblem(lp([1], [[1]], ["<="], [5], [0.2], [0.8]), ["integer"])
    assert solve_milp(p).status == "infeasible"


def test_milp_deterministic():
    rng = np.random.default_rng(9)
    p = random_milp(rng, n_bin=9, n_cont=3, m=6)
    a, b = solve_milp(p), solve_milp(p)
    assert np.array_equal(a.x, b.x)
    assert a.nodes == b.nodes


# -- presolve and export --------------------------------------------------------------------

def test_presolve_fixed_column_and_empty_row():
    p = lp([1, 2], [[1, 1], [0, 0]], [">=", "<="], [4, 5], [0, 3], [10, 3])
    red, rec = presolve(p)
    assert red.n_vars == 1 and red.n_rows == 1
    sol = rec.postsolve(simplex(red))
    np.testing.assert_allclose(sol.x, [1, 3])
    assert sol.objective == pytest.approx(7.0)


def test_presolve_detects_violated_empty_row():
    p = lp([1], [[0]], [">="], [1], [0], [1])
    _, rec = presolve(p)
    assert rec.infeasible


def test_lp_text_export(tmp_path):
    b = ProblemBuilder()
    x = b.add_var("units[1,MT]", 0, 3, 2.0, "integer")
    y = b.add_var("inst", 0, 1, 1.0, "binary")
    z = b.add_var("flow", -np.inf, np.inf, 0.0)
    b.add_row([(x, 1.0), (y, -2.0), (z, 0.5)], ">=", 1.0, "r0")
    p = b.build()
    text = to_lp_text(p)
    for token in ("Minimize", "Subject To", "Bounds", "General", "Binary", "End", "free"):
        assert token in text
    dump_lp(p, tmp_path / "m.lp")
    assert (tmp_path / "m.lp").read_text() == text


# -- properties ----------------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_weak_and_strong_duality(seed):
    p = random_lp(np.random.default_rng(seed))
    sol = simplex(p)
    assert sol.status == "optimal"
    assert p.max_violation(sol.x) <= 1e-8
    bound = lagrangian_bound(p, sol.duals)
    assert bound <= sol.objective + 1e-6 * (1 + abs(sol.objective))
    assert sol.objective - bound <= 1e-6 * (1 + abs(sol.objective))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_presolve_preserves_objective(seed):
    rng = np.random.default_rng(seed)
    p = random_lp(rng, 6, 5)
    lo, hi = p.lo.copy(), p.hi.copy()
    k = int(rng.integers(0, 6))
    mid = 0.5 * (lo[k] + hi[k])
    lo[k] = hi[k] = mid
    q = p.with_bounds(lo, hi)
    direct = simplex(q)
    red, rec = presolve(q)
    via = rec.postsolve(simplex(red)) if red.n_vars else None
    if direct.status != "optimal":
        assert via is None or via.status != "optimal"
        return
    assert via.objective == pytest.approx(direct.objective, abs=1e-9 * (1 + abs(direct.objective)))
    assert via.x[k] == mid


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_milp_bit_identical_reruns(seed):
    p = random_milp(np.random.default_rng(seed), n_bin=6)
    a, b = solve_milp(p), solve_milp(p)
    assert a.status == b.status
    if a.x is not None:
        assert np.array_equal(a.x, b.x)
        assert math.isclose(a.objective, b.objective, rel_tol=0, abs_tol=0)
