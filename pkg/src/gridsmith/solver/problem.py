"""Problem containers for the LP / MILP solvers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

SENSES = ("<=", "=", ">=")
KINDS = ("continuous", "integer", "binary")


class ProblemError(ValueError):
    """Raised for malformed problem data at construction time."""


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """Sparse LP ``min c.x + offset`` s.t. ``A x (<=|=|>=) b``, ``lo <= x <= hi``.

    ``A`` is stored in CSR form; use :meth:`from_triplets` to build one from
    ``(row, col, coeff)`` triplets.
    """

    c: np.ndarray
    A: sp.csr_matrix
    senses: tuple
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    var_names: tuple = ()
    row_names: tuple = ()
    offset: float = 0.0
    sense: str = "min"

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        n = c.size
        A = sp.csr_matrix(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        m = b.size
        if A.shape != (m, n):
            raise ProblemError(f"A has shape {A.shape}, expected {(m, n)}")
        lo = np.broadcast_to(np.asarray(self.lo, dtype=float), (n,)).copy()
        hi = np.broadcast_to(np.asarray(self.hi, dtype=float), (n,)).copy()
        senses = tuple(self.senses)
        if len(senses) != m or any(s not in SENSES for s in senses):
            raise ProblemError("one sense in {'<=', '=', '>='} required per row")
        if not np.all(np.isfinite(b)):
            raise ProblemError("rhs must be finite")
        if not np.all(np.isfinite(c)):
            raise ProblemError("objective coefficients must be finite")
        if np.any(lo > hi):
            j = int(np.flatnonzero(lo > hi)[0])
            raise ProblemError(f"variable {j} has lo > hi")
        if np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise ProblemError("bounds lo=+inf or hi=-inf are not allowed")
        if self.sense not in ("min", "max"):
            raise ProblemError("sense must be 'min' or 'max'")
        A.sort_indices()
        names = tuple(self.var_names) or tuple(f"x{j}" for j in range(n))
        rnames = tuple(self.row_names) or tuple(f"r{i}" for i in range(m))
        if len(names) != n or len(rnames) != m:
            raise ProblemError("name lists must match problem dimensions")
        for attr, val in (("c", c), ("A", A), ("senses", senses), ("b", b),
                          ("lo", lo), ("hi", hi), ("var_names", names),
                          ("row_names", rnames), ("offset", float(self.offset))):
            object.__setattr__(self, attr, val)
        for arr in (c, b, lo, hi):
            arr.setflags(write=False)

    @classmethod
    def from_triplets(cls, c, triplets, senses, b, lo=0.0, hi=np.inf, **kw):
        """Build from ``(row, col, coeff)`` triplets; duplicates are an error."""
        c = np.asarray(c, dtype=float)
        b = np.asarray(b, dtype=float)
        if len(triplets):
            rows, cols, vals = (np.asarray(v) for v in zip(*triplets))
        else:
            rows = cols = np.zeros(0, dtype=int)
            vals = np.zeros(0)
        keys = rows.astype(np.int64) * max(c.size, 1) + cols
        if np.unique(keys).size != keys.size:
            raise ProblemError("duplicate (row, col) triplet")
        A = sp.coo_matrix((vals.astype(float), (rows, cols)), shape=(b.size, c.size))
        return cls(c=c, A=A.tocsr(), senses=senses, b=b, lo=lo, hi=hi, **kw)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.b.size

    def min_form_c(self) -> np.ndarray:
        """Objective coefficients as a minimisation."""
        return -self.c if self.sense == "max" else self.c

    def objective(self, x) -> float:
        return float(self.c @ np.asarray(x, dtype=float) + self.offset)

    def row_activity(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float)

    def max_violation(self, x) -> float:
        """Largest scaled violation ``viol / (1 + |rhs|)`` over rows and bounds."""
        x = np.asarray(x, dtype=float)
        act = self.row_activity(x)
        s = np.array(self.senses)
        viol = np.zeros(self.n_rows)
        le = s == "<="
        ge = s == ">="
        eq = s == "="
        viol[le] = np.maximum(act[le] - self.b[le], 0.0)
        viol[ge] = np.maximum(self.b[ge] - act[ge], 0.0)
        viol[eq] = np.abs(act[eq] - self.b[eq])
        viol = viol / (1.0 + np.abs(self.b))
        bviol = np.maximum(self.lo - x, 0.0) + np.maximum(x - self.hi, 0.0)
        worst = 0.0
        if viol.size:
            worst = float(viol.max())
        if bviol.size:
            worst = max(worst, float(bviol.max()))
        return worst

    def with_bounds(self, lo, hi) -> "LinearProgram":
        return LinearProgram(self.c, self.A, self.senses, self.b, lo, hi,
                             self.var_names, self.row_names, self.offset, self.sense)


@dataclass(frozen=True, eq=False)
class MilpProblem:
    """A :class:`LinearProgram` plus a kind per variable."""

    lp: LinearProgram
    kinds: tuple

    def __post_init__(self):
        kinds = tuple(self.kinds)
        if len(kinds) != self.lp.n_vars or any(k not in KINDS for k in kinds):
            raise ProblemError("one kind in {continuous, integer, binary} per variable")
        for j, k in enumerate(kinds):
            if k == "binary" and (self.lp.lo[j] < 0 or self.lp.hi[j] > 1):
                raise ProblemError(f"binary variable {self.lp.var_names[j]} has bounds outside [0, 1]")
        object.__setattr__(self, "kinds", kinds)

    @property
    def integer_mask(self) -> np.ndarray:
        return np.array([k != "continuous" for k in self.kinds], dtype=bool)


@dataclass
class Solution:
    status: str  # optimal | infeasible | unbounded | node_limit | iteration_limit
    x: Optional[np.ndarray] = None
    objective: float = np.nan
    duals: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    dual_objective: float = np.nan
    bound: float = np.nan
    gap: float = np.nan
    iterations: int = 0
    nodes: int = 0
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


class ProblemBuilder:
    """Incremental model construction used by the plan assemblies.

    Coefficients given twice for the same (row, column) pair are summed, so
    the resulting :class:`LinearProgram` never carries duplicate triplets.
    """

    def __init__(self):
        self.names: list[str] = []
        self.lo: list[float] = []
        self.hi: list[float] = []
        self.cost: list[float] = []
        self.kinds: list[str] = []
        self._rows: list[int] = []
        self._cols: list[int] = []
        self._vals: list[float] = []
        self.senses: list[str] = []
        self.rhs: list[float] = []
        self.row_names: list[str] = []
        self.offset = 0.0

    def add_var(self, name, lo=0.0, hi=np.inf, cost=0.0, kind="continuous") -> int:
        self.names.append(name)
        self.lo.append(float(lo))
        self.hi.append(float(hi))
        self.cost.append(float(cost))
        self.kinds.append(kind)
        return len(self.names) - 1

    def add_cost(self, j: int, value: float):
        self.cost[j] += float(value)

    def add_row(self, coeffs, sense, rhs, name=None) -> int:
        """``coeffs`` is a mapping or an iterable of ``(col, value)`` pairs."""
        items = coeffs.items() if hasattr(coeffs, "items") else coeffs
        merged: dict[int, float] = {}
        for j, v in items:
            merged[j] = merged.get(j, 0.0) + float(v)
        i = len(self.rhs)
        for j, v in merged.items():
            if v != 0.0:
                self._rows.append(i)
                self._cols.append(j)
                self._vals.append(v)
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        self.row_names.append(name or f"r{i}")
        return i

    @property
    def n_vars(self) -> int:
        return len(self.names)

    def build_lp(self) -> LinearProgram:
        n, m = len(self.names), len(self.rhs)
        A = sp.csr_matrix((self._vals, (self._rows, self._cols)), shape=(m, n))
        return LinearProgram(c=np.array(self.cost), A=A, senses=tuple(self.senses),
                             b=np.array(self.rhs), lo=np.array(self.lo), hi=np.array(self.hi),
                             var_names=tuple(self.names), row_names=tuple(self.row_names),
                             offset=self.offset)

    def build(self) -> MilpProblem:
        return MilpProblem(self.build_lp(), tuple(self.kinds))


def as_milp(problem) -> MilpProblem:
    if isinstance(problem, MilpProblem):
        return problem
    return MilpProblem(problem, ("continuous",) * problem.n_vars)


__all__ = ["LinearProgram", "MilpProblem", "Solution", "ProblemBuilder", "ProblemError",
           "as_milp"]
