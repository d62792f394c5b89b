"""Dense two-phase primal simplex.

Entering columns follow the most negative reduced cost; after a run of
degenerate pivots the solver switches to Bland's rule until the objective
moves again, which rules out cycling. ``rule="bland"`` uses Bland's rule
throughout.

Small and self-contained: the capacity polytopes handled by the learning
modules have at most a few hundred variables. Every program is reduced to
``min c.y  s.t.  G y <= h, y >= 0``; phase one uses a single auxiliary
column (Chvátal's auxiliary problem), so the number of artificial pivots does
not grow with the number of violated rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .exceptions import DomainError, InfeasibleError, MalformedInputError, ResourceError

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-10
OPT_TOL = 1e-9
MAX_PIVOTS = 10**6
DEGENERATE_STREAK = 30
RULES = ("dantzig", "bland")

_SENSES = ("<=", ">=", "=")


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``minimize objective @ x`` subject to ``A x (sense) rhs`` and bounds.

    ``senses`` holds one of ``"<="``, ``">="``, ``"="`` per row. Bounds
    default to ``0 <= x < inf``; use ``-np.inf`` for free variables.
    """

    objective: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray = None
    upper: np.ndarray = None
    names: tuple[str, ...] = None
    row_labels: tuple[str, ...] = field(default=None, repr=False)

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        nvar = c.size
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, nvar)
        if A.ndim != 2 or A.shape[1] != nvar:
            raise DomainError(
                f"constraint matrix must have {nvar} columns, got shape {A.shape}")
        rhs = np.asarray(self.rhs, dtype=float).ravel()
        senses = tuple(self.senses)
        if rhs.size != A.shape[0] or len(senses) != A.shape[0]:
            raise DomainError("rhs and senses must have one entry per constraint row")
        bad = [s for s in senses if s not in _SENSES]
        if bad:
            raise MalformedInputError(f"unknown constraint relation {bad[0]!r}")
        lower = np.zeros(nvar) if self.lower is None else np.asarray(self.lower, dtype=float).ravel()
        upper = np.full(nvar, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).ravel()
        if lower.size != nvar or upper.size != nvar:
            raise DomainError("bounds must have one entry per variable")
        if np.any(lower > upper):
            j = int(np.flatnonzero(lower > upper)[0])
            raise DomainError(f"variable {j} has lower bound above upper bound")
        if np.any(np.isposinf(lower)) or np.any(np.isneginf(upper)):
            raise DomainError("lower bounds must be < +inf and upper bounds > -inf")
        names = tuple(self.names) if self.names is not None else tuple(f"x{j}" for j in range(nvar))
        if len(names) != nvar:
            raise DomainError("names must have one entry per variable")
        for attr, val in (("objective", c), ("A", A), ("senses", senses), ("rhs", rhs),
                          ("lower", lower), ("upper", upper), ("names", names)):
            object.__setattr__(self, attr, val)

    @classmethod
    def from_rows(cls, objective, constraints=(), bounds=None, names=None, row_labels=None):
        """Build from ``[(row, relation, rhs), ...]`` and optional ``[(lo, hi), ...]`` bounds."""
        c = np.asarray(objective, dtype=float).ravel()
        rows = [np.asarray(r, dtype=float).ravel() for r, _, _ in constraints]
        for r in rows:
            if r.size != c.size:
                raise DomainError(f"constraint row has {r.size} entries, expected {c.size}")
        A = np.array(rows).reshape(len(rows), c.size)
        lower = upper = None
        if bounds is not None:
            lo_hi = np.array([(-np.inf if lo is None else lo, np.inf if hi is None else hi)
                              for lo, hi in bounds], dtype=float).reshape(-1, 2)
            lower, upper = lo_hi[:, 0], lo_hi[:, 1]
        return cls(c, A, tuple(s for _, s, _ in constraints),
                   np.array([b for _, _, b in constraints], dtype=float),
                   lower, upper, names, row_labels)

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def constraints(self) -> list[tuple[np.ndarray, str, float]]:
        return [(self.A[k], self.senses[k], float(self.rhs[k])) for k in range(self.A.shape[0])]

    def with_objective(self, objective) -> "LinearProgram":
        return LinearProgram(objective, self.A, self.senses, self.rhs, self.lower,
                             self.upper, self.names, self.row_labels)

    def max_violation(self, x) -> float:
        """Largest amount by which ``x`` breaks a row or a bound (0 if feasible)."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        if self.A.shape[0]:
            ax = self.A @ x
            s = np.array(self.senses)
            le = np.where(s == "<=", ax - self.rhs, 0.0)
            ge = np.where(s == ">=", self.rhs - ax, 0.0)
            eq = np.where(s == "=", np.abs(ax - self.rhs), 0.0)
            worst = max(worst, float(np.max([le.max(), ge.max(), eq.max()])))
        worst = max(worst, float(np.max(self.lower - x, initial=0.0)),
                    float(np.max(x - self.upper, initial=0.0)))
        return worst


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: Status
    x: np.ndarray | None
    objective: float | None
    pivots: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _standardize(lp: LinearProgram):
    """Map ``lp`` to ``min c'y, G y <= h, y >= 0`` with ``x = offset + T y``."""
    nvar = lp.n_vars
    cols, offset, ub_rows = [], np.zeros(nvar), []
    for j in range(nvar):
        lo, hi = lp.lower[j], lp.upper[j]
        if np.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                ub_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    T = np.zeros((nvar, len(cols)))
    for k, (j, sgn) in enumerate(cols):
        T[j, k] = sgn

    A = lp.A @ T
    b = lp.rhs - lp.A @ offset
    s = np.array(lp.senses, dtype=object)
    blocks_G = [A[s == "<="], -A[s == ">="], A[s == "="], -A[s == "="]]
    blocks_h = [b[s == "<="], -b[s == ">="], b[s == "="], -b[s == "="]]
    if ub_rows:
        U = np.zeros((len(ub_rows), len(cols)))
        for r, (k, cap) in enumerate(ub_rows):
            U[r, k] = 1.0
        blocks_G.append(U)
        blocks_h.append(np.array([cap for _, cap in ub_rows]))
    G = np.vstack([blk.reshape(-1, len(cols)) for blk in blocks_G])
    h = np.concatenate(blocks_h)
    return lp.objective @ T, G, h, T, offset


class _Tableau:
    def __init__(self, G, h, n_struct):
        m = G.shape[0]
        self.m = m
        self.n_struct = n_struct
        self.aux = n_struct + m
        ncol = n_struct + m + 1
        tab = np.zeros((m + 1, ncol + 1))
        tab[:m, :n_struct] = G
        tab[np.arange(m), n_struct + np.arange(m)] = 1.0
        tab[:m, self.aux] = -1.0
        tab[:m, -1] = h
        self.tab = tab
        self.basis = np.arange(n_struct, n_struct + m)
        self.active = np.ones(ncol, dtype=bool)
        self.pivots = 0

    def price(self, cost):
        m = self.m
        cb = cost[self.basis]
        self.tab[m, :-1] = cost - cb @ self.tab[:m, :-1]
        self.tab[m, -1] = -(cb @ self.tab[:m, -1])

    def pivot(self, r, q):
        if self.pivots >= MAX_PIVOTS:
            raise ResourceError(f"simplex pivot cap of {MAX_PIVOTS} reached")
        tab = self.tab
        tab[r] /= tab[r, q]
        col = tab[:, q].copy()
        col[r] = 0.0
        nz = np.flatnonzero(col)
        if nz.size > tab.shape[0] // 3:
            tab -= np.outer(col, tab[r])
        elif nz.size:
            tab[nz] -= np.outer(col[nz], tab[r])
        tab[:, q] = 0.0
        tab[r, q] = 1.0
        self.basis[r] = q
        self.pivots += 1

    def run(self, prefer_leaving: int | None = None, rule: str = "dantzig") -> str:
        """Pivot until optimal or unbounded."""
        m, tab = self.m, self.tab
        streak = 0
        while True:
            rc = tab[m, :-1]
            cand = np.flatnonzero((rc < -OPT_TOL) & self.active)
            if cand.size == 0:
                return "optimal"
            if rule == "bland" or streak >= DEGENERATE_STREAK:
                q = int(cand[0])
            else:
                q = int(cand[np.argmin(rc[cand])])
            col = tab[:m, q]
            pos = np.flatnonzero(col > PIVOT_TOL)
            if pos.size == 0:
                return "unbounded"
            ratios = tab[pos, -1] / col[pos]
            best = ratios.min()
            tied = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
            if prefer_leaving is not None and np.any(self.basis[tied] == prefer_leaving):
                r = int(tied[self.basis[tied] == prefer_leaving][0])
            else:
                r = int(tied[np.argmin(self.basis[tied])])
            streak = streak + 1 if best <= PIVOT_TOL else 0
            self.pivot(r, q)
            if prefer_leaving is not None and prefer_leaving not in self.basis:
                return "optimal"


def solve(lp: LinearProgram, rule: str = "dantzig") -> LpSolution:
    """Solve ``lp``; statuses are OPTIMAL, INFEASIBLE (phase-one optimum above 1e-7) or UNBOUNDED."""
    if not isinstance(lp, LinearProgram):
        raise MalformedInputError(f"expected a LinearProgram, got {type(lp).__name__}")
    if rule not in RULES:
        raise DomainError(f"pivot rule must be one of {RULES}, got {rule!r}")
    c, G, h, T, offset = _standardize(lp)
    p = c.size
    tb = _Tableau(G, h, p)
    m = tb.m

    if m and h.min() < 0:
        r0 = int(np.argmin(h))
        tb.pivot(r0, tb.aux)
        phase1 = np.zeros(p + m + 1)
        phase1[tb.aux] = 1.0
        tb.price(phase1)
        tb.run(prefer_leaving=tb.aux, rule=rule)
        where = np.flatnonzero(tb.basis == tb.aux)
        if where.size:
            r = int(where[0])
            if tb.tab[r, -1] > FEAS_TOL:
                return LpSolution(Status.INFEASIBLE, None, None, tb.pivots)
            row = tb.tab[r, :-1].copy()
            row[tb.aux] = 0.0
            nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
            if nz.size:
                tb.pivot(r, int(nz[0]))
            else:
                tb.tab[r, :] = 0.0
                tb.basis[r] = tb.aux
    tb.active[tb.aux] = False
    tb.tab[:m, tb.aux] = 0.0

    cost = np.zeros(p + m + 1)
    cost[:p] = c
    tb.price(cost)
    outcome = tb.run(rule=rule)
    if outcome == "unbounded":
        return LpSolution(Status.UNBOUNDED, None, None, tb.pivots)

    y = np.zeros(p + m + 1)
    vals = tb.tab[:m, -1]
    y[tb.basis] = np.maximum(vals, 0.0)
    y[tb.aux] = 0.0
    x = offset + T @ y[:p]
    return LpSolution(Status.OPTIMAL, x, float(lp.objective @ x), tb.pivots)


def probe_solutions(lp: LinearProgram, var_index: int) -> tuple[LpSolution, LpSolution]:
    """Solutions minimizing and maximizing variable ``var_index`` over the feasible set."""
    if not 0 <= var_index < lp.n_vars:
        raise DomainError(f"variable index {var_index} out of range")
    e = np.zeros(lp.n_vars)
    e[var_index] = 1.0
    lo = solve(lp.with_objective(e))
    if lo.status is Status.INFEASIBLE:
        raise InfeasibleError("cannot probe bounds of an infeasible program")
    hi = solve(lp.with_objective(-e))
    return lo, hi


def probe_bounds(lp: LinearProgram, var_index: int) -> tuple[float, float]:
    """Feasible interval of one coordinate; infinite ends mean unbounded directions."""
    lo, hi = probe_solutions(lp, var_index)
    low = lo.x[var_index] if lo.is_optimal else -np.inf
    high = hi.x[var_index] if hi.is_optimal else np.inf
    return float(low), float(high)


def vertex_enumeration(lp: LinearProgram) -> LpSolution:
    """Brute-force optimum over all basic solutions; only for tiny bounded programs.

    Used as an independent oracle in tests. Unboundedness is not detected.
    """
    nvar = lp.n_vars
    rows, rhs = [], []
    for a, s, b in lp.constraints:
        rows.append(a)
        rhs.append(b)
    for j in range(nvar):
        for bound in (lp.lower[j], lp.upper[j]):
            if np.isfinite(bound):
                e = np.zeros(nvar)
                e[j] = 1.0
                rows.append(e)
                rhs.append(bound)
    rows, rhs = np.array(rows).reshape(-1, nvar), np.array(rhs)
    best = None
    for combo in combinations(range(len(rows)), nvar):
        M = rows[list(combo)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, rhs[list(combo)])
        if lp.max_violation(x) > FEAS_TOL:
            continue
        val = float(lp.objective @ x)
        if best is None or val < best[0] - 1e-12:
            best = (val, x)
    if best is None:
        return LpSolution(Status.INFEASIBLE, None, None)
    return LpSolution(Status.OPTIMAL, best[1], best[0])

