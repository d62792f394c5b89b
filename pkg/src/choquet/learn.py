"""Capacity identification from preference information by linear programming.

Every piece of decision-maker information is a linear inequality in the
capacity values ``nu``: Shapley values, interaction indices and Choquet
integrals of fixed profiles are all linear functionals of ``nu``. Rows are
assembled over the full ``2**n`` set-function vector and then mapped to the
chosen variable space (capacity values, or Möbius coefficients under
k-additivity / interaction-group restrictions).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .capacity import (
    Capacity,
    IndexReport,
    MobiusRepresentation,
    _superset_sum_inplace,
    index_report,
    interaction_functional,
    members,
    popcounts,
    repair,
    require_valid,
    shapley_functional,
    to_mask,
    zeta,
)
from .exceptions import DomainError, MalformedInputError
from .integral import choquet_coefficients, choquet_many
from .lp import FEAS_TOL, LinearProgram, LpSolution, Status, solve

DEFAULT_DELTA = 1e-3
FIT_TOL = FEAS_TOL
# identify() switches to lazy row generation above this many preference rows
LAZY_ROW_THRESHOLD = 150
LAZY_BATCH = 60

PREFERENCE_KINDS = ("strict", "indifferent")
SHAPLEY_KINDS = ("more_important", "equal")
INTERACTION_KINDS = ("complementary", "redundant", "stronger", "similar")
OBJECTIVES = ("feasibility", "min_total_slack", "max_min_slack")


@dataclass(frozen=True)
class Deltas:
    shapley: float = DEFAULT_DELTA
    interaction: float = DEFAULT_DELTA
    learning_set: float = DEFAULT_DELTA

    def __post_init__(self):
        for name in ("shapley", "interaction", "learning_set"):
            if not getattr(self, name) > 0:
                raise DomainError(f"delta {name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class Preference:
    better: int
    worse: int
    kind: str = "strict"


@dataclass(frozen=True)
class ShapleyComparison:
    i: int
    j: int
    kind: str = "more_important"


@dataclass(frozen=True)
class InteractionStatement:
    """``kind`` is complementary/redundant for ``pair`` alone, stronger/similar against ``other``."""

    pair: tuple[int, int]
    kind: str
    other: tuple[int, int] | None = None


@dataclass(frozen=True, eq=False)
class PreferenceDataset:
    """Alternatives and the decision maker's statements about them.

    ``alternatives`` are already-mapped profiles (one row per alternative).
    The optional categorical view (``levels``: ordered labels per criterion,
    ``labels``: one label tuple per alternative) is what joint learning uses;
    ``alternatives`` may then be ``None``.
    """

    n: int
    alternatives: np.ndarray | None = None
    preferences: tuple[Preference, ...] = ()
    shapley_comparisons: tuple[ShapleyComparison, ...] = ()
    interaction_statements: tuple[InteractionStatement, ...] = ()
    veto: frozenset = frozenset()
    favour: frozenset = frozenset()
    deltas: Deltas = field(default_factory=Deltas)
    levels: tuple[tuple, ...] | None = None
    labels: tuple[tuple, ...] | None = None

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise MalformedInputError(f"n must be a positive integer, got {n!r}")
        alts = self.alternatives
        if alts is not None:
            alts = np.asarray(alts, dtype=float)
            if alts.ndim != 2 or alts.shape[1] != n:
                raise MalformedInputError(f"alternatives must have shape (m, {n}), got {alts.shape}")
            alts.setflags(write=False)
            object.__setattr__(self, "alternatives", alts)
        object.__setattr__(self, "preferences", tuple(self.preferences))
        object.__setattr__(self, "shapley_comparisons", tuple(self.shapley_comparisons))
        object.__setattr__(self, "interaction_statements", tuple(self.interaction_statements))
        object.__setattr__(self, "veto", frozenset(int(i) for i in self.veto))
        object.__setattr__(self, "favour", frozenset(int(i) for i in self.favour))
        if self.levels is not None:
            levels = tuple(tuple(lv) for lv in self.levels)
            if len(levels) != n:
                raise MalformedInputError(f"levels must list one order per criterion ({n})")
            object.__setattr__(self, "levels", levels)
        if self.labels is not None:
            labels = tuple(tuple(x) for x in self.labels)
            if any(len(x) != n for x in labels):
                raise MalformedInputError("every labelled alternative needs one label per criterion")
            if self.levels is not None:
                for x in labels:
                    for i, lab in enumerate(x):
                        if lab not in self.levels[i]:
                            raise MalformedInputError(
                                f"label {lab!r} is not a declared level of criterion {i}")
            object.__setattr__(self, "labels", labels)
        m = self.n_alternatives
        for k, p in enumerate(self.preferences):
            if p.kind not in PREFERENCE_KINDS:
                raise MalformedInputError(f"preferences[{k}].kind must be strict or indifferent")
            if not (0 <= p.better < m and 0 <= p.worse < m):
                raise DomainError(f"preferences[{k}] refers to an alternative outside 0..{m - 1}")
        for k, s in enumerate(self.shapley_comparisons):
            if s.kind not in SHAPLEY_KINDS:
                raise MalformedInputError(f"shapley_comparisons[{k}].kind is invalid: {s.kind!r}")
            self._check_criteria((s.i, s.j), f"shapley_comparisons[{k}]", distinct=True)
        for k, st in enumerate(self.interaction_statements):
            if st.kind not in INTERACTION_KINDS:
                raise MalformedInputError(f"interaction_statements[{k}].kind is invalid: {st.kind!r}")
            self._check_criteria(st.pair, f"interaction_statements[{k}]", distinct=True)
            if st.kind in ("stronger", "similar"):
                if st.other is None:
                    raise MalformedInputError(f"interaction_statements[{k}] needs a second pair")
                self._check_criteria(st.other, f"interaction_statements[{k}]", distinct=True)
        self._check_criteria(self.veto, "veto")
        self._check_criteria(self.favour, "favour")

    def _check_criteria(self, idx: Iterable[int], where: str, distinct: bool = False):
        idx = list(idx)
        if any(not 0 <= i < self.n for i in idx):
            raise DomainError(f"{where} names a criterion outside 0..{self.n - 1}")
        if distinct and len(set(idx)) != len(idx):
            raise DomainError(f"{where} needs two distinct criteria")

    @property
    def n_alternatives(self) -> int:
        if self.alternatives is not None:
            return self.alternatives.shape[0]
        return len(self.labels) if self.labels is not None else 0

    def level_indices(self) -> np.ndarray:
        """Labels converted to per-criterion level positions, shape (m, n)."""
        if self.levels is None or self.labels is None:
            raise DomainError("dataset has no categorical levels/labels")
        pos = [{lab: k for k, lab in enumerate(lv)} for lv in self.levels]
        return np.array([[pos[i][x[i]] for i in range(self.n)] for x in self.labels],
                        dtype=np.int64).reshape(-1, self.n)

    def with_alternatives(self, alternatives) -> "PreferenceDataset":
        return replace(self, alternatives=np.asarray(alternatives, dtype=float))


class Objective(str, enum.Enum):
    FEASIBILITY = "feasibility"
    MIN_TOTAL_SLACK = "min_total_slack"
    MAX_MIN_SLACK = "max_min_slack"


@dataclass(frozen=True)
class IdentificationConfig:
    """How to identify.

    ``k_additive`` limits Möbius support to subsets of size <= k; ``groups``
    (a partition of the criteria) limits it to subsets inside one block. Either
    switches the LP variables to Möbius coefficients.
    """

    k_additive: int | None = None
    objective: str = "feasibility"
    deltas: Deltas | None = None
    groups: tuple[tuple[int, ...], ...] | None = None
    # under max_min_slack, two-sided rows (equal, similar, indifferent) ask for
    # this fraction of the common margin
    indifference_weight: float = 1.0

    def __post_init__(self):
        if not self.indifference_weight > 0:
            raise DomainError("indifference_weight must be > 0")
        obj = self.objective.replace("-", "_")
        if obj == "min_slack":
            obj = "min_total_slack"
        if obj not in OBJECTIVES:
            raise DomainError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        object.__setattr__(self, "objective", obj)
        if self.k_additive is not None and self.k_additive < 1:
            raise DomainError(f"k_additive must be >= 1, got {self.k_additive}")
        if self.groups is not None:
            object.__setattr__(self, "groups", tuple(tuple(sorted(g)) for g in self.groups))


class LearnStatus(str, enum.Enum):
    FEASIBLE_EXACT = "FeasibleExact"
    INFEASIBLE_MIN_SLACK = "InfeasibleMinSlack"


@dataclass(frozen=True)
class ConstraintSlack:
    label: str
    slack: float


@dataclass(frozen=True, eq=False)
class LearnOutcome:
    status: LearnStatus
    capacity: Capacity
    total_slack: float
    slacks: tuple[ConstraintSlack, ...]
    index_report: IndexReport

    @property
    def feasible(self) -> bool:
        return self.status is LearnStatus.FEASIBLE_EXACT


@dataclass(frozen=True)
class FitReport:
    count: int
    violations: tuple[tuple[int, float], ...]  # (preference index, integral difference)


# --------------------------------------------------------------------------
# row assembly in set-function coordinates
# --------------------------------------------------------------------------

@dataclass
class _Rows:
    """Linear rows over the 2**n set-function vector; ``soft`` rows are DM information."""

    n: int
    coef: list = field(default_factory=list)
    sense: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    label: list = field(default_factory=list)
    soft: list = field(default_factory=list)
    weight: list = field(default_factory=list)

    def add(self, c, sense, b, label, soft, weight=1.0):
        self.coef.append(np.asarray(c, dtype=float))
        self.sense.append(sense)
        self.rhs.append(float(b))
        self.label.append(label)
        self.soft.append(soft)
        self.weight.append(weight)

    def matrix(self):
        C = np.array(self.coef).reshape(len(self.coef), 1 << self.n)
        return (C, np.array(self.sense, dtype=object), np.array(self.rhs),
                np.array(self.soft, dtype=bool), np.array(self.weight))


def forced_values(data: PreferenceDataset) -> dict[int, float]:
    """Subsets pinned by veto (value 0) and favour (value 1) declarations."""
    n = data.n
    forced: dict[int, float] = {}
    for a in range(1 << n):
        zero = any(not a >> i & 1 for i in data.veto)
        one = any(a >> i & 1 for i in data.favour)
        if zero and one:
            raise DomainError(
                f"veto/favour declarations contradict: nu({list(members(a))}) "
                "would have to be both 0 and 1")
        if zero:
            forced[a] = 0.0
        elif one:
            forced[a] = 1.0
    return forced


def _dm_rows(data: PreferenceDataset, deltas: Deltas, rows: _Rows, tw: float = 1.0) -> None:
    n = data.n
    for k, s in enumerate(data.shapley_comparisons):
        diff = shapley_functional(n, s.i) - shapley_functional(n, s.j)
        tag = f"shapley[{k}] {s.i} vs {s.j}"
        if s.kind == "more_important":
            rows.add(diff, ">=", deltas.shapley, f"{tag} more important", True)
        else:
            rows.add(diff, "<=", deltas.shapley, f"{tag} equal (upper)", True, tw)
            rows.add(diff, ">=", -deltas.shapley, f"{tag} equal (lower)", True, tw)
    for k, st in enumerate(data.interaction_statements):
        ij = interaction_functional(n, st.pair)
        tag = f"interaction[{k}] {st.pair}"
        if st.kind == "complementary":
            rows.add(ij, ">=", 0.0, f"{tag} complementary (lower)", True)
            rows.add(ij, "<=", 1.0, f"{tag} complementary (upper)", True)
        elif st.kind == "redundant":
            rows.add(ij, ">=", -1.0, f"{tag} redundant (lower)", True)
            rows.add(ij, "<=", 0.0, f"{tag} redundant (upper)", True)
        else:
            diff = ij - interaction_functional(n, st.other)
            tag = f"{tag} vs {st.other}"
            if st.kind == "stronger":
                rows.add(diff, ">=", deltas.interaction, f"{tag} stronger", True)
            else:
                rows.add(diff, "<=", deltas.interaction, f"{tag} similar (upper)", True, tw)
                rows.add(diff, ">=", -deltas.interaction, f"{tag} similar (lower)", True, tw)
    if data.preferences:
        if data.alternatives is None:
            raise DomainError("preferences need numeric alternatives (apply value functions first)")
        coefs = choquet_coefficients(data.alternatives, n)
        for k, p in enumerate(data.preferences):
            diff = coefs[p.better] - coefs[p.worse]
            tag = f"preference[{k}] {p.better} vs {p.worse}"
            if p.kind == "strict":
                rows.add(diff, ">=", deltas.learning_set, f"{tag} strict", True)
            else:
                rows.add(diff, "<=", deltas.learning_set, f"{tag} indifferent (upper)", True, tw)
                rows.add(diff, ">=", -deltas.learning_set, f"{tag} indifferent (lower)", True, tw)


def _technical_rows(data: PreferenceDataset, rows: _Rows) -> None:
    n = data.n
    size = 1 << n
    for a in range(1, size):
        for i in members(a):
            c = np.zeros(size)
            c[a] = 1.0
            c[a ^ (1 << i)] -= 1.0
            rows.add(c, ">=", 0.0, f"monotone {list(members(a ^ (1 << i)))} <= {list(members(a))}",
                     False)
    for a, val in sorted(forced_values(data).items()):
        if a in (0, size - 1):
            continue
        c = np.zeros(size)
        c[a] = 1.0
        kind = "veto" if val == 0.0 else "favour"
        rows.add(c, "=", val, f"{kind} nu({list(members(a))}) = {val:g}", False)


@dataclass(frozen=True, eq=False)
class _VariableSpace:
    """Map from set-function rows to LP columns."""

    n: int
    subsets: tuple[int, ...]
    mobius: bool

    @classmethod
    def build(cls, n: int, cfg: IdentificationConfig) -> "_VariableSpace":
        size = 1 << n
        if cfg.k_additive is None and cfg.groups is None:
            return cls(n, tuple(range(1, size - 1)), False)
        k = cfg.k_additive if cfg.k_additive is not None else n
        if not 1 <= k <= n:
            raise DomainError(f"k_additive must lie in [1, {n}], got {k}")
        pc = popcounts(n)
        blocks = None
        if cfg.groups is not None:
            flat = sorted(i for g in cfg.groups for i in g)
            if flat != list(range(n)):
                raise DomainError(f"groups {cfg.groups} do not partition 0..{n - 1}")
            blocks = [to_mask(g) for g in cfg.groups]
        subs = [a for a in range(1, size) if pc[a] <= k
                and (blocks is None or any(a & b == a for b in blocks))]
        return cls(n, tuple(subs), True)

    @property
    def names(self) -> tuple[str, ...]:
        prefix = "m" if self.mobius else "nu"
        return tuple(f"{prefix}{{{','.join(map(str, members(a)))}}}" for a in self.subsets)

    def map_rows(self, C: np.ndarray, rhs: np.ndarray):
        """Rows over nu (2**n columns) -> rows over the LP variables, with adjusted rhs."""
        C = np.array(C, dtype=float)
        if self.mobius:
            for r in range(C.shape[0]):
                _superset_sum_inplace(C[r], self.n)
            return C[:, list(self.subsets)], rhs.copy()
        full = (1 << self.n) - 1
        return C[:, list(self.subsets)], rhs - C[:, full]

    def bounds(self):
        k = len(self.subsets)
        if self.mobius:
            return np.full(k, -np.inf), np.full(k, np.inf)
        return np.zeros(k), np.ones(k)

    def extra_rows(self):
        if not self.mobius:
            return np.zeros((0, len(self.subsets))), (), np.zeros(0)
        return np.ones((1, len(self.subsets))), ("=",), np.ones(1)

    def capacity_values(self, x: np.ndarray) -> np.ndarray:
        size = 1 << self.n
        v = np.zeros(size)
        v[list(self.subsets)] = x
        if self.mobius:
            return zeta(MobiusRepresentation(self.n, v)).values.copy()
        v[size - 1] = 1.0
        return v


@dataclass(frozen=True, eq=False)
class SoftSystem:
    """Hard rows plus soft rows (the ones allowed a slack) over bounded variables."""

    A: np.ndarray
    senses: np.ndarray
    rhs: np.ndarray
    soft: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    weights: np.ndarray | None = None  # per-row share of the common margin (max_min_slack)

    def margin_weights(self, idx) -> np.ndarray:
        return np.ones(len(idx)) if self.weights is None else self.weights[idx]


@dataclass(frozen=True, eq=False)
class _Compiled(SoftSystem):
    space: _VariableSpace = None
    labels: tuple[str, ...] = ()
    nu_rows: np.ndarray = None
    nu_rhs: np.ndarray = None


def _compile(data: PreferenceDataset, cfg: IdentificationConfig) -> _Compiled:
    if cfg.k_additive is not None and cfg.k_additive > data.n:
        raise DomainError(f"k_additive must lie in [1, {data.n}], got {cfg.k_additive}")
    deltas = cfg.deltas or data.deltas
    rows = _Rows(data.n)
    _technical_rows(data, rows)
    _dm_rows(data, deltas, rows, cfg.indifference_weight)
    C, senses, rhs, soft, weights = rows.matrix()
    space = _VariableSpace.build(data.n, cfg)
    A, b = space.map_rows(C, rhs)
    E, esense, eb = space.extra_rows()
    A = np.vstack([A, E])
    senses = np.concatenate([senses, np.array(esense, dtype=object)])
    b = np.concatenate([b, eb])
    soft = np.concatenate([soft, np.zeros(E.shape[0], dtype=bool)])
    weights = np.concatenate([weights, np.ones(E.shape[0])])
    labels = tuple(rows.label) + ("normalization sum m = 1",) * E.shape[0]
    keep = ~np.all(A == 0, axis=1) | soft
    trivially_ok = ~keep & _holds(np.zeros(A.shape[0]), senses, b)
    keep |= ~trivially_ok
    lower, upper = space.bounds()
    n_rows = C.shape[0]
    return _Compiled(A[keep], senses[keep], b[keep], soft[keep], lower, upper, weights[keep], space,
                     tuple(lbl for lbl, k in zip(labels, keep) if k),
                     C[soft[:n_rows]], rhs[soft[:n_rows]])


def _holds(ax, senses, b, tol=FEAS_TOL):
    return np.where(senses == ">=", ax >= b - tol,
                    np.where(senses == "<=", ax <= b + tol, np.abs(ax - b) <= tol))


def build_constraints(data: PreferenceDataset,
                      cfg: IdentificationConfig | None = None) -> LinearProgram:
    """The capacity polytope as a feasibility LP (zero objective).

    Variables are ``nu(A)`` for ``A`` other than ∅ and N, or Möbius
    coefficients when ``cfg`` asks for k-additivity or interaction groups.
    """
    cfg = cfg or IdentificationConfig()
    comp = _compile(data, cfg)
    lower, upper = comp.space.bounds()
    return LinearProgram(np.zeros(len(comp.space.subsets)), comp.A, tuple(comp.senses), comp.rhs,
                         lower, upper, comp.space.names, comp.labels)


def variable_index(lp: LinearProgram, subset, prefix: str = "nu") -> int:
    name = f"{prefix}{{{','.join(map(str, members(to_mask(subset))))}}}"
    try:
        return lp.names.index(name)
    except ValueError:
        raise DomainError(f"{name} is not a variable of this program") from None


# --------------------------------------------------------------------------
# solving
# --------------------------------------------------------------------------

def _assemble(comp: SoftSystem, soft_idx: np.ndarray, mode: str) -> LinearProgram:
    """LP with all hard rows plus the chosen soft rows, in the given objective mode."""
    hard = np.flatnonzero(~comp.soft)
    A_h, s_h, b_h = comp.A[hard], comp.senses[hard], comp.rhs[hard]
    A_s, s_s, b_s = comp.A[soft_idx], comp.senses[soft_idx], comp.rhs[soft_idx]
    nv = comp.A.shape[1]
    lower, upper = comp.lower, comp.upper
    k = soft_idx.size
    if mode == "feasibility":
        A = np.vstack([A_h, A_s])
        return LinearProgram(np.zeros(nv), A, tuple(s_h) + tuple(s_s),
                             np.concatenate([b_h, b_s]), lower, upper)
    if mode == "min_total_slack":
        sign = np.where(s_s == ">=", 1.0, -1.0)
        A = np.block([[A_h, np.zeros((A_h.shape[0], k))],
                      [A_s, np.diag(sign).reshape(k, k)]])
        c = np.concatenate([np.zeros(nv), np.ones(k)])
        return LinearProgram(c, A, tuple(s_h) + tuple(s_s), np.concatenate([b_h, b_s]),
                             np.concatenate([lower, np.zeros(k)]),
                             np.concatenate([upper, np.full(k, np.inf)]))
    # max_min_slack: one margin variable t, capped at 1
    sign = np.where(s_s == ">=", -1.0, 1.0) * comp.margin_weights(soft_idx)
    A = np.block([[A_h, np.zeros((A_h.shape[0], 1))], [A_s, sign[:, None]]])
    c = np.concatenate([np.zeros(nv), [-1.0]])
    return LinearProgram(c, A, tuple(s_h) + tuple(s_s), np.concatenate([b_h, b_s]),
                         np.concatenate([lower, [-np.inf]]), np.concatenate([upper, [1.0]]))


def _soft_residual(comp: SoftSystem, x: np.ndarray, margin: float = 0.0) -> np.ndarray:
    """Amount by which each soft row misses (with an extra required margin)."""
    idx = np.flatnonzero(comp.soft)
    ax = comp.A[idx] @ x
    s = comp.senses[idx]
    b = comp.rhs[idx]
    margin = margin * comp.margin_weights(idx)
    return np.where(s == ">=", b + margin - ax, ax - b + margin)


@dataclass(frozen=True)
class SoftSolution(LpSolution):
    # soft rows tight or violated at the solution, worst first and at most
    # LAZY_ROW_THRESHOLD of them: a seed for the next warm start
    binding: np.ndarray | None = None


def solve_soft(comp: SoftSystem, mode: str, lazy: bool = True,
               warm: np.ndarray | None = None) -> SoftSolution:
    """Solve in one of the three objective modes, optionally by lazy row generation.

    In the slack modes the returned ``x`` carries the slack (or margin)
    columns after the structural variables, in the order of the rows kept.
    ``warm`` (positions among the soft rows, e.g. a previous ``binding``)
    seeds the lazy row set; the optimum does not depend on it.
    """
    nv = comp.A.shape[1]
    soft_all = np.flatnonzero(comp.soft)

    def done(sol, pivots, x=None, margin=0.0):
        if not sol.is_optimal:
            return SoftSolution(sol.status, None, None, pivots)
        res = _soft_residual(comp, x, margin)
        binding = np.flatnonzero(res > -1e-9)
        binding = binding[np.argsort(-res[binding], kind="stable")][:LAZY_ROW_THRESHOLD]
        return SoftSolution(sol.status, sol.x, sol.objective, pivots, binding)

    if not lazy or soft_all.size <= LAZY_ROW_THRESHOLD:
        sol = solve(_assemble(comp, soft_all, mode))
        if not sol.is_optimal:
            return done(sol, sol.pivots)
        margin = sol.x[nv] if mode == "max_min_slack" else 0.0
        return done(sol, sol.pivots, sol.x[:nv], margin)
    chosen = np.zeros(soft_all.size, dtype=bool)
    if warm is not None:
        chosen[np.asarray(warm, dtype=np.int64)] = True
    pivots = 0
    while True:
        sol = solve(_assemble(comp, soft_all[chosen], mode))
        pivots += sol.pivots
        if not sol.is_optimal:
            return done(sol, pivots)
        x = sol.x[:nv]
        margin = sol.x[nv] if mode == "max_min_slack" else 0.0
        miss = _soft_residual(comp, x, margin)
        miss[chosen] = -np.inf
        bad = np.flatnonzero(miss > 1e-9)
        if bad.size == 0:
            return done(sol, pivots, x, margin)
        order = bad[np.argsort(-miss[bad], kind="stable")][:LAZY_BATCH]
        chosen[order] = True


def _finish(comp: _Compiled, x: np.ndarray, feasible: bool) -> LearnOutcome:
    n = comp.space.n
    values = repair(comp.space.capacity_values(x[: comp.A.shape[1]]), n)
    cap = Capacity(n, values)
    ax = comp.nu_rows @ values
    soft_senses = comp.senses[np.flatnonzero(comp.soft)]
    miss = np.where(soft_senses == ">=", comp.nu_rhs - ax, ax - comp.nu_rhs)
    miss = np.maximum(miss, 0.0)
    soft_labels = [lbl for lbl, s in zip(comp.labels, comp.soft) if s]
    slacks = tuple(ConstraintSlack(lbl, float(v)) for lbl, v in zip(soft_labels, miss))
    status = LearnStatus.FEASIBLE_EXACT if feasible else LearnStatus.INFEASIBLE_MIN_SLACK
    return LearnOutcome(status, cap, float(miss.sum()), slacks, index_report(cap))


def identify(data: PreferenceDataset, cfg: IdentificationConfig | None = None,
             lazy: bool = True) -> LearnOutcome:
    """Find a capacity compatible with ``data``.

    Tries the feasibility problem first; when it is infeasible, every
    decision-maker row gets a nonnegative slack and the total slack is
    minimized. With ``max_min_slack`` the smallest margin is maximized
    instead. ``lazy`` enables row generation for large learning sets (same
    optimum, far smaller tableaus).
    """
    cfg = cfg or IdentificationConfig()
    comp = _compile(data, cfg)
    if cfg.objective == "max_min_slack":
        sol = solve_soft(comp, "max_min_slack", lazy)
        if not sol.is_optimal:
            raise DomainError("technical constraints are infeasible")
        return _finish(comp, sol.x, feasible=sol.x[-1] >= -FEAS_TOL)
    if cfg.objective == "feasibility":
        sol = solve_soft(comp, "feasibility", lazy)
        if sol.is_optimal:
            return _finish(comp, sol.x, feasible=True)
    sol = solve_soft(comp, "min_total_slack", lazy)
    if not sol.is_optimal:
        raise DomainError("technical constraints are infeasible")
    nv = comp.A.shape[1]
    feasible = bool(sol.x[nv:].max(initial=0.0) <= FEAS_TOL)
    return _finish(comp, sol.x, feasible=feasible)


def polytope_probe(data: PreferenceDataset, subset, cfg: IdentificationConfig | None = None):
    """Extreme capacities minimizing and maximizing ``nu(subset)`` over the feasible polytope."""
    from .lp import probe_solutions

    cfg = cfg or IdentificationConfig()
    comp = _compile(data, cfg)
    lp = build_constraints(data, cfg)
    target = np.zeros(1 << data.n)
    target[to_mask(subset)] = 1.0
    obj, const = comp.space.map_rows(target[None, :], np.zeros(1))
    obj = obj[0]
    e_idx = np.flatnonzero(obj)
    if not comp.space.mobius and e_idx.size == 1:
        lo, hi = probe_solutions(lp, int(e_idx[0]))
    else:
        lo = solve(lp.with_objective(obj))
        hi = solve(lp.with_objective(-obj))
    caps = []
    for sol in (lo, hi):
        if not sol.is_optimal:
            raise DomainError("capacity polytope is empty or unbounded")
        caps.append(Capacity(data.n, repair(comp.space.capacity_values(sol.x), data.n)))
    return caps[0], caps[1]


def check_fit(capacity: Capacity, data: PreferenceDataset, tol: float = FIT_TOL) -> FitReport:
    """Preference statements whose integral difference misses its delta margin.

    Strict needs ``C(better) - C(worse) >= delta_LS``; indifferent needs
    ``|C(better) - C(worse)| <= delta_LS``. Margins are checked to ``tol``.
    """
    require_valid(capacity)
    if not data.preferences:
        return FitReport(0, ())
    if data.alternatives is None:
        raise DomainError("check_fit needs numeric alternatives")
    scores = choquet_many(capacity.values, data.alternatives)
    delta = data.deltas.learning_set
    bad = []
    for k, p in enumerate(data.preferences):
        d = float(scores[p.better] - scores[p.worse])
        ok = d >= delta - tol if p.kind == "strict" else abs(d) <= delta + tol
        if not ok:
            bad.append((k, d))
    return FitReport(len(bad), tuple(bad))


def preferences_from_scores(scores: Sequence[float], delta: float,
                            pairs: Iterable[tuple[int, int]] | None = None) -> list[Preference]:
    """Strict where the score gap exceeds ``delta``, indifferent otherwise; better listed first."""
    s = np.asarray(scores, dtype=float)
    if pairs is None:
        pairs = ((a, b) for a in range(s.size) for b in range(a + 1, s.size))
    out = []
    for a, b in pairs:
        gap = s[a] - s[b]
        if abs(gap) > delta:
            out.append(Preference(a, b, "strict") if gap > 0 else Preference(b, a, "strict"))
        else:
            out.append(Preference(a, b, "indifferent"))
    return out
