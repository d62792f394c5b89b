"""Joint learning of a capacity and value functions, synthetic models and experiments.

The joint problem is nonconvex; it is attacked by alternating two LPs. With
the value functions fixed, the integral is linear in the capacity. With the
capacity and each alternative's sorting permutation fixed, it is linear in the
level values. Both steps minimize the same L1 shortfall of the preference
rows, so the total slack never increases.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .capacity import (
    Capacity,
    interaction_pair_mobius,
    mobius,
    random_capacity,
    repair,
    to_mask,
)
from .exceptions import DomainError
from .integral import choquet_many, level_sets
from .learn import (
    Deltas,
    FIT_TOL,
    IdentificationConfig,
    LearnStatus,
    PreferenceDataset,
    SoftSystem,
    _compile,
    identify,
    preferences_from_scores,
    solve_soft,
)
from .values import ValueFunctionSet

MAX_ITERATIONS = 50
DEFAULT_RESTARTS = 10
JOINT_RADIUS = 0.05
MIN_RADIUS = 1e-4
INDIFFERENCE_WEIGHT = 0.05
PHASES = (("max_min_slack", 2.0), ("max_min_slack", 1.0), ("min_total_slack", 1.0))


@dataclass(frozen=True, eq=False)
class GroundTruthModel:
    capacity: Capacity
    value_functions: ValueFunctionSet

    @property
    def grid(self) -> tuple[tuple, ...]:
        return self.value_functions.levels

    @property
    def n(self) -> int:
        return self.capacity.n

    def evaluate(self, labels) -> np.ndarray:
        return choquet_many(self.capacity.values, self.value_functions.apply(labels))


@dataclass(frozen=True)
class JointConfig:
    restarts: int = DEFAULT_RESTARTS
    max_iterations: int = MAX_ITERATIONS
    seed: int = 0
    threads: int | None = None
    k_additive: int | None = None


@dataclass(frozen=True, eq=False)
class RestartTrace:
    seed_index: int
    violations: int
    total_slack: float
    iterations: int
    history: tuple[int, ...]  # violations after each accepted iteration


@dataclass(frozen=True, eq=False)
class JointLearnReport:
    capacity: Capacity
    value_functions: ValueFunctionSet
    violations: int
    total_slack: float
    iterations: int
    restarts_used: int
    traces: tuple[RestartTrace, ...] = field(default=())

    @property
    def history(self) -> tuple[int, ...]:
        best = min(self.traces, key=_trace_key) if self.traces else None
        return best.history if best else ()


# --------------------------------------------------------------------------
# synthetic models
# --------------------------------------------------------------------------

def parse_interaction_spec(spec) -> tuple[str, tuple[tuple[int, ...], ...] | None]:
    """``"additive"``, ``"full"``, ``"groups=0,1;2"`` or ``("groups", partition)``."""
    if isinstance(spec, tuple) and spec and spec[0] == "groups":
        return "groups", tuple(tuple(int(i) for i in b) for b in spec[1])
    if isinstance(spec, str):
        if spec in ("additive", "full"):
            return spec, None
        if spec.startswith("groups="):
            from .integral import parse_family

            return "groups", tuple(tuple(b) for b in parse_family(spec[len("groups="):]))
    raise DomainError(f"interaction spec must be additive, full or groups=<partition>, got {spec!r}")


def _check_partition(groups, n):
    flat = sorted(i for g in groups for i in g)
    if flat != list(range(n)) or any(len(g) == 0 for g in groups):
        raise DomainError(f"groups {list(map(list, groups))} do not partition 0..{n - 1}")


def _grid_levels(n: int, levels) -> tuple[tuple, ...]:
    if isinstance(levels, (int, np.integer)):
        if levels < 1:
            raise DomainError("need at least one level per criterion")
        return tuple(tuple(range(int(levels))) for _ in range(n))
    lv = tuple(tuple(x) for x in levels)
    if len(lv) != n:
        raise DomainError(f"need level lists for {n} criteria, got {len(lv)}")
    return lv


def random_value_functions(levels: Sequence[Sequence], rng: np.random.Generator,
                           min_step: float = 0.2) -> ValueFunctionSet:
    """Strictly increasing values with level 0 at 0 and the global top at 1."""
    vals = []
    for lv in levels:
        steps = rng.uniform(min_step, 1.0, len(lv) - 1)
        vals.append(np.concatenate([[0.0], np.cumsum(steps)]))
    top = max(v[-1] for v in vals)
    if top <= 0:
        raise DomainError("at least one criterion needs two levels")
    return ValueFunctionSet(tuple(levels), tuple(v / top for v in vals))


def synth_model(n: int, levels, seed: int, interaction_spec="full") -> GroundTruthModel:
    """Random ground-truth decision maker.

    ``additive``: Möbius mass on singletons only. ``groups``: a weighted sum of
    random capacities, one per block, so every Möbius coefficient straddling
    two blocks is zero. ``full``: a random capacity with terms of all orders.
    """
    if n < 2:
        raise DomainError("synthetic models need n >= 2")
    kind, groups = parse_interaction_spec(interaction_spec)
    grid = _grid_levels(n, levels)
    rng = np.random.default_rng(seed)
    vf = random_value_functions(grid, rng)
    if kind == "additive":
        cap = Capacity.additive(rng.dirichlet(np.ones(n)))
    elif kind == "full":
        cap = random_capacity(n, rng)
    else:
        _check_partition(groups, n)
        cap = grouped_capacity(n, groups, rng)
    return GroundTruthModel(cap, vf)


def grouped_capacity(n: int, groups, rng: np.random.Generator) -> Capacity:
    weights = rng.dirichlet(np.ones(len(groups)))
    idx = np.arange(1 << n)
    values = np.zeros(1 << n)
    for w, block in zip(weights, groups):
        block = sorted(block)
        sub = random_capacity(len(block), rng) if len(block) > 1 else Capacity.additive([1.0])
        # bitmask of A ∩ block, re-indexed into the block's own criteria
        local = np.zeros(1 << n, dtype=np.int64)
        for k, i in enumerate(block):
            local |= ((idx >> i) & 1) << k
        values += w * sub.values[local]
    values[-1] = 1.0
    return Capacity(n, values)


def grid_points(levels: Sequence[Sequence]) -> list[tuple]:
    return list(itertools.product(*levels))


def sample_preferences(model: GroundTruthModel, mode="all_grid_pairs",
                       delta: float = 1e-3) -> PreferenceDataset:
    """Pairwise statements from the model over its grid.

    ``mode`` is ``"all_grid_pairs"`` or ``("random", count, seed)``. A pair is
    strict when the integrals differ by more than ``delta``, indifferent
    otherwise. The dataset carries the categorical view and, for convenience,
    the true profiles as ``alternatives``.
    """
    from .learn import Deltas

    points = grid_points(model.grid)
    scores = model.evaluate(points)
    pairs = [(a, b) for a in range(len(points)) for b in range(a + 1, len(points))]
    if mode != "all_grid_pairs":
        if not (isinstance(mode, tuple) and len(mode) == 3 and mode[0] == "random"):
            raise DomainError(f"mode must be all_grid_pairs or ('random', count, seed), got {mode!r}")
        _, count, seed = mode
        rng = np.random.default_rng(seed)
        take = np.sort(rng.permutation(len(pairs))[: min(int(count), len(pairs))])
        pairs = [pairs[k] for k in take]
    prefs = preferences_from_scores(scores, delta, pairs)
    return PreferenceDataset(
        n=model.n,
        alternatives=model.value_functions.apply(points),
        preferences=tuple(prefs),
        deltas=Deltas(delta, delta, delta),
        levels=model.grid,
        labels=tuple(points),
    )


# --------------------------------------------------------------------------
# alternating scheme
# --------------------------------------------------------------------------

def _margins(cap_values, P, data: PreferenceDataset) -> np.ndarray:
    """How far each statement clears its delta condition (negative when violated)."""
    s = choquet_many(cap_values, P)
    better = np.array([p.better for p in data.preferences], dtype=np.int64)
    worse = np.array([p.worse for p in data.preferences], dtype=np.int64)
    strict = np.array([p.kind == "strict" for p in data.preferences], dtype=bool)
    d = s[better] - s[worse]
    delta = data.deltas.learning_set
    return np.where(strict, d - delta, delta - np.abs(d))


def _score(cap_values, P, data, objective="min_total_slack"):
    """Violation count and the loss the given step objective decreases."""
    margin = _margins(cap_values, P, data)
    viol = int(np.count_nonzero(margin < -FIT_TOL))
    if objective == "max_min_slack":
        return viol, float(-margin.min(initial=0.0))
    return viol, float(np.maximum(-margin, 0.0).sum())


def _capacity_step(data, P, k_additive, objective, warm=None):
    """Capacity LP at fixed profiles; also returns the binding rows for the next call."""
    cfg = IdentificationConfig(k_additive=k_additive, objective=objective,
                               indifference_weight=INDIFFERENCE_WEIGHT)
    comp = _compile(data.with_alternatives(P), cfg)
    sol = solve_soft(comp, objective, warm=warm)
    if not sol.is_optimal:
        raise DomainError("capacity step failed: technical constraints are infeasible")
    values = repair(comp.space.capacity_values(sol.x[: comp.A.shape[1]]), data.n)
    return Capacity(data.n, values), sol.binding


class _Levels:
    """Flat indexing of the free level values (level 0 is pinned at 0)."""

    def __init__(self, sizes: Sequence[int], idx: np.ndarray):
        self.sizes = list(sizes)
        self.n = len(sizes)
        self.offset = np.concatenate([[0], np.cumsum([s - 1 for s in sizes])]).astype(np.int64)
        self.nv = int(self.offset[-1])
        self.idx = idx
        crit = np.broadcast_to(np.arange(self.n), idx.shape)
        # variable id per (alternative, criterion); -1 for a level-0 coordinate
        self.var = np.where(idx > 0, self.offset[crit] + idx - 1, -1)
        self.crit_of = np.repeat(np.arange(self.n), [s - 1 for s in sizes])

    def flat(self, vals) -> np.ndarray:
        return np.concatenate([v[1:] for v in vals]) if self.nv else np.zeros(0)

    def unflat(self, x) -> list[np.ndarray]:
        return [np.maximum.accumulate(np.concatenate([[0.0], x[self.offset[i]:self.offset[i + 1]]]))
                for i in range(self.n)]

    def profiles(self, vals) -> np.ndarray:
        return np.column_stack([vals[i][self.idx[:, i]] for i in range(self.n)])

    def orders(self, x: np.ndarray, tiebreak: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Global position of each level variable and each alternative's sorting permutation.

        Equal values (to 1e-9) are ordered by ``tiebreak``; level-0 coordinates
        always come first.
        """
        pos = np.empty(self.nv, dtype=np.int64)
        pos[np.lexsort((tiebreak, np.round(x, 9)))] = np.arange(self.nv)
        key = np.where(self.var >= 0, pos[np.maximum(self.var, 0)], -self.n + np.arange(self.n))
        return pos, np.argsort(key, axis=1, kind="stable")


def _frozen_rows(nu: np.ndarray, vals, lv: _Levels, order: np.ndarray):
    """Linear pieces of the integral under frozen sorting permutations.

    Returns ``(rows_f, rows_nu, c0)``: the integral of each alternative as a
    linear function of the free level values at fixed ``nu``, as a linear
    function of ``nu`` at fixed values, and its current value.
    """
    m, n = order.shape
    bits = (1 << order).astype(np.int64)
    upper = np.cumsum(bits[:, ::-1], axis=1)[:, ::-1]
    weight = nu[upper] - np.concatenate([nu[upper[:, 1:]], np.zeros((m, 1))], axis=1)
    var = np.take_along_axis(lv.var, order, axis=1)
    r_idx = np.repeat(np.arange(m), n)
    keep = var.ravel() >= 0
    rows_f = np.zeros((m, lv.nv))
    np.add.at(rows_f, (r_idx[keep], var.ravel()[keep]), weight.ravel()[keep])
    ps = np.take_along_axis(lv.profiles(vals), order, axis=1)
    steps = np.diff(ps, axis=1, prepend=0.0)
    rows_nu = np.zeros((m, nu.size))
    np.add.at(rows_nu, (r_idx, upper.ravel()), steps.ravel())
    return rows_f, rows_nu, rows_nu @ nu


def _level_rows(lv: _Levels, order: np.ndarray, width: int, start: int) -> list[np.ndarray]:
    """Monotone levels plus the frozen cross-criterion orderings, as ``row <= 0``."""
    rows = []

    def row(u, v):
        r = np.zeros(width)
        r[start + u] = 1.0
        if v >= 0:
            r[start + v] = -1.0
        return r

    for i in range(lv.n):
        for k in range(1, lv.sizes[i] - 1):
            rows.append(row(lv.offset[i] + k - 1, lv.offset[i] + k))
    var = np.take_along_axis(lv.var, order, axis=1)
    links = {(int(u), int(v)) for u, v in zip(var[:, :-1].ravel(), var[:, 1:].ravel())
             if u != v and u >= 0}
    rows += [row(u, v) for u, v in sorted(links)]
    return rows


def _preference_rows(data: PreferenceDataset, R: np.ndarray, const: np.ndarray):
    """Soft rows ``R[better] - R[worse]`` against the margin, shifted by ``const`` differences."""
    delta = data.deltas.learning_set
    rows, sense, rhs, weight = [], [], [], []
    for p in data.preferences:
        diff = R[p.better] - R[p.worse]
        shift = const[p.better] - const[p.worse]
        if p.kind == "strict":
            rows.append(diff)
            sense.append(">=")
            rhs.append(delta - shift)
            weight.append(1.0)
        else:
            rows += [diff, diff]
            sense += ["<=", ">="]
            rhs += [delta - shift, -delta - shift]
            weight += [INDIFFERENCE_WEIGHT] * 2
    return rows, sense, rhs, weight


def _top_criterion(vals, lv: _Levels) -> int:
    tops = np.array([vals[i][-1] if lv.sizes[i] > 1 else -np.inf for i in range(lv.n)])
    return int(np.argmax(tops))


def _solve_rows(hard, soft, soft_sense, soft_rhs, soft_weight, lower, upper, objective,
                warm=None):
    width = lower.size
    k = len(hard)
    system = SoftSystem(
        np.vstack(hard + soft).reshape(-1, width),
        np.array(["<="] * k + soft_sense, dtype=object),
        np.array([0.0] * k + soft_rhs),
        np.array([False] * k + [True] * len(soft)),
        lower, upper, np.array([1.0] * k + soft_weight))
    sol = solve_soft(system, objective, warm=warm)
    return (sol.x[:width], sol.binding) if sol.is_optimal else (None, None)


def _value_step(cap: Capacity, vals: list[np.ndarray], lv: _Levels, tiebreak: np.ndarray,
                data: PreferenceDataset, objective: str, warm=None, top=None):
    """Best level values for the frozen capacity and frozen sorting permutations.

    Returns the new values and the global positions used, so that ties left by
    this step can be crossed at the next one. ``top`` picks the criterion whose
    best level is pinned to 1.
    """
    pos, order = lv.orders(lv.flat(vals), tiebreak)
    rows_f, _, _ = _frozen_rows(cap.values, vals, lv, order)
    hard = _level_rows(lv, order, lv.nv, 0)
    soft, sense, rhs, weight = _preference_rows(data, rows_f, np.zeros(rows_f.shape[0]))
    lower = np.zeros(lv.nv)
    top = _top_criterion(vals, lv) if top is None else top
    lower[lv.offset[top + 1] - 1] = 1.0
    x, binding = _solve_rows(hard, soft, sense, rhs, weight, lower, np.ones(lv.nv), objective,
                             warm)
    if x is None:
        return vals, pos, warm
    return lv.unflat(np.clip(x, 0.0, 1.0)), pos, binding


def _joint_step(cap: Capacity, vals, lv: _Levels, tiebreak: np.ndarray,
                data: PreferenceDataset, radius: float, objective: str, warm=None):
    """Move capacity and values together inside a box of half-width ``radius``.

    The integral is bilinear in (capacity, level values) once the sorting
    permutations are frozen; this step minimizes the slack of its first-order
    expansion around the current point.
    """
    n = cap.n
    size = 1 << n
    free = np.arange(1, size - 1)
    nn = free.size
    width = nn + lv.nv
    nu0 = cap.values
    x0 = lv.flat(vals)
    _, order = lv.orders(x0, tiebreak)
    rows_f, rows_nu, c0 = _frozen_rows(nu0, vals, lv, order)

    hard = []
    pos_of = {int(a): k for k, a in enumerate(free)}
    for a in free:
        for i in range(n):
            b = int(a) & ~(1 << i)
            if b != a and b in pos_of:
                r = np.zeros(width)
                r[pos_of[b]] = 1.0
                r[pos_of[int(a)]] = -1.0
                hard.append(r)
    hard += _level_rows(lv, order, width, nn)
    R = np.hstack([rows_nu[:, free], rows_f])
    # first-order expansion: rows_nu.nu + rows_f.f - c0, with nu(N) = 1 fixed
    const = rows_nu[:, size - 1] - c0
    soft, sense, rhs, weight = _preference_rows(data, R, const)
    lower = np.concatenate([np.maximum(nu0[free] - radius, 0.0), np.maximum(x0 - radius, 0.0)])
    upper = np.concatenate([np.minimum(nu0[free] + radius, 1.0), np.minimum(x0 + radius, 1.0)])
    t = _top_criterion(vals, lv)
    lower[nn + lv.offset[t + 1] - 1] = 1.0
    upper = np.maximum(upper, lower)
    x, binding = _solve_rows(hard, soft, sense, rhs, weight, lower, upper, objective, warm)
    if x is None:
        return cap, vals, warm
    nu = np.zeros(size)
    nu[free] = x[:nn]
    nu[size - 1] = 1.0
    return Capacity(n, repair(nu, n)), lv.unflat(np.clip(x[nn:], 0.0, 1.0)), binding


def _initial_values(sizes, r: int, seed: int) -> list[np.ndarray]:
    if r == 0:
        return [np.linspace(0.0, 1.0, s) if s > 1 else np.zeros(1) for s in sizes]
    rng = np.random.default_rng([seed, r])
    vals = [np.concatenate([[0.0], np.cumsum(rng.uniform(0.05, 1.0, s - 1))]) for s in sizes]
    top = max(v[-1] for v in vals)
    return [v / top for v in vals]


def _scaled(data: PreferenceDataset, factor: float) -> PreferenceDataset:
    if factor == 1.0:
        return data
    d = data.deltas
    return replace(data, deltas=Deltas(d.shapley * factor, d.interaction * factor,
                                       d.learning_set * factor))


def _run_restart(data: PreferenceDataset, idx: np.ndarray, r: int, cfg: JointConfig):
    sizes = [len(lv) for lv in data.levels]
    lv = _Levels(sizes, idx)
    vals = _initial_values(sizes, r, cfg.seed)
    # ties start out ordered by criterion index
    tiebreak = lv.crit_of.astype(float)

    warm = {}
    cap, warm["cap", PHASES[0][0]] = _capacity_step(data, lv.profiles(vals), cfg.k_additive, PHASES[0][0])
    viol = _score(cap.values, lv.profiles(vals), data)[0]
    history = [viol]
    it = 0
    for objective, factor in PHASES:
        work = _scaled(data, factor)

        def evaluate(c, v):
            P = lv.profiles(v)
            return _score(c.values, P, data)[0], _score(c.values, P, work)[1]

        loss = evaluate(cap, vals)[1]
        radius = JOINT_RADIUS
        while viol > 0 and it < cfg.max_iterations:
            it += 1
            start = (viol, loss)
            # any criterion may carry the top value; each choice is its own LP
            best = None
            for t in range(lv.n):
                if lv.sizes[t] < 2:
                    continue
                new_vals, pos, w = _value_step(cap, vals, lv, tiebreak, work, objective,
                                               warm.get(("val", t, objective)), top=t)
                warm[("val", t, objective)] = w
                key = evaluate(cap, new_vals)
                if best is None or key < best[0]:
                    best = (key, new_vals)
            # values still tied next time are taken in the opposite order
            tiebreak = -pos.astype(float)
            (v2, l2), new_vals = best
            if v2 <= viol:
                vals, viol, loss = new_vals, v2, l2
            new_cap, warm["cap", objective] = _capacity_step(
                work, lv.profiles(vals), cfg.k_additive, objective, warm.get(("cap", objective)))
            v3, l3 = evaluate(new_cap, vals)
            if v3 <= viol:
                cap, viol, loss = new_cap, v3, l3
            stalled = viol == start[0] and loss > start[1] - 1e-9
            if stalled and cfg.k_additive is None:
                # alternating steps stalled: joint moves in a shrinking box
                while radius >= MIN_RADIUS:
                    cand_cap, cand_vals, warm["joint", objective] = _joint_step(
                        cap, vals, lv, tiebreak, work, radius, objective,
                        warm.get(("joint", objective)))
                    v4, l4 = evaluate(cand_cap, cand_vals)
                    if v4 <= viol and l4 < loss - 1e-9:
                        cap, vals, viol, loss = cand_cap, cand_vals, v4, l4
                        radius = min(2 * radius, JOINT_RADIUS)
                        break
                    radius /= 4
            history.append(viol)
            if not (viol < start[0] or loss < start[1] - 1e-9):
                break
    slack = _score(cap.values, lv.profiles(vals), data)[1]
    return cap, vals, RestartTrace(r, viol, slack, it, tuple(history))


def _trace_key(t: RestartTrace):
    return (t.violations, t.total_slack if t.violations else 0.0, t.seed_index)


def learn_joint(data: PreferenceDataset, cfg: JointConfig | None = None) -> JointLearnReport:
    """Alternating capacity / value-function LPs with seeded restarts.

    Restart 0 starts from equally spaced values, later ones from random
    increasing values. Restarts stop at the first zero-violation model (in
    seed order); otherwise the best by (violations, slack, seed) wins.
    """
    cfg = cfg or JointConfig()
    if data.levels is None or data.labels is None:
        raise DomainError("joint learning needs per-criterion level orders and labelled alternatives")
    if all(len(lv) < 2 for lv in data.levels):
        raise DomainError("at least one criterion needs two levels")
    if cfg.restarts < 1:
        raise DomainError("restarts must be >= 1")
    idx = data.level_indices()
    threads = cfg.threads or int(os.environ.get("CHOQUET_THREADS", "1") or 1)
    results = []
    r = 0
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        while r < cfg.restarts:
            chunk = range(r, min(cfg.restarts, r + max(1, threads)))
            results += list(pool.map(lambda k: _run_restart(data, idx, k, cfg), chunk))
            r = chunk.stop
            if any(t.violations == 0 for _, _, t in results):
                break
    first_zero = [res for res in results if res[2].violations == 0]
    cap, vals, trace = first_zero[0] if first_zero else min(results, key=lambda x: _trace_key(x[2]))
    vf = ValueFunctionSet(data.levels, tuple(_anchor(vals)))
    P = vf.apply_index(idx)
    viol, slack = _score(cap.values, P, data)
    return JointLearnReport(cap, vf, viol, slack, trace.iterations, len(results),
                            tuple(t for _, _, t in results))


def _anchor(vals):
    top = max(v[-1] for v in vals)
    return [np.clip(v / top, 0.0, 1.0) if top > 0 else v for v in vals]


# --------------------------------------------------------------------------
# identifiability experiment
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSpec:
    n: int = 3
    levels: int = 3
    interaction_spec: str = "additive"
    data_mode: object = "all_grid_pairs"
    seed: int = 0
    delta: float = 1e-3


@dataclass(frozen=True, eq=False)
class IdentifiabilityReport:
    spec: ExperimentSpec
    status: str
    intervals: dict  # subset tuple -> (lo, hi)
    max_pair_width: float
    truth_groups: tuple
    learned_groups: tuple
    detected_groups: tuple
    support_groups: tuple
    cross_group_interaction: float
    cross_group_interaction_unrestricted: float

    def as_dict(self) -> dict:
        return {
            "spec": {k: getattr(self.spec, k) for k in self.spec.__dataclass_fields__},
            "status": self.status,
            "intervals": [{"set": list(k), "lo": lo, "hi": hi, "width": hi - lo}
                          for k, (lo, hi) in self.intervals.items()],
            "max_pair_width": self.max_pair_width,
            "truth_groups": [list(g) for g in self.truth_groups],
            "learned_groups": [list(g) for g in self.learned_groups],
            "detected_groups": [list(g) for g in self.detected_groups],
            "support_groups": [list(g) for g in self.support_groups],
            "cross_group_interaction": self.cross_group_interaction,
            "cross_group_interaction_unrestricted": self.cross_group_interaction_unrestricted,
        }


def _cross_pairs(groups, n):
    block = {i: k for k, g in enumerate(groups) for i in g}
    return [(i, j) for i in range(n) for j in range(i + 1, n) if block[i] != block[j]]


def set_partitions(items):
    """Every partition of ``items``, blocks in first-element order."""
    items = list(items)
    if not items:
        yield ()
        return
    head, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield ((head,),) + part
        for k in range(len(part)):
            yield part[:k] + ((head,) + part[k],) + part[k + 1:]


MAX_PARTITION_N = 6


def support_groups(data: PreferenceDataset) -> tuple[tuple[int, ...], ...]:
    """Finest partition whose Möbius-support restriction still fits ``data`` exactly.

    Partitions are tried from most to fewest blocks (ties in generation
    order); the single block always qualifies when the data are exactly
    representable at all.
    """
    if data.n > MAX_PARTITION_N:
        raise DomainError(f"partition search is limited to n <= {MAX_PARTITION_N}")
    parts = sorted(set_partitions(range(data.n)), key=lambda p: -len(p))
    for part in parts:
        groups = tuple(tuple(sorted(b)) for b in part)
        if len(groups) == 1:
            return groups
        if identify(data, IdentificationConfig(groups=groups)).feasible:
            return tuple(sorted(groups))
    return (tuple(range(data.n)),)


def _probe_all(data: PreferenceDataset, cfg: IdentificationConfig):
    """Min and max of every nu(A) over the polytope; returns intervals and the probed vertices."""
    from .learn import polytope_probe

    n = data.n
    intervals, vertices = {}, []
    for a in range(1, (1 << n) - 1):
        lo_cap, hi_cap = polytope_probe(data, a, cfg)
        key = tuple(i for i in range(n) if a >> i & 1)
        intervals[key] = (float(lo_cap.values[a]), float(hi_cap.values[a]))
        vertices += [lo_cap, hi_cap]
    return intervals, vertices


def identifiability_experiment(spec: ExperimentSpec) -> IdentifiabilityReport:
    """Synthesize, sample, identify, then measure how loosely the data pin the capacity.

    Interaction groups are read off the data twice: by triple-cancellation
    scans on the induced relation, and as the finest partition whose
    Möbius-support restriction still fits the data. Identification is
    repeated under the latter, and cross-group pair interactions are measured
    at every probed vertex of both polytopes.
    """
    from .axioms import FiniteRelation, interaction_groups, interaction_groups_scan

    model = synth_model(spec.n, spec.levels, spec.seed, spec.interaction_spec)
    data = sample_preferences(model, spec.data_mode, spec.delta)
    outcome = identify(data)
    intervals, vertices = _probe_all(data, IdentificationConfig())
    pair_widths = [hi - lo for k, (lo, hi) in intervals.items() if len(k) == 2]
    max_pair_width = max(pair_widths) if pair_widths else 0.0

    truth_groups = interaction_groups(mobius(model.capacity))
    learned_groups = interaction_groups(mobius(outcome.capacity), tol=1e-6)
    points = grid_points(model.grid)
    rel = FiniteRelation.from_scores(model.grid, model.evaluate(points))
    detected = interaction_groups_scan(rel)

    support = support_groups(data)
    # interactions straddling the truth's blocks, which a faithful fit leaves at zero
    cross = _cross_pairs(truth_groups, spec.n)

    def worst(caps):
        if not cross:
            return 0.0
        return max(abs(interaction_pair_mobius(mobius(c), i, j)) for c in caps for i, j in cross)

    unrestricted = worst(vertices + [outcome.capacity])
    restricted_cfg = IdentificationConfig(groups=support)
    restricted_outcome = identify(data, restricted_cfg)
    _, r_vertices = _probe_all(data, restricted_cfg)
    restricted = worst(r_vertices + [restricted_outcome.capacity])
    return IdentifiabilityReport(spec, outcome.status.value, intervals, max_pair_width,
                                 truth_groups, learned_groups, detected, support, restricted,
                                 unrestricted)


def scale_confounding(data: PreferenceDataset, subset) -> tuple[Capacity, Capacity]:
    """Two zero-violation capacities pulling ``nu(subset)`` to opposite extremes."""
    from .learn import polytope_probe

    if identify(data).status is not LearnStatus.FEASIBLE_EXACT:
        raise DomainError("data are not exactly representable; no confounding pair to exhibit")
    return polytope_probe(data, to_mask(subset))
