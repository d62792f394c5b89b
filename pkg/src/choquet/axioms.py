"""Brute-force checks of representation conditions on finite grids.

A relation is stored as an integer rank per grid point (higher is better,
equal ranks are indifferent). Every scan returns ``ViolationWitness``
objects listing the grid points that instantiate a failed condition;
``reverify`` re-evaluates a witness against the relation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .capacity import Capacity, MobiusRepresentation, members, mobius
from .exceptions import DomainError, MalformedInputError, ResourceError
from .integral import _family, choquet_many, is_antichain
from .values import ValueFunctionSet

MAX_GRID_POINTS = 10**6
MAX_WORK = 10**6
SCORE_TOL = 1e-9
ORDINAL_KINDS = ("max", "min", "os")


@dataclass(frozen=True, eq=False)
class FiniteRelation:
    """Weak order on the product of finite per-criterion level lists."""

    grid: tuple[tuple, ...]
    ranks: np.ndarray

    def __post_init__(self):
        grid = tuple(tuple(lv) for lv in self.grid)
        if not grid or any(len(lv) == 0 for lv in grid):
            raise MalformedInputError("grid needs at least one level per criterion")
        shape = tuple(len(lv) for lv in grid)
        size = int(np.prod(shape, dtype=np.int64))
        if size > MAX_GRID_POINTS:
            raise ResourceError(f"grid has {size} points, cap is {MAX_GRID_POINTS}")
        ranks = np.asarray(self.ranks)
        if ranks.size != size:
            raise MalformedInputError(f"need {size} ranks, got {ranks.size}")
        if not np.issubdtype(ranks.dtype, np.integer):
            raise MalformedInputError("ranks must be integers")
        ranks = ranks.astype(np.int64).reshape(shape)
        ranks.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "ranks", ranks)

    @classmethod
    def from_scores(cls, grid: Sequence[Sequence], scores, tol: float = SCORE_TOL) -> "FiniteRelation":
        """Rank points by score; scores within ``tol`` of their neighbour in sorted order tie."""
        s = np.asarray(scores, dtype=float).ravel()
        if not np.all(np.isfinite(s)):
            raise DomainError("scores must be finite")
        order = np.argsort(s, kind="stable")
        jumps = np.concatenate([[0], (np.diff(s[order]) > tol).astype(np.int64)])
        ranks = np.empty(s.size, dtype=np.int64)
        ranks[order] = np.cumsum(jumps)
        return cls(tuple(grid), ranks)

    @classmethod
    def from_function(cls, grid: Sequence[Sequence], fn, tol: float = SCORE_TOL) -> "FiniteRelation":
        points = list(itertools.product(*grid))
        return cls.from_scores(grid, [fn(p) for p in points], tol)

    @classmethod
    def from_model(cls, capacity: Capacity, values: ValueFunctionSet,
                   tol: float = SCORE_TOL) -> "FiniteRelation":
        """Relation induced by the Choquet integral over the value functions' levels."""
        if capacity.n != values.n:
            raise DomainError("capacity and value functions disagree on n")
        idx = np.indices([len(lv) for lv in values.levels]).reshape(values.n, -1).T
        return cls.from_scores(values.levels, choquet_many(capacity.values, values.apply_index(idx)), tol)

    @classmethod
    def from_comparisons(cls, grid: Sequence[Sequence], geq) -> "FiniteRelation":
        """From a boolean matrix ``geq[x, y]`` (x at least as good as y) over the grid in product order."""
        g = np.asarray(geq, dtype=bool)
        m = int(np.prod([len(lv) for lv in grid]))
        if g.shape != (m, m):
            raise MalformedInputError(f"comparison matrix must be {m}x{m}")
        if not np.all(g | g.T):
            raise DomainError("relation is not complete")
        # transitive: x >= y >= z implies x >= z
        if np.any((g.astype(np.int64) @ g.astype(np.int64) > 0) & ~g):
            raise DomainError("relation is not transitive")
        beats = g.sum(axis=1)
        _, ranks = np.unique(beats, return_inverse=True)
        return cls(tuple(grid), ranks.astype(np.int64))

    @property
    def n(self) -> int:
        return len(self.grid)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.ranks.shape

    @property
    def size(self) -> int:
        return self.ranks.size

    def locate(self, point) -> tuple[int, ...]:
        if len(point) != self.n:
            raise DomainError(f"point must have {self.n} coordinates")
        try:
            return tuple(lv.index(x) for lv, x in zip(self.grid, point))
        except ValueError:
            raise DomainError(f"point {point!r} is not on the grid") from None

    def geq(self, x, y) -> bool:
        return bool(self.ranks[self.locate(x)] >= self.ranks[self.locate(y)])

    def label(self, index: Sequence[int]) -> tuple:
        return tuple(lv[k] for lv, k in zip(self.grid, index))


@dataclass(frozen=True)
class ViolationWitness:
    axiom: str
    points: tuple[tuple, ...]
    criteria: tuple[int, ...] = ()

    def describe(self) -> str:
        crit = f" on criteria {','.join(map(str, self.criteria))}" if self.criteria else ""
        pts = "; ".join("(" + ", ".join(map(str, p)) + ")" for p in self.points)
        return f"{self.axiom}{crit}: {pts}"


def _budget(work: int, what: str, max_work: int) -> None:
    if work > max_work:
        raise ResourceError(f"{what} scan needs about {work} evaluations, cap is {max_work}")


def _flat_index(rel: FiniteRelation):
    idx = np.indices(rel.shape).reshape(rel.n, -1).T
    strides = np.array([int(np.prod(rel.shape[k + 1:], dtype=np.int64)) for k in range(rel.n)],
                       dtype=np.int64)
    return idx, strides, rel.ranks.ravel()


# --------------------------------------------------------------------------
# MAX, MIN and OS_{n-1}
# --------------------------------------------------------------------------

def check_ordinal_axiom(rel: FiniteRelation, kind: str, limit: int | None = None,
                        max_work: int = MAX_WORK) -> list[ViolationWitness]:
    """Exhaustive scan of the disjunctive condition for MAX, MIN or OS_{n-1}.

    For all x, y and criteria i (and j != i for ``os``):

    - max: ``x_i y_-i >= x  or  y_i x_-i >= x``
    - min: ``x >= x_i y_-i  or  x >= y_i x_-i``
    - os:  ``x_ij y_-ij >= x  or  y_i x_-i >= x  or  y_j x_-j >= x``

    Witness points are ``(x, y)``.
    """
    kind = kind.lower()
    if kind not in ORDINAL_KINDS:
        raise DomainError(f"kind must be one of {ORDINAL_KINDS}, got {kind!r}")
    n, m = rel.n, rel.size
    if kind == "os" and n < 2:
        return []
    combos = ([(i,) for i in range(n)] if kind != "os"
              else [(i, j) for i in range(n) for j in range(i + 1, n)])
    _budget(m * m * len(combos), kind, max_work)
    idx, st, R = _flat_index(rel)
    flat = np.arange(m)
    out: list[tuple] = []
    for crit in combos:
        i = crit[0]
        di = idx[:, None, i] - idx[None, :, i]  # x_i - y_i
        xy_i = R[flat[None, :] + di * st[i]]    # x_i y_-i, indexed [x, y]
        yx_i = R[flat[:, None] - di * st[i]]    # y_i x_-i
        rx = R[:, None]
        if kind == "max":
            ok = (xy_i >= rx) | (yx_i >= rx)
        elif kind == "min":
            ok = (rx >= xy_i) | (rx >= yx_i)
        else:
            # the pair kept from x, or either coordinate replaced by y's
            j = crit[1]
            dj = idx[:, None, j] - idx[None, :, j]
            xy_ij = R[flat[None, :] + di * st[i] + dj * st[j]]
            yx_j = R[flat[:, None] - dj * st[j]]
            ok = (xy_ij >= rx) | (yx_i >= rx) | (yx_j >= rx)
        for x, y in zip(*np.nonzero(~ok)):
            out.append((int(x), int(y), crit))
    out.sort(key=lambda t: (t[0], t[1], t[2]))
    if limit is not None:
        out = out[:limit]
    return [ViolationWitness(kind, (rel.label(idx[x]), rel.label(idx[y])), crit) for x, y, crit in out]


# --------------------------------------------------------------------------
# lattice polynomials
# --------------------------------------------------------------------------

def _checked_families(n: int, cnf, dnf):
    try:
        fa, fb = _family(cnf, n), _family(dnf, n)
    except (MalformedInputError, DomainError) as exc:
        raise DomainError(f"malformed family: {exc}") from None
    for name, fam in (("CNF", fa), ("DNF", fb)):
        if not fam or 0 in fam:
            raise DomainError(f"{name} family must be nonempty and hold nonempty sets")
        if not is_antichain(fam):
            raise DomainError(f"{name} family is not an antichain")
    if not any(k & mm for k in fa for mm in fb):
        raise DomainError("no CNF member meets a DNF member")
    return fa, fb


def check_lattice_axiom(rel: FiniteRelation, cnf_family: Iterable, dnf_family: Iterable,
                        limit: int | None = None, max_work: int = MAX_WORK) -> list[ViolationWitness]:
    """For every (w, x), look for K in the CNF family and M in the DNF family,
    K and M intersecting, such that for all completions

        w >= x  implies  w >= a_-K x_K
        x >= w  implies  b_-M x_M >= w.

    A witness ``(w, x)`` is reported when no such pair exists.
    """
    fa, fb = _checked_families(rel.n, cnf_family, dnf_family)
    m = rel.size
    pairs = [(a, b) for a in range(len(fa)) for b in range(len(fb)) if fa[a] & fb[b]]
    _budget(m * m * len(pairs), "lattice", max_work)
    R = rel.ranks
    allax = set(range(rel.n))

    def reach(mask, fn):
        axes = tuple(sorted(allax - set(members(mask))))
        return np.broadcast_to(fn(R, axis=axes, keepdims=True) if axes else R, R.shape).ravel()

    upper = [reach(k, np.max) for k in fa]  # best rank with x_K kept, rest free
    lower = [reach(mm, np.min) for mm in fb]  # worst rank with x_M kept
    r = R.ravel()
    rw, rx = r[:, None], r[None, :]
    first = [(rw < rx) | (u[None, :] <= rw) for u in upper]
    second = [(rx < rw) | (lo[None, :] >= rw) for lo in lower]
    ok = np.zeros((m, m), dtype=bool)
    for a, b in pairs:
        ok |= first[a] & second[b]
    bad = np.argwhere(~ok)
    if limit is not None:
        bad = bad[:limit]
    idx = np.indices(rel.shape).reshape(rel.n, -1).T
    return [ViolationWitness("lattice", (rel.label(idx[w]), rel.label(idx[x]))) for w, x in bad]


# --------------------------------------------------------------------------
# two-criterion cancellation patterns
# --------------------------------------------------------------------------

def _slices(rel: FiniteRelation, i: int, j: int):
    """Rank slices over (X_i, X_j) for every fixed z on the other criteria."""
    moved = np.moveaxis(rel.ranks, (i, j), (0, 1))
    rest = moved.shape[2:]
    flat = moved.reshape(moved.shape[0], moved.shape[1], -1)
    for k in range(flat.shape[2]):
        yield np.unravel_index(k, rest) if rest else (), flat[:, :, k]


def _point(rel, i, j, z, u, v) -> tuple:
    """Grid labels of the point with level u on i, v on j and z elsewhere."""
    others = [k for k in range(rel.n) if k not in (i, j)]
    idx = [0] * rel.n
    idx[i], idx[j] = u, v
    for k, zk in zip(others, z):
        idx[k] = int(zk)
    return rel.label(idx)


def _pattern_scan(rel, i, j, terms, name, limit, max_work, values_ok=None):
    """Search quadruples (a,b,c,d) x (p,q,r,s) for

        T1[a,b,p,q] and T2[a,b,r,s] and T3[c,d,p,q] and T4[c,d,r,s]

    where ``terms(S)`` builds the four tensors from a rank slice. The two
    inner existentials factor into boolean matrix products.
    """
    if i == j:
        raise DomainError("criteria i and j must differ")
    for k in (i, j):
        if not 0 <= k < rel.n:
            raise DomainError(f"criterion {k} out of range")
    Li, Lj = rel.shape[i], rel.shape[j]
    nz = rel.size // (Li * Lj)
    _budget(nz * 2 * (Li ** 4) * (Lj ** 2), name, max_work)
    found = []
    for z, S in _slices(rel, i, j):
        t1, t2, t3, t4 = terms(S, z)
        A = t1.reshape(Li * Li, Lj * Lj).astype(np.int64)
        B = t2.reshape(Li * Li, Lj * Lj).astype(np.int64)
        C = t3.reshape(Li * Li, Lj * Lj).astype(np.int64)
        D = t4.reshape(Li * Li, Lj * Lj).astype(np.int64)
        hit = ((A @ C.T) > 0) & ((B @ D.T) > 0)  # [ab, cd]
        for ab, cd in np.argwhere(hit):
            pq = int(np.flatnonzero(A[ab] & C[cd])[0])
            rs = int(np.flatnonzero(B[ab] & D[cd])[0])
            a, b = divmod(int(ab), Li)
            c, d = divmod(int(cd), Li)
            p, q = divmod(pq, Lj)
            r, s = divmod(rs, Lj)
            pts = tuple(_point(rel, i, j, z, u, v) for u, v in
                        ((a, p), (b, q), (a, r), (b, s), (c, p), (d, q), (c, r), (d, s)))
            found.append(ViolationWitness(name, pts, (i, j)))
            if limit is not None and len(found) >= limit:
                return found
    return found


def _cmp4(S, op):
    """op(S[a, p], S[b, q]) as a tensor indexed [a, b, p, q]."""
    return op(S[:, None, :, None], S[None, :, None, :])


def triple_cancellation_violations(rel: FiniteRelation, i: int, j: int, limit: int | None = None,
                                   max_work: int = MAX_WORK) -> list[ViolationWitness]:
    """ij-triple cancellation on a common background z:

        a p z <= b q z,  a r z >= b s z,  c p z >= d q z   imply   c r z >= d s z

    with a, b, c, d levels of criterion i and p, q, r, s levels of j.
    Witness points are ``(apz, bqz, arz, bsz, cpz, dqz, crz, dsz)``.
    """
    def terms(S, z):
        le = _cmp4(S, np.less_equal)
        ge = _cmp4(S, np.greater_equal)
        return le, ge, ge, ~ge

    return _pattern_scan(rel, i, j, terms, "triple-cancellation", limit, max_work)


def interaction_groups(source, tol: float = 1e-9) -> tuple[tuple[int, ...], ...]:
    """Connected components of the pairwise interaction graph.

    From Möbius coefficients (or a capacity): i and j are linked when some
    ``m(A)`` with ``{i, j}`` in A exceeds ``tol`` in size. From a
    ``FiniteRelation``: linked when the triple-cancellation scan finds a
    violation for (i, j) or (j, i).
    """
    if isinstance(source, FiniteRelation):
        return interaction_groups_scan(source)
    if isinstance(source, Capacity):
        source = mobius(source)
    if not isinstance(source, MobiusRepresentation):
        raise MalformedInputError("source must be a capacity, Möbius representation or relation")
    n = source.n
    edges = []
    for a in np.flatnonzero(np.abs(source.coeffs) > tol):
        mem = members(int(a))
        edges += [(mem[0], k) for k in mem[1:]]
    return _components(n, edges)


def interaction_groups_scan(rel: FiniteRelation, max_work: int = MAX_WORK) -> tuple[tuple[int, ...], ...]:
    edges = [(i, j) for i in range(rel.n) for j in range(i + 1, rel.n)
             if triple_cancellation_violations(rel, i, j, 1, max_work)
             or triple_cancellation_violations(rel, j, i, 1, max_work)]
    return _components(rel.n, edges)


def _components(n: int, edges) -> tuple[tuple[int, ...], ...]:
    parent = list(range(n))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    return tuple(tuple(g) for g in sorted(groups.values()))


# --------------------------------------------------------------------------
# convexity condition
# --------------------------------------------------------------------------

def check_convexity_axiom(capacity: Capacity, values: ValueFunctionSet, tol: float = SCORE_TOL,
                          limit: int | None = None, max_work: int = MAX_WORK,
                          pair: tuple[int, int] | None = None) -> list[ViolationWitness]:
    """Scan the convexity condition on the grid of ``values``' levels.

    For i != j and common z:

        a p ~ b q,  a r ~ b s,  c p ~ d q,  d >=_i c,  r >=_j s   imply   c r >= d s

    where i's value is at most j's at the six premise points and j's value
    is at most i's at the two conclusion points (ties satisfy both).
    ``pair`` restricts the scan to one ordered pair (i, j).
    """
    rel = FiniteRelation.from_model(capacity, values, tol)
    out = []
    for i in range(rel.n):
        for j in range(rel.n):
            if i == j or (pair is not None and (i, j) != tuple(pair)):
                continue
            fi, fj = values.values[i], values.values[j]
            low = fi[:, None] <= fj[None, :] + tol    # i below j at (u_i, v_j)
            high = fj[None, :] <= fi[:, None] + tol   # j below i
            di = fi[None, :] >= fi[:, None] - tol     # [c, d]: d >=_i c
            rj = fj[:, None] >= fj[None, :] - tol     # [r, s]: r >=_j s

            def terms(S, z, low=low, high=high, di=di, rj=rj):
                eq = _cmp4(S, np.equal)
                side = low[:, None, :, None] & low[None, :, None, :]  # [a,b,p,q]
                prem = eq & side
                concl = _cmp4(S, np.greater_equal)
                t4 = (~concl & di[:, :, None, None] & rj[None, None, :, :]
                      & high[:, None, :, None] & high[None, :, None, :])
                return prem, prem, prem, t4

            found = _pattern_scan(rel, i, j, terms, "convexity", None if limit is None
                                  else limit - len(out), max_work)
            out += found
            if limit is not None and len(out) >= limit:
                return out[:limit]
    return out


def tradeoff_grid(capacity: Capacity, i: int = 0, j: int = 1, levels: int = 5) -> ValueFunctionSet:
    """Five shared levels on which the convexity pattern for (i, j) is instantiable.

    With every other criterion at its bottom level, the integral is
    ``alpha f_i + beta f_j`` where i is below j. Steps ``h`` on i and ``k`` on j
    with ``alpha h = beta k`` make the three premise indifferences exact; the
    levels ``0, h, h+k, 2h+k, 2h+2k`` (rescaled to end at 1) hold all eight
    points with the required orderings. Falls back to equal spacing when the
    capacity leaves no room for such a trade-off.
    """
    if levels != 5:
        raise DomainError("the trade-off grid has exactly five levels")
    if i == j or not (0 <= i < capacity.n and 0 <= j < capacity.n):
        raise DomainError("need two distinct criteria")
    v = capacity.values
    alpha = v[(1 << i) | (1 << j)] - v[1 << j]
    beta = v[1 << j]
    if alpha > SCORE_TOL and beta > SCORE_TOL:
        k = 1.0
        h = beta / alpha * k
        vals = np.array([0.0, h, h + k, 2 * h + k, 2 * h + 2 * k]) / (2 * h + 2 * k)
    else:
        vals = np.linspace(0.0, 1.0, 5)
    labels = tuple(range(5))
    return ValueFunctionSet(tuple(labels for _ in range(capacity.n)),
                            tuple(vals.copy() for _ in range(capacity.n)))


# --------------------------------------------------------------------------
# re-verification
# --------------------------------------------------------------------------

def reverify(rel: FiniteRelation, witness: ViolationWitness, families=None,
             values: ValueFunctionSet | None = None, tol: float = SCORE_TOL) -> bool:
    """True when the witness still exhibits a failure of its condition on ``rel``."""
    rk = lambda p: int(rel.ranks[rel.locate(p)])  # noqa: E731
    ax = witness.axiom
    if ax in ORDINAL_KINDS:
        x, y = witness.points
        i = witness.criteria[0]
        xi = list(y); xi[i] = x[i]          # x_i y_-i
        yi = list(x); yi[i] = y[i]          # y_i x_-i
        if ax == "max":
            return not (rk(xi) >= rk(x) or rk(yi) >= rk(x))
        if ax == "min":
            return not (rk(x) >= rk(xi) or rk(x) >= rk(yi))
        j = witness.criteria[1]
        xij = list(y); xij[i] = x[i]; xij[j] = x[j]
        yj = list(x); yj[j] = y[j]
        return not (rk(xij) >= rk(x) or rk(yi) >= rk(x) or rk(yj) >= rk(x))
    if ax == "lattice":
        if families is None:
            raise DomainError("lattice witnesses need the (CNF, DNF) families")
        fa, fb = _checked_families(rel.n, *families)
        w, x = witness.points
        iw, ix = rel.locate(w), rel.locate(x)
        rw, rx = rel.ranks[iw], rel.ranks[ix]
        for k in fa:
            for mm in fb:
                if not k & mm:
                    continue
                keep_k = tuple(ix[t] if k >> t & 1 else slice(None) for t in range(rel.n))
                keep_m = tuple(ix[t] if mm >> t & 1 else slice(None) for t in range(rel.n))
                if (rw < rx or rel.ranks[keep_k].max() <= rw) and \
                        (rx < rw or rel.ranks[keep_m].min() >= rw):
                    return False
        return True
    if ax in ("triple-cancellation", "convexity"):
        i, j = witness.criteria
        pts = witness.points
        if not _pattern_shape_ok(rel, pts, i, j):
            return False
        r = [rk(p) for p in pts]
        if ax == "triple-cancellation":
            return r[0] <= r[1] and r[2] >= r[3] and r[4] >= r[5] and not r[6] >= r[7]
        if values is None:
            raise DomainError("convexity witnesses need the value functions")
        loc = [rel.locate(p) for p in pts]
        fi = [values.values[i][q[i]] for q in loc]
        fj = [values.values[j][q[j]] for q in loc]
        sides = all(fi[k] <= fj[k] + tol for k in range(6)) and \
            all(fj[k] <= fi[k] + tol for k in (6, 7))
        orders = fi[5] >= fi[4] - tol and fj[2] >= fj[3] - tol
        return (r[0] == r[1] and r[2] == r[3] and r[4] == r[5] and sides and orders
                and not r[6] >= r[7])
    raise DomainError(f"unknown axiom {ax!r}")


def _pattern_shape_ok(rel, pts, i, j) -> bool:
    """The eight points share z and reuse a, b, c, d / p, q, r, s as the pattern says."""
    loc = [rel.locate(p) for p in pts]
    others = [k for k in range(rel.n) if k not in (i, j)]
    if len({tuple(q[k] for k in others) for q in loc}) != 1:
        return False
    ii = [q[i] for q in loc]
    jj = [q[j] for q in loc]
    return (ii[0] == ii[2] and ii[1] == ii[3] and ii[4] == ii[6] and ii[5] == ii[7]
            and jj[0] == jj[4] and jj[1] == jj[5] and jj[2] == jj[6] and jj[3] == jj[7])
