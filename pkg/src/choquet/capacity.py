"""Capacities (fuzzy measures), their Möbius representation and behavioural indices.

Subsets of ``N = {0, ..., n-1}`` are encoded as integer bitmasks: bit ``i`` is
set iff criterion ``i`` belongs to the subset. A set function on ``N`` is a
dense float array of length ``2**n`` indexed by that bitmask.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import (
    DomainError,
    InternalConsistencyError,
    MalformedInputError,
    ValidationError,
)

MAX_CRITERIA = 20
EQ_TOL = 1e-9
MONOTONE_TOL = 1e-12
# full (A, B) pair listing in validate() is 3**n; above this only covering pairs
_FULL_PAIR_SCAN_MAX_N = 12
_FULL_SUPERMODULAR_SCAN_MAX_N = 10


# --------------------------------------------------------------------------
# subset helpers
# --------------------------------------------------------------------------

def to_mask(subset) -> int:
    """Bitmask of a subset given as an int mask or an iterable of indices."""
    if isinstance(subset, (int, np.integer)):
        return int(subset)
    mask = 0
    for i in subset:
        mask |= 1 << int(i)
    return mask


def members(mask: int) -> tuple[int, ...]:
    """Sorted criterion indices contained in ``mask``."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """Cardinality of every subset of an n-set, indexed by bitmask."""
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pc[1 << i: 1 << (i + 1)] = pc[: 1 << i] + 1
    pc.setflags(write=False)
    return pc


def _check_n(n) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise MalformedInputError(f"criteria count must be an integer, got {n!r}")
    n = int(n)
    if not 1 <= n <= MAX_CRITERIA:
        raise MalformedInputError(f"criteria count must lie in [1, {MAX_CRITERIA}], got {n}")
    return n


def _as_set_function(n: int, values, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != 1 << n:
        raise MalformedInputError(
            f"{what} must have length 2**n = {1 << n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError(f"{what} contains non-finite entries")
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------
# data types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One failed capacity constraint.

    ``kind`` is ``"monotonicity"`` (``subset`` ⊆ ``superset`` but the value
    decreases) or ``"normalization"`` (``subset`` is ∅ or N with the wrong value).
    """

    kind: str
    subset: int
    superset: int | None
    amount: float

    def describe(self, n: int) -> str:
        if self.kind == "normalization":
            return f"normalization: nu({list(members(self.subset))}) off by {self.amount:.3g}"
        return (f"monotonicity: {list(members(self.subset))} ⊆ {list(members(self.superset))}"
                f" but value drops by {self.amount:.3g}")


@dataclass(frozen=True, eq=False)
class Capacity:
    """Set function ``nu`` on the subsets of ``{0..n-1}``, stored by bitmask.

    Construction only checks the shape; use :func:`validate` (or
    :attr:`is_valid`) for normalization and monotonicity.
    """

    n: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = _check_n(self.n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", _as_set_function(n, self.values, "capacity values"))

    def __getitem__(self, subset) -> float:
        return float(self.values[to_mask(subset)])

    def __eq__(self, other):
        if not isinstance(other, Capacity):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    __hash__ = None

    @cached_property
    def violations(self) -> list[Violation]:
        return validate(self)

    @property
    def is_valid(self) -> bool:
        return not self.violations

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping) -> "Capacity":
        """Build from ``{subset: value}``; missing subsets other than ∅ are an error."""
        n = _check_n(n)
        values = np.full(1 << n, np.nan)
        values[0] = 0.0
        for key, val in mapping.items():
            values[to_mask(key)] = float(val)
        missing = np.flatnonzero(np.isnan(values))
        if missing.size:
            raise MalformedInputError(
                f"capacity is missing subsets, e.g. {list(members(int(missing[0])))}")
        return cls(n, values)

    @classmethod
    def additive(cls, weights: Sequence[float]) -> "Capacity":
        w = np.asarray(weights, dtype=float)
        m = np.zeros(1 << len(w))
        m[1 << np.arange(len(w))] = w
        return zeta(MobiusRepresentation(len(w), m))

    @classmethod
    def from_cardinality(cls, n: int, g) -> "Capacity":
        """Symmetric capacity ``nu(A) = g(|A| / n)``."""
        n = _check_n(n)
        return cls(n, np.array([g(k / n) for k in popcounts(n)], dtype=float))


@dataclass(frozen=True, eq=False)
class MobiusRepresentation:
    """Möbius coefficients ``m(A)``, one per subset bitmask."""

    n: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = _check_n(self.n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", _as_set_function(n, self.coeffs, "Möbius coefficients"))

    def __getitem__(self, subset) -> float:
        return float(self.coeffs[to_mask(subset)])

    def __eq__(self, other):
        if not isinstance(other, MobiusRepresentation):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None


@dataclass(frozen=True)
class IndexReport:
    shapley: np.ndarray
    pairwise_interactions: dict[tuple[int, int], float]


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def _covering_drops(values: np.ndarray, n: int) -> np.ndarray:
    """Boolean array over bitmasks: some ``A \\ {i}`` has a larger value than A."""
    idx = np.arange(1 << n)
    bad = np.zeros(1 << n, dtype=bool)
    for i in range(n):
        bit = 1 << i
        has = (idx & bit) != 0
        bad[has] |= values[idx[has] ^ bit] > values[idx[has]] + MONOTONE_TOL
    return bad


def validate(capacity: Capacity) -> list[Violation]:
    """All normalization and monotonicity violations of ``capacity``.

    Monotonicity is reported for every comparable pair ``A ⊊ B`` with
    ``nu(A) > nu(B) + 1e-12`` when ``n <= 12``; for larger ``n`` only
    covering pairs ``B = A ∪ {i}`` are listed (they already decide validity).
    """
    n, v = capacity.n, capacity.values
    full = (1 << n) - 1
    out: list[Violation] = []
    if abs(v[0]) > EQ_TOL:
        out.append(Violation("normalization", 0, None, float(abs(v[0]))))
    if abs(v[full] - 1.0) > EQ_TOL:
        out.append(Violation("normalization", full, None, float(abs(v[full] - 1.0))))

    bad = _covering_drops(v, n)
    if not bad.any():
        return out
    if n <= _FULL_PAIR_SCAN_MAX_N:
        idx = np.arange(1 << n)
        for b in range(1 << n):
            subs = idx[(idx & b) == idx]
            subs = subs[subs != b]
            drop = v[subs] - v[b]
            for a in subs[drop > MONOTONE_TOL]:
                out.append(Violation("monotonicity", int(a), int(b), float(v[a] - v[b])))
    else:
        for b in np.flatnonzero(bad):
            for i in members(int(b)):
                a = int(b) ^ (1 << i)
                if v[a] > v[b] + MONOTONE_TOL:
                    out.append(Violation("monotonicity", a, int(b), float(v[a] - v[b])))
    return out


def require_valid(capacity: Capacity) -> Capacity:
    if not isinstance(capacity, Capacity):
        raise MalformedInputError(f"expected a Capacity, got {type(capacity).__name__}")
    if capacity.violations:
        first = capacity.violations[0].describe(capacity.n)
        raise ValidationError(
            f"invalid capacity ({len(capacity.violations)} violations; first: {first})",
            capacity.violations)
    return capacity


# --------------------------------------------------------------------------
# transforms
# --------------------------------------------------------------------------

def _zeta_inplace(a: np.ndarray, n: int) -> None:
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]


def _mobius_inplace(a: np.ndarray, n: int) -> None:
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 1, :] -= view[:, 0, :]


def _superset_sum_inplace(a: np.ndarray, n: int) -> None:
    """a[B] <- sum over A ⊇ B of a[A] (transpose of the zeta transform)."""
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 0, :] += view[:, 1, :]


def mobius(capacity: Capacity) -> MobiusRepresentation:
    """Möbius transform ``m(A) = sum_{B ⊆ A} (-1)^{|A \\ B|} nu(B)`` in O(n 2^n)."""
    require_valid(capacity)
    a = capacity.values.copy()
    _mobius_inplace(a, capacity.n)
    return MobiusRepresentation(capacity.n, a)


def zeta(m: MobiusRepresentation) -> Capacity:
    """Inverse of :func:`mobius`: ``nu(A) = sum_{B ⊆ A} m(B)``. Does not validate."""
    a = m.coeffs.copy()
    _zeta_inplace(a, m.n)
    return Capacity(m.n, a)


def set_function_mobius(values: np.ndarray, n: int) -> np.ndarray:
    """Möbius transform of an arbitrary set function (no capacity checks)."""
    a = np.array(values, dtype=float)
    _mobius_inplace(a, n)
    return a


# --------------------------------------------------------------------------
# indices as linear functionals of nu
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def shapley_weights(n: int) -> np.ndarray:
    """``(n - t - 1)! t! / n!`` for ``t = 0..n-1``."""
    return np.array([1.0 / (n * comb(n - 1, t)) for t in range(n)])


@lru_cache(maxsize=None)
def interaction_weights(n: int, p: int) -> np.ndarray:
    """``xi_k^p = (n - k - p)! k! / (n - p + 1)!`` for ``k = 0..n-p``."""
    return np.array([1.0 / ((n - p + 1) * comb(n - p, k)) for k in range(n - p + 1)])


def shapley_functional(n: int, i: int) -> np.ndarray:
    """Coefficient vector ``c`` with ``shapley(nu)[i] == c @ nu.values``."""
    idx = np.arange(1 << n)
    bit = 1 << i
    t = idx[(idx & bit) == 0]
    w = shapley_weights(n)[popcounts(n)[t]]
    c = np.zeros(1 << n)
    c[t | bit] += w
    c[t] -= w
    return c


def interaction_functional(n: int, subset) -> np.ndarray:
    """Coefficient vector of the interaction index of ``subset`` as a function of nu."""
    tmask = to_mask(subset)
    tmembers = members(tmask)
    p = len(tmembers)
    if p == 0:
        raise DomainError("interaction index of the empty set is undefined")
    if tmask >> n:
        raise DomainError(f"subset {list(tmembers)} is not contained in N (n={n})")
    idx = np.arange(1 << n)
    ks = idx[(idx & tmask) == 0]
    xi = interaction_weights(n, p)[popcounts(n)[ks]]
    c = np.zeros(1 << n)
    for lmask in range(1 << p):
        sub = to_mask(tmembers[b] for b in range(p) if lmask >> b & 1)
        sign = -1.0 if (p - bin(lmask).count("1")) % 2 else 1.0
        np.add.at(c, ks | sub, sign * xi)
    return c


def shapley(capacity: Capacity) -> np.ndarray:
    """Shapley value of every criterion from the defining marginal-contribution sum."""
    require_valid(capacity)
    n, v = capacity.n, capacity.values
    return np.array([shapley_functional(n, i) @ v for i in range(n)])


def shapley_from_mobius(m: MobiusRepresentation) -> np.ndarray:
    """``phi(i) = sum_{A ∋ i} m(A) / |A|``."""
    n = m.n
    idx = np.arange(1 << n)
    pc = popcounts(n)
    scaled = np.zeros(1 << n)
    scaled[1:] = m.coeffs[1:] / pc[1:]
    return np.array([scaled[(idx >> i) & 1 == 1].sum() for i in range(n)])


def interaction_index(capacity: Capacity, subset) -> float:
    """Interaction index ``I(T)`` from the defining triple sum; ``I({i})`` is Shapley."""
    require_valid(capacity)
    return float(interaction_functional(capacity.n, subset) @ capacity.values)


def interaction_pair_mobius(m: MobiusRepresentation, i: int, j: int) -> float:
    """``I(ij) = sum_{A ⊇ {i,j}} m(A) / (|A| - 1)``."""
    if i == j:
        raise DomainError("pair interaction needs two distinct criteria")
    n = m.n
    if not (0 <= i < n and 0 <= j < n):
        raise DomainError(f"criteria ({i}, {j}) out of range for n={n}")
    pair = (1 << i) | (1 << j)
    idx = np.arange(1 << n)
    sel = (idx & pair) == pair
    return float((m.coeffs[sel] / (popcounts(n)[sel] - 1)).sum())


def index_report(capacity: Capacity) -> IndexReport:
    phi = shapley(capacity)
    n = capacity.n
    pairs = {(i, j): interaction_index(capacity, (i, j))
             for i in range(n) for j in range(i + 1, n)}
    return IndexReport(phi, pairs)


# --------------------------------------------------------------------------
# structural predicates
# --------------------------------------------------------------------------

def is_supermodular(capacity: Capacity, tol: float = EQ_TOL) -> bool:
    """``nu(A ∪ B) + nu(A ∩ B) >= nu(A) + nu(B)`` for all A, B.

    For n above 10 the equivalent local form (second differences over
    ``A, i, j ∉ A``) is used to keep memory bounded.
    """
    n, v = capacity.n, capacity.values
    if n <= _FULL_SUPERMODULAR_SCAN_MAX_N:
        idx = np.arange(1 << n)
        union = idx[:, None] | idx[None, :]
        inter = idx[:, None] & idx[None, :]
        slack = v[union] + v[inter] - v[:, None] - v[None, :]
        return bool(slack.min() >= -tol)
    return bool(_second_differences(v, n).min(initial=0.0) >= -tol)


def _second_differences(v: np.ndarray, n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            pair = (1 << i) | (1 << j)
            a = idx[(idx & pair) == 0]
            out.append(v[a | pair] - v[a | (1 << i)] - v[a | (1 << j)] + v[a])
    return np.concatenate(out) if out else np.zeros(0)


def mobius_convexity_criterion(m: MobiusRepresentation, tol: float = EQ_TOL) -> bool:
    """``sum_{ {i,j} ⊆ B ⊆ A } m(B) >= 0`` for every pair i != j and every A ⊇ {i,j}."""
    n = m.n
    idx = np.arange(1 << n)
    for i in range(n):
        for j in range(i + 1, n):
            pair = (1 << i) | (1 << j)
            sel = (idx & pair) == pair
            g = np.where(sel, m.coeffs, 0.0)
            _zeta_inplace(g, n)
            if g[sel].min() < -tol:
                return False
    return True


def is_convex(capacity: Capacity) -> bool:
    """Supermodularity verdict, cross-checked against the Möbius criterion.

    Raises InternalConsistencyError if the two criteria disagree.
    """
    require_valid(capacity)
    direct = is_supermodular(capacity)
    via_mobius = mobius_convexity_criterion(mobius(capacity))
    if direct != via_mobius:
        raise InternalConsistencyError(
            f"convexity verdicts disagree: supermodularity={direct}, Möbius={via_mobius}")
    return direct


def is_k_additive(m: MobiusRepresentation, k: int, tol: float = EQ_TOL) -> bool:
    if not 1 <= k <= m.n:
        raise DomainError(f"k must lie in [1, {m.n}], got {k}")
    high = popcounts(m.n) > k
    return bool(np.all(np.abs(m.coeffs[high]) <= tol))


def is_01(capacity: Capacity, tol: float = EQ_TOL) -> bool:
    require_valid(capacity)
    v = capacity.values
    return bool(np.all((np.abs(v) <= tol) | (np.abs(v - 1.0) <= tol)))


def fractional_subsets(capacity: Capacity, tol: float = EQ_TOL) -> list[int]:
    v = capacity.values
    return [int(a) for a in np.flatnonzero((np.abs(v) > tol) & (np.abs(v - 1.0) > tol))]


# --------------------------------------------------------------------------
# construction helpers
# --------------------------------------------------------------------------

def random_capacity(n: int, rng: np.random.Generator | int | None = None,
                    spread: float = 1.0) -> Capacity:
    """Random valid capacity built layer by layer from random increments.

    Each ``nu(A)`` is the largest value among its maximal proper subsets plus
    a uniform increment, then everything is divided by ``nu(N)``. The result
    has generic Möbius coefficients of every order.
    """
    n = _check_n(n)
    rng = np.random.default_rng(rng)
    pc = popcounts(n)
    idx = np.arange(1 << n)
    v = np.zeros(1 << n)
    for k in range(1, n + 1):
        layer = idx[pc == k]
        base = np.zeros(layer.size)
        for i in range(n):
            bit = 1 << i
            has = (layer & bit) != 0
            base[has] = np.maximum(base[has], v[layer[has] ^ bit])
        v[layer] = base + spread * rng.random(layer.size)
    v /= v[-1]
    v[-1] = 1.0
    return Capacity(n, v)


def repair(values: np.ndarray, n: int) -> np.ndarray:
    """Clip to [0, 1], pin ∅ and N, and restore monotonicity by upward closure.

    Meant for LP output whose rows hold only up to solver tolerance.
    """
    v = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    v[0] = 0.0
    v[-1] = 1.0
    idx = np.arange(1 << n)
    for i in range(n):
        bit = 1 << i
        has = (idx & bit) != 0
        v[idx[has]] = np.maximum(v[idx[has]], v[idx[has] ^ bit])
    return v


def subsets_of(n: int, sizes: Iterable[int] | None = None) -> list[int]:
    pc = popcounts(n)
    idx = np.arange(1 << n)
    if sizes is None:
        return [int(a) for a in idx]
    sizes = set(sizes)
    return [int(a) for a in idx if pc[a] in sizes]
