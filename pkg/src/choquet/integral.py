"""Choquet integral evaluation, ordinal special cases and lattice polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .capacity import (
    Capacity,
    MobiusRepresentation,
    fractional_subsets,
    is_01,
    members,
    popcounts,
    require_valid,
    to_mask,
)
from .exceptions import DomainError, MalformedInputError


def _profile(p, n: int) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise DomainError(f"profile must have length {n}, got shape {arr.shape}")
    return arr


def _profiles(P, n: int) -> np.ndarray:
    arr = np.asarray(P, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise DomainError(f"profiles must have shape (m, {n}), got {arr.shape}")
    return arr


def level_sets(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted values and upper level sets for each row of ``P``.

    Returns ``(sorted_vals, upper)`` where ``sorted_vals[r, k]`` is the k-th
    smallest entry of row r (ties broken by criterion index) and
    ``upper[r, k]`` is the bitmask of criteria at sorted positions ``k..n-1``.
    """
    m, n = P.shape
    order = np.argsort(P, axis=1, kind="stable")
    sorted_vals = np.take_along_axis(P, order, axis=1)
    bits = (1 << order).astype(np.int64)
    upper = np.cumsum(bits[:, ::-1], axis=1)[:, ::-1]
    return sorted_vals, upper


def choquet_coefficients(P, n: int) -> np.ndarray:
    """Rows ``c`` such that ``choquet(nu, P[r]) == c[r] @ nu.values`` for every nu.

    This is the linear dependence of the integral on the capacity for a fixed
    integrand, ``sum_k (p_(k) - p_(k-1)) nu(A_k)`` with ``p_(0) = 0``.
    """
    P = _profiles(P, n)
    sorted_vals, upper = level_sets(P)
    steps = np.diff(sorted_vals, axis=1, prepend=0.0)
    out = np.zeros((P.shape[0], 1 << n))
    rows = np.repeat(np.arange(P.shape[0]), n)
    np.add.at(out, (rows, upper.ravel()), steps.ravel())
    return out


def choquet_many(values: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Sort-form integral of every row of ``P`` against raw set-function values."""
    sorted_vals, upper = level_sets(P)
    steps = np.diff(sorted_vals, axis=1, prepend=0.0)
    return (steps * values[upper]).sum(axis=1)


def choquet(capacity: Capacity, p) -> float:
    """Choquet integral of profile ``p`` with respect to ``capacity`` (sort form)."""
    require_valid(capacity)
    arr = _profile(p, capacity.n)
    return float(choquet_many(capacity.values, arr[None, :])[0])


def choquet_batch(capacity: Capacity, P) -> np.ndarray:
    require_valid(capacity)
    return choquet_many(capacity.values, _profiles(P, capacity.n))


def subset_minima(p: np.ndarray) -> np.ndarray:
    """``min_{i in A} p_i`` for every nonempty bitmask A (entry 0 is +inf)."""
    n = p.shape[0]
    mins = np.empty(1 << n)
    mins[0] = np.inf
    for i in range(n):
        mins[1 << i: 1 << (i + 1)] = np.minimum(mins[: 1 << i], p[i])
    return mins


def choquet_mobius(m: MobiusRepresentation, p) -> float:
    """Möbius form ``sum_{A != ∅} m(A) min_{i in A} p_i``."""
    arr = _profile(p, m.n)
    mins = subset_minima(arr)
    return float(m.coeffs[1:] @ mins[1:])


def order_statistic_capacity(n: int, k: int) -> Capacity:
    """0-1 capacity whose integral is the k-th smallest profile entry.

    ``nu(A) = 1`` iff ``|A| >= n - k + 1``; k = 1 gives MIN, k = n gives MAX.
    """
    if not 1 <= k <= n:
        raise DomainError(f"order statistic index k must lie in [1, {n}], got {k}")
    return Capacity(n, (popcounts(n) >= n - k + 1).astype(float))


# --------------------------------------------------------------------------
# lattice polynomials
# --------------------------------------------------------------------------

def _family(family: Iterable, n: int | None = None) -> tuple[int, ...]:
    masks = sorted({to_mask(s) for s in family})
    if not masks:
        raise DomainError("family of subsets must be nonempty")
    if 0 in masks:
        raise DomainError("family members must be nonempty")
    if n is not None and any(m >> n for m in masks):
        raise DomainError(f"family member outside N (n={n})")
    return tuple(masks)


def is_antichain(family: Sequence[int]) -> bool:
    return not any(a != b and a & b == a for a in family for b in family)


def minimal_members(family: Iterable[int]) -> tuple[int, ...]:
    fam = sorted(set(family))
    return tuple(a for a in fam if not any(b != a and b & a == b for b in fam))


def dualize(family: Iterable, n: int | None = None) -> tuple[int, ...]:
    """Minimal transversals (the blocker) of a family of nonempty subsets.

    Exhaustive scan over all subsets of ``N``; ``n`` defaults to the highest
    criterion mentioned. Returns sorted bitmasks.
    """
    fam = _family(family, n)
    if n is None:
        n = max(fam).bit_length()
    idx = np.arange(1 << n, dtype=np.int64)
    fam_arr = np.asarray(fam, dtype=np.int64)
    hits = np.ones(1 << n, dtype=bool)
    for f in fam_arr:
        hits &= (idx & f) != 0
    minimal = hits.copy()
    for i in range(n):
        bit = 1 << i
        has = (idx & bit) != 0
        minimal[has] &= ~hits[idx[has] ^ bit]
    return tuple(int(a) for a in np.flatnonzero(minimal))


@dataclass(frozen=True)
class LatticePolynomial:
    """Pair of antichains: CNF family (min of maxes) and DNF family (max of mins)."""

    n: int
    cnf_family: tuple[int, ...]
    dnf_family: tuple[int, ...]

    def __post_init__(self):
        cnf = _family(self.cnf_family, self.n)
        dnf = _family(self.dnf_family, self.n)
        for name, fam in (("CNF", cnf), ("DNF", dnf)):
            if not is_antichain(fam):
                raise DomainError(f"{name} family is not an antichain")
        object.__setattr__(self, "cnf_family", cnf)
        object.__setattr__(self, "dnf_family", dnf)

    @classmethod
    def from_dnf(cls, n: int, family: Iterable) -> "LatticePolynomial":
        dnf = minimal_members(_family(family, n))
        return cls(n, dualize(dnf, n), dnf)

    @classmethod
    def from_cnf(cls, n: int, family: Iterable) -> "LatticePolynomial":
        cnf = minimal_members(_family(family, n))
        return cls(n, cnf, dualize(cnf, n))

    def to_capacity(self) -> Capacity:
        """0-1 capacity with ``nu(A) = 1`` iff A contains a DNF member."""
        idx = np.arange(1 << self.n)
        v = np.zeros(1 << self.n)
        for b in self.dnf_family:
            v[(idx & b) == b] = 1.0
        return Capacity(self.n, v)

    def render(self, form: str = "DNF") -> str:
        form = form.upper()
        if form == "DNF":
            return " | ".join(
                "(" + " & ".join(f"x{i}" for i in members(b)) + ")" for b in self.dnf_family)
        if form == "CNF":
            return " & ".join(
                "(" + " | ".join(f"x{i}" for i in members(a)) + ")" for a in self.cnf_family)
        raise DomainError(f"form must be CNF or DNF, got {form!r}")


def capacity_from_dnf(n: int, family: Iterable) -> Capacity:
    return LatticePolynomial.from_dnf(n, family).to_capacity()


def extract_dnf(capacity: Capacity) -> LatticePolynomial:
    """Lattice polynomial of a 0-1 capacity: DNF = minimal winning sets, CNF = their blocker."""
    require_valid(capacity)
    if not is_01(capacity):
        frac = fractional_subsets(capacity)
        a = frac[0]
        raise DomainError(
            f"capacity is not 0-1: nu({list(members(a))}) = {capacity.values[a]:.6g}")
    n = capacity.n
    win = capacity.values > 0.5
    idx = np.arange(1 << n)
    minimal = win.copy()
    for i in range(n):
        bit = 1 << i
        has = (idx & bit) != 0
        minimal[has] &= ~win[idx[has] ^ bit]
    dnf = tuple(int(a) for a in np.flatnonzero(minimal))
    return LatticePolynomial(n, dualize(dnf, n), dnf)


def eval_lattice_poly(lp: LatticePolynomial, p, form: str = "DNF") -> float:
    """Evaluate with exact min/max: CNF = min over A of max_A, DNF = max over B of min_B."""
    arr = _profile(p, lp.n)
    form = form.upper()
    if form == "DNF":
        return float(max(min(arr[i] for i in members(b)) for b in lp.dnf_family))
    if form == "CNF":
        return float(min(max(arr[i] for i in members(a)) for a in lp.cnf_family))
    raise DomainError(f"form must be CNF or DNF, got {form!r}")


def parse_family(text: str) -> list[list[int]]:
    """Parse ``"0,1;2"`` into ``[[0, 1], [2]]``."""
    try:
        return [[int(x) for x in block.split(",") if x.strip()]
                for block in text.split(";") if block.strip()]
    except ValueError as exc:
        raise MalformedInputError(f"cannot parse family {text!r}: {exc}") from None
