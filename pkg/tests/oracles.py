"""Slow, obviously-correct reference implementations used only by the tests."""

from itertools import combinations, permutations
from math import factorial

import numpy as np


def subsets(n):
    return [frozenset(c) for k in range(n + 1) for c in combinations(range(n), k)]


def mask(s):
    return sum(1 << i for i in s)


def as_dict(values, n):
    return {s: float(values[mask(s)]) for s in subsets(n)}


def mobius_naive(nu, n):
    return {a: sum((-1) ** len(a - b) * nu[b] for b in subsets(n) if b <= a) for a in subsets(n)}


def shapley_by_orders(nu, n):
    """Average marginal contribution over all n! arrival orders (n <= 7)."""
    phi = np.zeros(n)
    for order in permutations(range(n)):
        seen = frozenset()
        for i in order:
            phi[i] += nu[seen | {i}] - nu[seen]
            seen = seen | {i}
    return phi / factorial(n)


def pair_interaction_naive(nu, n, i, j):
    total = 0.0
    rest = [k for k in range(n) if k not in (i, j)]
    for k in range(len(rest) + 1):
        w = factorial(n - k - 2) * factorial(k) / factorial(n - 1)
        for c in combinations(rest, k):
            s = frozenset(c)
            total += w * (nu[s | {i, j}] - nu[s | {i}] - nu[s | {j}] + nu[s])
    return total


def choquet_sorted(nu, p):
    """Textbook sort-form sum over increasing values."""
    n = len(p)
    order = sorted(range(n), key=lambda i: p[i])
    total, prev = 0.0, 0.0
    for k, i in enumerate(order):
        total += (p[i] - prev) * nu[frozenset(order[k:])]
        prev = p[i]
    return total


def supermodular_naive(nu, n, tol=1e-12):
    ss = subsets(n)
    return all(nu[a | b] + nu[a & b] >= nu[a] + nu[b] - tol for a in ss for b in ss)


def minimal_transversals(family, n):
    """Blocker by exhaustive scan: minimal sets meeting every member."""
    hits = [s for s in subsets(n) if all(s & f for f in family)]
    return {s for s in hits if not any(t < s for t in hits)}


def lp_vertices(c, A_ub, b_ub, lo, hi):
    """Brute force over all square subsystems of the active-set candidates."""
    n = len(c)
    rows = [np.asarray(a, float) for a in A_ub]
    rhs = list(b_ub)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1
        rows += [e, e]
        rhs += [lo[j], hi[j]]
    best = None
    for combo in combinations(range(len(rows)), n):
        M = np.array([rows[k] for k in combo])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, [rhs[k] for k in combo])
        if any(a @ x > b + 1e-9 for a, b in zip(A_ub, b_ub)):
            continue
        if np.any(x < np.asarray(lo) - 1e-9) or np.any(x > np.asarray(hi) + 1e-9):
            continue
        val = float(np.dot(c, x))
        if best is None or val < best:
            best = val
    return best
