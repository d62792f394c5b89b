import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from choquet.exceptions import DomainError, InfeasibleError, MalformedInputError
from choquet.lp import LinearProgram, Status, probe_bounds, solve, vertex_enumeration

from oracles import lp_vertices


def test_single_bound():
    lp = LinearProgram.from_rows([1.0], [([1.0], ">=", 3.0)])
    sol = solve(lp)
    assert sol.status is Status.OPTIMAL and np.isclose(sol.x[0], 3.0)


def test_infeasible():
    lp = LinearProgram.from_rows([1.0], [([1.0], "<=", 1.0), ([1.0], ">=", 2.0)])
    assert solve(lp).status is Status.INFEASIBLE
    with pytest.raises(InfeasibleError):
        probe_bounds(lp, 0)


def test_edge_optimum():
    lp = LinearProgram.from_rows([-1.0, -1.0], [([1.0, 1.0], "<=", 1.0)])
    sol = solve(lp)
    assert np.isclose(sol.objective, -1.0)
    assert lp.max_violation(sol.x) < 1e-9


def test_unbounded():
    lp = LinearProgram.from_rows([-1.0, 0.0], [([1.0, -1.0], "<=", 1.0)])
    assert solve(lp).status is Status.UNBOUNDED


def test_probe_bounds_examples():
    box = LinearProgram.from_rows([0.0], [], bounds=[(0.0, 1.0)])
    assert probe_bounds(box, 0) == (0.0, 1.0)
    pinned = LinearProgram.from_rows([0.0], [([1.0], "=", 0.5)])
    assert np.allclose(probe_bounds(pinned, 0), (0.5, 0.5))
    free = LinearProgram.from_rows([0.0], [([1.0], "<=", 2.0)], bounds=[(None, None)])
    lo, hi = probe_bounds(free, 0)
    assert lo == -np.inf and np.isclose(hi, 2.0)


def test_free_and_negative_bounds():
    # min x + 2y, x free, y in [-3, -1], x + y >= -2
    lp = LinearProgram.from_rows([1.0, 2.0], [([1.0, 1.0], ">=", -2.0)],
                                 bounds=[(None, None), (-3.0, -1.0)])
    sol = solve(lp)
    assert np.isclose(sol.objective, -5.0)
    assert np.allclose(sol.x, [1.0, -3.0])


def test_degenerate_cycling_example_terminates():
    # a classic program on which textbook Dantzig pricing cycles
    c = [-0.75, 150.0, -0.02, 6.0]
    rows = [([0.25, -60.0, -0.04, 9.0], "<=", 0.0),
            ([0.5, -90.0, -0.02, 3.0], "<=", 0.0),
            ([0.0, 0.0, 1.0, 0.0], "<=", 1.0)]
    lp = LinearProgram.from_rows(c, rows)
    for rule in ("dantzig", "bland"):
        sol = solve(lp, rule)
        assert sol.status is Status.OPTIMAL
        assert np.isclose(sol.objective, -0.05)


def test_input_checks():
    with pytest.raises(MalformedInputError):
        LinearProgram.from_rows([1.0], [([1.0], "<>", 1.0)])
    with pytest.raises(DomainError):
        LinearProgram.from_rows([1.0, 2.0], [([1.0], "<=", 1.0)])
    with pytest.raises(DomainError):
        LinearProgram.from_rows([1.0], [], bounds=[(2.0, 1.0)])
    with pytest.raises(DomainError):
        solve(LinearProgram.from_rows([1.0], []), rule="steepest")


def _random_program(rng, nvar):
    m = int(rng.integers(1, 5))
    A = rng.integers(-4, 5, size=(m, nvar)).astype(float)
    b = rng.integers(-3, 8, size=m).astype(float)
    c = rng.integers(-5, 6, size=nvar).astype(float)
    lo = rng.integers(-2, 1, size=nvar).astype(float)
    hi = lo + rng.integers(1, 5, size=nvar)
    return c, A, b, lo, hi


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31), nvar=st.integers(1, 3))
def test_matches_vertex_oracle(seed, nvar):
    rng = np.random.default_rng(seed)
    c, A, b, lo, hi = _random_program(rng, nvar)
    lp = LinearProgram(c, A, ("<=",) * len(b), b, lo, hi)
    ref = lp_vertices(c, A, b, lo, hi)
    sol = solve(lp)
    if ref is None:
        assert sol.status is Status.INFEASIBLE
    else:
        assert sol.status is Status.OPTIMAL
        assert abs(sol.objective - ref) < 1e-7
        assert lp.max_violation(sol.x) < 1e-7
        assert abs(vertex_enumeration(lp).objective - ref) < 1e-9


def test_matches_reference_solver_on_larger_programs():
    linprog = pytest.importorskip("scipy.optimize").linprog
    rng = np.random.default_rng(11)
    for _ in range(40):
        nvar, m = int(rng.integers(3, 9)), int(rng.integers(2, 9))
        A = rng.normal(size=(m, nvar))
        x0 = rng.random(nvar)
        b = A @ x0 + rng.random(m)
        eq = rng.normal(size=(1, nvar))
        c = rng.normal(size=nvar)
        lp = LinearProgram(c, np.vstack([A, eq]), ("<=",) * m + ("=",), np.r_[b, eq @ x0],
                           np.zeros(nvar), np.full(nvar, 2.0))
        ref = linprog(c, A_ub=A, b_ub=b, A_eq=eq, b_eq=eq @ x0, bounds=[(0, 2)] * nvar)
        sol = solve(lp)
        assert sol.is_optimal and ref.status == 0
        assert abs(sol.objective - ref.fun) < 1e-7


def test_bit_identical_reruns():
    rng = np.random.default_rng(1)
    c, A, b, lo, hi = _random_program(rng, 3)
    lp = LinearProgram(c, A, ("<=",) * len(b), b, lo, hi)
    a, bsol = solve(lp), solve(lp)
    assert a.status == bsol.status
    if a.is_optimal:
        assert a.x.tobytes() == bsol.x.tobytes() and a.objective == bsol.objective
