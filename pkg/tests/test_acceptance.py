"""Acceptance suite: one test per criterion, each reported as a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from choquet.axioms import (  # noqa: E402
    FiniteRelation,
    check_convexity_axiom,
    check_lattice_axiom,
    check_ordinal_axiom,
    interaction_groups,
    interaction_groups_scan,
    tradeoff_grid,
)
from choquet.capacity import (  # noqa: E402
    Capacity,
    MobiusRepresentation,
    interaction_index,
    interaction_pair_mobius,
    is_supermodular,
    mobius,
    mobius_convexity_criterion,
    popcounts,
    random_capacity,
    shapley,
    shapley_from_mobius,
    zeta,
)
from choquet.integral import (  # noqa: E402
    LatticePolynomial,
    choquet,
    choquet_batch,
    choquet_mobius,
    dualize,
    eval_lattice_poly,
    extract_dnf,
    order_statistic_capacity,
)
from choquet.joint import (  # noqa: E402
    ExperimentSpec,
    JointConfig,
    identifiability_experiment,
    learn_joint,
    sample_preferences,
    synth_model,
)
from choquet.learn import IdentificationConfig, LearnStatus, check_fit, identify  # noqa: E402
from choquet.lp import LinearProgram, Status, solve  # noqa: E402
from choquet.values import ValueFunctionSet  # noqa: E402

from oracles import lp_vertices, supermodular_naive, as_dict  # noqa: E402

RESULTS: dict[int, tuple[bool, float, str]] = {}


def criterion(number):
    """Record pass/fail, wall time and the failure message of one criterion."""
    def wrap(fn):
        def test():
            t0 = time.perf_counter()
            try:
                note = fn() or ""
            except Exception as exc:
                msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
                RESULTS[number] = (False, time.perf_counter() - t0, msg)
                raise
            RESULTS[number] = (True, time.perf_counter() - t0, note)
        test.__name__ = fn.__name__
        test.__doc__ = fn.__doc__
        return test
    return wrap


def report_lines():
    lines = []
    for k in sorted(RESULTS):
        ok, dt, note = RESULTS[k]
        lines.append(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'} ({dt:.1f} s)"
                     + (f" {note}" if note else ""))
    return lines


def _mixed_capacity(rng, n):
    """Random valid capacity: generic, convex or 0-1 with some probability."""
    u = rng.random()
    if u < 0.6:
        return random_capacity(n, rng, spread=float(rng.choice([0.1, 1.0, 5.0])))
    if u < 0.85:
        m = np.zeros(1 << n)
        m[1:] = rng.random((1 << n) - 1) ** 3
        m /= m.sum()
        return zeta(MobiusRepresentation(n, m))
    v = (random_capacity(n, rng).values >= rng.random()).astype(float)
    v[0], v[-1] = 0.0, 1.0
    return Capacity(n, v)


@criterion(1)
def test_transform_suite():
    """Möbius/zeta round trip and both forms of the Shapley and interaction indices."""
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        cap = _mixed_capacity(rng, n)
        m = mobius(cap)
        back = zeta(m)
        worst = max(worst, np.abs(back.values - cap.values).max())
        phi = shapley(cap)
        assert np.abs(phi - shapley_from_mobius(m)).max() <= 1e-9
        assert abs(phi.sum() - 1.0) <= 1e-9
        for i in range(n):
            assert abs(interaction_index(cap, [i]) - phi[i]) <= 1e-9
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for k in rng.choice(len(pairs), size=min(4, len(pairs)), replace=False):
            i, j = pairs[k]
            assert abs(interaction_index(cap, [i, j]) - interaction_pair_mobius(m, i, j)) <= 1e-9
    assert worst <= 1e-9, f"round trip error {worst:.3g}"
    dt = time.perf_counter() - t0
    assert dt < 10, f"took {dt:.1f} s"
    return f"max round-trip error {worst:.1e}"


@criterion(2)
def test_choquet_cross_form():
    """Sort form against Möbius form, plus idempotence and monotonicity."""
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        cap = _mixed_capacity(rng, n) if n > 1 else Capacity(1, [0.0, 1.0])
        p = rng.random(n)
        worst = max(worst, abs(choquet(cap, p) - choquet_mobius(mobius(cap), p)))
        c = float(rng.random())
        assert abs(choquet(cap, np.full(n, c)) - c) <= 1e-12
        q = np.minimum(1.0, p + rng.random(n) * (rng.random(n) < 0.5))
        assert choquet(cap, q) >= choquet(cap, p) - 1e-12
    assert worst <= 1e-9, f"cross-form error {worst:.3g}"
    dt = time.perf_counter() - t0
    assert dt < 5, f"took {dt:.1f} s"
    return f"max cross-form error {worst:.1e}"


def all_01_capacities(n):
    """Every monotone 0-1 set function with nu(empty) = 0 and nu(N) = 1."""
    size = 1 << n
    idx = np.arange(size)
    inner = np.arange(1 << (size - 2), dtype=np.int64)
    V = np.zeros((inner.size, size), dtype=bool)
    for b in range(size - 2):
        V[:, b + 1] = (inner >> b) & 1
    V[:, -1] = True
    ok = np.ones(inner.size, dtype=bool)
    for i in range(n):
        has = idx[(idx >> i) & 1 == 1]
        ok &= ~np.any(V[:, has ^ (1 << i)] & ~V[:, has], axis=1)
    return [Capacity(n, row.astype(float)) for row in V[ok]]


@criterion(3)
def test_lattice_polynomials_exhaustive():
    """Every 0-1 capacity on four criteria is its own lattice polynomial."""
    t0 = time.perf_counter()
    caps = all_01_capacities(4)
    # the Dedekind number for four variables is 168, minus the two constants
    assert len(caps) == 166, f"found {len(caps)} 0-1 capacities"
    rng = np.random.default_rng(303)
    worst = 0.0
    for cap in caps:
        lp = extract_dnf(cap)
        assert lp.to_capacity() == cap
        assert dualize(dualize(lp.dnf_family, 4), 4) == lp.dnf_family
        assert dualize(lp.cnf_family, 4) == lp.dnf_family
        P = rng.random((100, 4))
        ref = choquet_batch(cap, P)
        for p, r in zip(P, ref):
            d = eval_lattice_poly(lp, p, "DNF")
            assert d == eval_lattice_poly(lp, p, "CNF")
            assert d in p
            worst = max(worst, abs(d - r))
    assert worst <= 1e-12, f"lattice vs integral {worst:.3g}"
    dt = time.perf_counter() - t0
    assert dt < 60, f"took {dt:.1f} s"
    return f"{len(caps)} capacities, max deviation {worst:.1e}"


@criterion(4)
def test_order_statistics():
    """The k-th order-statistic capacity integrates to the k-th smallest value."""
    rng = np.random.default_rng(404)
    for n in range(1, 8):
        for k in range(1, n + 1):
            P = rng.random((1000, n))
            got = choquet_batch(order_statistic_capacity(n, k), P)
            assert np.array_equal(got, np.sort(P, axis=1)[:, k - 1]), f"n={n} k={k}"


@criterion(5)
def test_convexity_agreement():
    """Supermodularity scan and Möbius criterion give the same verdict."""
    rng = np.random.default_rng(505)
    convex = 0
    for t in range(1000):
        n = int(rng.integers(2, 6))
        cap = _mixed_capacity(rng, n)
        a = is_supermodular(cap)
        assert a == mobius_convexity_criterion(mobius(cap)), f"capacity {t} disagrees"
        if t < 200:
            assert a == supermodular_naive(as_dict(cap.values, n), n, 1e-12)
        convex += a
    assert 100 < convex < 900, f"only {convex} convex cases"
    for n in range(2, 6):
        sq = Capacity.from_cardinality(n, lambda x: x * x)
        rt = Capacity.from_cardinality(n, np.sqrt)
        assert is_supermodular(sq) and mobius_convexity_criterion(mobius(sq))
        assert not is_supermodular(rt) and not mobius_convexity_criterion(mobius(rt))
    return f"{convex} of 1000 convex"


@criterion(6)
def test_identification_soundness():
    """Exact fits on complete grid data; 2-additive fits carry no order-3 mass."""
    t0 = time.perf_counter()
    top = popcounts(3) == 3
    worst = 0.0
    for seed in range(50):
        data = sample_preferences(synth_model(3, 3, seed, "full"))
        res = identify(data)
        assert res.status is LearnStatus.FEASIBLE_EXACT, f"seed {seed}: {res.status.value}"
        assert check_fit(res.capacity, data).count == 0, f"seed {seed}"
        two = identify(data, IdentificationConfig(k_additive=2, objective="min-slack"))
        worst = max(worst, float(np.abs(mobius(two.capacity).coeffs[top]).max()))
    assert worst <= 1e-7, f"order-3 mass {worst:.3g}"
    dt = time.perf_counter() - t0
    assert dt < 60, f"took {dt:.1f} s"
    return f"max order-3 mass {worst:.1e}"


@criterion(7)
def test_confounding_exhibit():
    """Additive truths leave wide pair intervals; grouped truths keep cross-group interactions at zero."""
    widths = []
    for seed in range(3):
        add = identifiability_experiment(ExperimentSpec(3, 3, "additive", seed=seed))
        full = identifiability_experiment(ExperimentSpec(3, 3, "full", seed=seed))
        assert add.max_pair_width >= 0.1, f"seed {seed}: additive width {add.max_pair_width:.3g}"
        assert full.max_pair_width < add.max_pair_width, \
            f"seed {seed}: full {full.max_pair_width:.3g} vs additive {add.max_pair_width:.3g}"
        widths.append((add.max_pair_width, full.max_pair_width))
    cross = 0.0
    for spec in ("groups=0,1;2", "groups=0;1,2"):
        for seed in range(2):
            rep = identifiability_experiment(ExperimentSpec(3, 4, spec, seed=seed))
            assert rep.status == "FeasibleExact"
            cross = max(cross, rep.cross_group_interaction)
    assert cross <= 1e-6, f"cross-group interaction {cross:.3g}"
    lo = min(w[0] for w in widths)
    hi = max(w[1] for w in widths)
    return f"additive widths >= {lo:.2f}, full widths <= {hi:.2f}, cross {cross:.1e}"


@criterion(8)
def test_joint_learning_self_consistency():
    """Alternating learning fits twenty complete four-level datasets."""
    t0 = time.perf_counter()
    failed = []
    for seed in range(20):
        data = sample_preferences(synth_model(3, 4, seed, "full"))
        rep = learn_joint(data, JointConfig(restarts=10))
        for tr in rep.traces:
            h = tr.history
            assert all(a >= b for a, b in zip(h, h[1:])), f"seed {seed}: history {h}"
        if rep.violations:
            failed.append((seed, rep.violations))
    dt = time.perf_counter() - t0
    assert not failed, f"violations left (seed, count): {failed}"
    assert dt < 300, f"took {dt:.1f} s"
    return "20 of 20 datasets fitted"


def _grid(n, levels):
    return tuple(tuple(range(levels)) for _ in range(n))


@criterion(9)
def test_axiom_scanners():
    """Each characterized family satisfies its own condition; the group scans agree."""
    for n in (2, 3):
        for levels in (2, 3, 4):
            vf = ValueFunctionSet(_grid(n, levels), (np.linspace(0, 1, levels),) * n)
            rel = lambda cap: FiniteRelation.from_model(cap, vf)  # noqa: E731
            assert check_ordinal_axiom(rel(order_statistic_capacity(n, n)), "max") == []
            assert check_ordinal_axiom(rel(order_statistic_capacity(n, 1)), "min") == []
            assert check_ordinal_axiom(rel(order_statistic_capacity(n, n - 1)), "os") == []
            for fam in ([[0, 1]], [[0], [1]], [[0, 1], [0, 2]], [[0], [1, 2]]):
                if max(i for b in fam for i in b) >= n:
                    continue
                lp = LatticePolynomial.from_dnf(n, fam)
                found = check_lattice_axiom(rel(lp.to_capacity()),
                                            [[i for i in range(n) if a >> i & 1] for a in lp.cnf_family],
                                            fam)
                assert found == [], f"lattice family {fam} flagged"
            if levels > 1:
                assert check_ordinal_axiom(rel(order_statistic_capacity(n, 1)), "max"), \
                    "min relation passes the max condition"
    sq = Capacity.from_cardinality(3, lambda t: t * t)
    assert check_convexity_axiom(sq, tradeoff_grid(sq)) == []
    rt = Capacity.from_cardinality(3, np.sqrt)
    n_rt = len(check_convexity_axiom(rt, tradeoff_grid(rt)))
    assert n_rt >= 1
    mismatched = []
    total = 0
    for spec in ("additive", "groups=0,1;2", "groups=0;1,2", "full"):
        for seed in range(5):
            model = synth_model(3, 4, seed, spec)
            rel = FiniteRelation.from_model(model.capacity, model.value_functions)
            total += 1
            if interaction_groups(model.capacity) != interaction_groups_scan(rel):
                mismatched.append(f"{spec}/{seed}")
    assert not mismatched, (f"Möbius and triple-cancellation groups differ on "
                            f"{len(mismatched)} of {total} models: {', '.join(mismatched[:4])} ...")
    return f"sqrt capacity: {n_rt} witnesses"


def _random_program(rng, nvar):
    m = int(rng.integers(1, 5))
    A = rng.integers(-4, 5, size=(m, nvar)).astype(float)
    b = rng.integers(-3, 8, size=m).astype(float)
    c = rng.integers(-5, 6, size=nvar).astype(float)
    lo = rng.integers(-2, 1, size=nvar).astype(float)
    hi = lo + rng.integers(1, 5, size=nvar)
    return c, A, b, lo, hi


@criterion(10)
def test_lp_determinism_and_correctness():
    """Simplex optimum equals the vertex-enumeration optimum; reruns are bit-identical."""
    rng = np.random.default_rng(1010)
    infeasible = 0
    for t in range(200):
        nvar = int(rng.integers(1, 4))
        c, A, b, lo, hi = _random_program(rng, nvar)
        lp = LinearProgram(c, A, ("<=",) * len(b), b, lo, hi)
        ref = lp_vertices(c, A, b, lo, hi)
        sol, again = solve(lp), solve(lp)
        assert sol.status == again.status
        same_x = (sol.x is None and again.x is None) or sol.x.tobytes() == again.x.tobytes()
        assert same_x and sol.objective == again.objective, f"program {t}: rerun differs"
        if ref is None:
            assert sol.status is Status.INFEASIBLE, f"program {t}"
            infeasible += 1
        else:
            assert sol.status is Status.OPTIMAL, f"program {t}"
            assert abs(sol.objective - ref) <= 1e-9, f"program {t}: {sol.objective} vs {ref}"
    return f"{200 - infeasible} optimal, {infeasible} infeasible"


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for fn in sorted(tests, key=lambda f: f.__code__.co_firstlineno):
        try:
            fn()
        except Exception:
            pass
    print("\n".join(report_lines()))
    sys.exit(0 if all(ok for ok, _, _ in RESULTS.values()) else 1)
