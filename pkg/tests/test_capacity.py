import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from choquet.capacity import (
    Capacity,
    MobiusRepresentation,
    interaction_index,
    interaction_pair_mobius,
    is_01,
    is_convex,
    is_k_additive,
    is_supermodular,
    mobius,
    mobius_convexity_criterion,
    random_capacity,
    repair,
    shapley,
    shapley_from_mobius,
    validate,
    zeta,
)
from choquet.exceptions import MalformedInputError
from choquet.integral import order_statistic_capacity

from oracles import as_dict, mobius_naive, pair_interaction_naive, shapley_by_orders, supermodular_naive

EX = Capacity(2, [0.0, 0.3, 0.5, 1.0])


def test_validate_examples():
    assert validate(EX) == []
    bad = validate(Capacity(2, [0.0, 0.6, 0.5, 0.5]))
    kinds = [v.kind for v in bad]
    assert "monotonicity" in kinds
    assert any(v.subset == 0b01 and v.superset == 0b11 for v in bad)


def test_validate_flags_normalization():
    bad = validate(Capacity(2, [0.1, 0.3, 0.5, 0.9]))
    assert {v.kind for v in bad} == {"normalization"}
    assert len(bad) == 2


def test_random_capacities_are_valid():
    rng = np.random.default_rng(3)
    for n in range(1, 7):
        for _ in range(10):
            assert random_capacity(n, rng).is_valid


def test_mobius_examples():
    m = mobius(EX)
    assert np.allclose(m.coeffs, [0.0, 0.3, 0.5, 0.2])
    w = np.array([0.2, 0.3, 0.5])
    ma = mobius(Capacity.additive(w))
    assert np.allclose(ma.coeffs[[1, 2, 4]], w)
    assert np.allclose(np.delete(ma.coeffs, [1, 2, 4]), 0.0)


def test_zeta_examples():
    assert np.allclose(zeta(MobiusRepresentation(2, [0, 0, 0, 1.0])).values, [0, 0, 0, 1])
    assert np.allclose(zeta(mobius(EX)).values, EX.values)
    n = 4
    m = np.zeros(16)
    m[[1, 2, 4, 8]] = 1 / n
    nu = zeta(MobiusRepresentation(n, m)).values
    assert np.allclose(nu, [bin(a).count("1") / n for a in range(16)])


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**31))
def test_mobius_matches_alternating_sum(n, seed):
    cap = random_capacity(n, seed)
    nu = as_dict(cap.values, n)
    naive = mobius_naive(nu, n)
    m = mobius(cap)
    assert all(abs(m[sorted(a)] - v) < 1e-9 for a, v in naive.items())
    assert np.allclose(zeta(m).values, cap.values, atol=1e-9)


def test_shapley_examples():
    assert np.allclose(shapley(EX), [0.4, 0.6])
    w = [0.1, 0.6, 0.3]
    assert np.allclose(shapley(Capacity.additive(w)), w)
    assert np.isclose(shapley_from_mobius(mobius(EX))[0], 0.4)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 6), seed=st.integers(0, 2**31))
def test_shapley_matches_arrival_orders(n, seed):
    cap = random_capacity(n, seed)
    ref = shapley_by_orders(as_dict(cap.values, n), n)
    assert np.allclose(shapley(cap), ref, atol=1e-9)
    assert np.allclose(shapley_from_mobius(mobius(cap)), ref, atol=1e-9)
    assert np.isclose(ref.sum(), 1.0)


def test_interaction_examples():
    assert np.isclose(interaction_index(EX, [0, 1]), 0.2)
    assert np.isclose(interaction_pair_mobius(mobius(EX), 0, 1), 0.2)
    add = Capacity.additive([0.2, 0.3, 0.5])
    assert abs(interaction_index(add, [0, 1, 2])) < 1e-12
    assert abs(interaction_index(add, [0, 2])) < 1e-12
    # mass only on {0,1}: nothing involves both 1 and 2
    m = np.zeros(8)
    m[0b011] = 0.4
    m[0b100] = 0.6
    assert interaction_pair_mobius(MobiusRepresentation(3, m), 1, 2) == 0.0


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 2**31))
def test_pair_interaction_forms_agree(n, seed):
    cap = random_capacity(n, seed)
    nu = as_dict(cap.values, n)
    m = mobius(cap)
    for i in range(n):
        assert np.isclose(interaction_index(cap, [i]), shapley(cap)[i], atol=1e-12)
        for j in range(i + 1, n):
            ref = pair_interaction_naive(nu, n, i, j)
            assert abs(interaction_index(cap, [i, j]) - ref) < 1e-9
            assert abs(interaction_pair_mobius(m, i, j) - ref) < 1e-9


def test_convexity_examples():
    sq = Capacity.from_cardinality(3, lambda t: t * t)
    rt = Capacity.from_cardinality(3, np.sqrt)
    assert is_supermodular(sq) and mobius_convexity_criterion(mobius(sq)) and is_convex(sq)
    assert not is_supermodular(rt) and not mobius_convexity_criterion(mobius(rt))
    assert is_convex(Capacity.additive([0.5, 0.25, 0.25]))


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 4), seed=st.integers(0, 2**31), spread=st.sampled_from([0.05, 1.0]))
def test_convexity_matches_pair_scan(n, seed, spread):
    cap = random_capacity(n, seed, spread)
    ref = supermodular_naive(as_dict(cap.values, n), n, 1e-9)
    assert is_supermodular(cap) == ref
    assert mobius_convexity_criterion(mobius(cap)) == ref


def test_k_additivity_and_01():
    assert is_k_additive(mobius(Capacity.additive([0.5, 0.5])), 1)
    assert not is_k_additive(mobius(EX), 1)
    assert is_k_additive(mobius(random_capacity(4, 0)), 4)
    assert is_01(Capacity(3, [0.0] * 7 + [1.0]))
    assert not is_01(EX)
    assert is_01(order_statistic_capacity(3, 2))


def test_repair_restores_validity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = repair(rng.normal(0.5, 0.4, 16), 4)
        assert Capacity(4, v).is_valid


def test_from_mapping_rejects_missing_subsets():
    with pytest.raises(MalformedInputError):
        Capacity.from_mapping(2, {(0,): 0.3, (0, 1): 1.0})
    cap = Capacity.from_mapping(2, {(0,): 0.3, (1,): 0.5, (0, 1): 1.0})
    assert cap == EX
    assert cap[[1]] == 0.5
