import numpy as np
import pytest

from choquet.capacity import interaction_index, validate
from choquet.exceptions import DomainError
from choquet.integral import order_statistic_capacity
from choquet.joint import (
    ExperimentSpec,
    GroundTruthModel,
    JointConfig,
    identifiability_experiment,
    learn_joint,
    parse_interaction_spec,
    sample_preferences,
    scale_confounding,
    set_partitions,
    synth_model,
)
from choquet.learn import Deltas, Preference, PreferenceDataset, check_fit
from choquet.values import ValueFunctionSet


def test_synth_examples():
    add = synth_model(3, 3, 0, "additive").capacity
    for i, j in ((0, 1), (0, 2), (1, 2)):
        assert abs(interaction_index(add, [i, j])) < 1e-12
    grp = synth_model(3, 3, 1, "groups=0,1;2").capacity
    assert abs(interaction_index(grp, [0, 2])) < 1e-12
    assert abs(interaction_index(grp, [1, 2])) < 1e-12
    assert abs(interaction_index(grp, [0, 1])) > 1e-6
    assert validate(synth_model(3, 3, 42, "full").capacity) == []


def test_interaction_spec_parsing():
    assert parse_interaction_spec("groups=0,1;2") == ("groups", ((0, 1), (2,)))
    with pytest.raises(DomainError):
        parse_interaction_spec("sparse")
    with pytest.raises(DomainError):
        synth_model(3, 3, 0, "groups=0;1")


def test_sampling_examples():
    model = synth_model(3, 3, 0)
    assert len(sample_preferences(model).preferences) == 27 * 26 // 2
    levels = ((0, 1), (0, 1))
    flat = GroundTruthModel(order_statistic_capacity(2, 1),
                            ValueFunctionSet(levels, (np.array([0.0, 1.0]),) * 2))
    data = sample_preferences(flat)
    # the MIN model scores (1, 0) and (0, 0) alike
    p = [q for q in data.preferences if {q.better, q.worse} == {0, 2}][0]
    assert p.kind == "indifferent"
    sub = sample_preferences(model, ("random", 40, 3))
    assert len(sub.preferences) == 40


def test_set_partitions_counts():
    assert [sum(1 for _ in set_partitions(range(n))) for n in range(1, 6)] == [1, 2, 5, 15, 52]


def test_learn_joint_reaches_zero_violations():
    model = synth_model(3, 4, 2, "full")
    data = sample_preferences(model)
    rep = learn_joint(data, JointConfig(restarts=10, seed=0))
    assert rep.violations == 0
    h = rep.history
    assert all(a >= b for a, b in zip(h, h[1:]))
    # the learned pair reproduces every statement
    profiles = rep.value_functions.apply(data.labels)
    assert check_fit(rep.capacity, data.with_alternatives(profiles), tol=1e-7).count == 0


def test_learn_joint_is_deterministic():
    data = sample_preferences(synth_model(3, 3, 5, "full"))
    a = learn_joint(data, JointConfig(restarts=3, seed=1))
    b = learn_joint(data, JointConfig(restarts=3, seed=1, threads=2))
    assert a.capacity == b.capacity
    assert all(np.array_equal(x, y) for x, y in zip(a.value_functions.values, b.value_functions.values))


def test_single_informative_criterion():
    levels = ((0, 1, 2, 3), ("c",))
    labels = tuple((k, "c") for k in range(4))
    prefs = tuple(Preference(b, a) for a in range(4) for b in range(a + 1, 4))
    data = PreferenceDataset(2, None, prefs, deltas=Deltas(1e-3, 1e-3, 1e-3),
                             levels=levels, labels=labels)
    rep = learn_joint(data, JointConfig(restarts=2))
    assert rep.violations == 0


def test_intransitive_data_reports_violations():
    levels = ((0, 1, 2), (0, 1, 2))
    labels = ((2, 0), (0, 2), (1, 1))
    prefs = (Preference(0, 1), Preference(1, 2), Preference(2, 0))
    data = PreferenceDataset(2, None, prefs, levels=levels, labels=labels)
    rep = learn_joint(data, JointConfig(restarts=2))
    assert rep.violations >= 1


def test_learn_joint_needs_levels():
    with pytest.raises(DomainError):
        learn_joint(PreferenceDataset(2, np.zeros((1, 2))))


def test_scale_confounding_on_additive_truth():
    data = sample_preferences(synth_model(3, 3, 0, "additive"))
    lo, hi = scale_confounding(data, [0, 1])
    assert hi.values[3] - lo.values[3] > 0.1
    for cap in (lo, hi):
        assert check_fit(cap, data, tol=1e-6).count == 0


def test_identifiability_report_fields():
    rep = identifiability_experiment(ExperimentSpec(3, 3, "additive", seed=1))
    assert rep.status == "FeasibleExact"
    assert set(rep.intervals) == {(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)}
    assert all(lo <= hi + 1e-12 for lo, hi in rep.intervals.values())
    assert rep.truth_groups == ((0,), (1,), (2,))
    d = rep.as_dict()
    assert d["spec"]["interaction_spec"] == "additive"
