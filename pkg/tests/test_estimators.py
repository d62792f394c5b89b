import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from choquet import ChoquetRanker, JointChoquetRanker
from choquet.capacity import random_capacity
from choquet.exceptions import DomainError, MalformedInputError
from choquet.integral import choquet_batch
from choquet.joint import sample_preferences, synth_model
from choquet.learn import check_fit


def test_ranker_recovers_order():
    rng = np.random.default_rng(3)
    truth = random_capacity(3, rng)
    X = rng.random((15, 3))
    y = choquet_batch(truth, X)
    est = ChoquetRanker(delta=1e-4).fit(X, y)
    assert est.outcome_.feasible
    assert est.score(X, y) == 1.0
    assert est.predict(X).shape == (15,)
    assert np.isclose(est.shapley_.sum(), 1.0)
    assert est.n_features_in_ == 3


def test_ranker_with_pairs_and_k_additive():
    X = np.array([[0.9, 0.1, 0.5], [0.1, 0.9, 0.5], [0.5, 0.5, 0.5]])
    est = ChoquetRanker(k_additive=1).fit(X, pairs=[(0, 1), (2, 1)])
    m = est.mobius_.coeffs
    assert np.allclose(m[[3, 5, 6, 7]], 0.0, atol=1e-9)
    s = est.predict(X)
    assert s[0] > s[1] and s[2] > s[1]


def test_params_and_clone():
    est = ChoquetRanker(k_additive=2, objective="min-slack", veto=(1,))
    p = est.get_params()
    assert p["k_additive"] == 2 and p["veto"] == (1,)
    c = clone(est)
    assert c.get_params() == p and not hasattr(c, "capacity_")
    est.set_params(delta=0.01)
    assert est.delta == 0.01
    assert clone(JointChoquetRanker(restarts=3)).restarts == 3


def test_not_fitted():
    with pytest.raises(NotFittedError):
        ChoquetRanker().predict([[0.1, 0.2]])
    with pytest.raises(NotFittedError):
        JointChoquetRanker().transform([(0, 1)])


def test_input_validation():
    est = ChoquetRanker()
    with pytest.raises(DomainError):
        est.fit([[0.2, 1.5]], [0.0])
    with pytest.raises(MalformedInputError):
        est.fit([[0.2, np.nan]], [0.0])
    with pytest.raises(MalformedInputError):
        est.fit([[0.2, 0.3]], [0.0], pairs=[])
    with pytest.raises(MalformedInputError):
        est.fit([[0.2, 0.3], [0.1, 0.1]], [0.0])
    with pytest.raises(DomainError):
        est.fit([[0.2, 0.3]], pairs=[(0, 4)])
    est.fit([[0.2, 0.3], [0.1, 0.1]], [1.0, 0.0])
    with pytest.raises(MalformedInputError):
        est.predict([[0.1, 0.2, 0.3]])


def test_joint_ranker():
    model = synth_model(2, 3, 4, "full")
    data = sample_preferences(model)
    pairs = [(p.better, p.worse, p.kind) for p in data.preferences]
    est = JointChoquetRanker(levels=data.levels, restarts=3).fit(data.labels, pairs=pairs)
    assert est.report_.violations == 0
    profiles = est.transform(data.labels)
    assert check_fit(est.capacity_, data.with_alternatives(profiles), tol=1e-7).count == 0
    assert est.predict(data.labels).shape == (len(data.labels),)
