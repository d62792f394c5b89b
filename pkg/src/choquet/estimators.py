"""Estimator wrappers with the usual fit / predict / get_params surface."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .capacity import mobius, shapley
from .exceptions import DomainError, MalformedInputError
from .integral import choquet_many
from .joint import JointConfig, learn_joint
from .learn import (
    DEFAULT_DELTA,
    Deltas,
    IdentificationConfig,
    Preference,
    PreferenceDataset,
    identify,
    preferences_from_scores,
)


def check_profiles(X, n: int | None = None) -> np.ndarray:
    """2-d float array of profiles in [0, 1]."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] == 0:
        raise MalformedInputError(f"profiles must be a 2-d array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise MalformedInputError("profiles contain NaN or infinite entries")
    if X.min(initial=0.0) < 0 or X.max(initial=0.0) > 1:
        raise DomainError("profile entries must lie in [0, 1]")
    if n is not None and X.shape[1] != n:
        raise MalformedInputError(f"expected {n} criteria, got {X.shape[1]}")
    return X


def check_pairs(pairs, m: int) -> list[Preference]:
    """``(better, worse)`` or ``(better, worse, kind)`` tuples as preferences."""
    out = []
    for k, p in enumerate(pairs):
        if len(p) not in (2, 3):
            raise MalformedInputError(f"pairs[{k}] must be (better, worse[, kind])")
        a, b = int(p[0]), int(p[1])
        if not (0 <= a < m and 0 <= b < m):
            raise DomainError(f"pairs[{k}] refers to a row outside 0..{m - 1}")
        out.append(Preference(a, b, p[2] if len(p) == 3 else "strict"))
    return out


def check_is_fitted(est, attr: str = "capacity_"):
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


class ChoquetRanker(BaseEstimator):
    """Learns a capacity from ranked profiles; predicts Choquet scores.

    ``fit(X, y)`` turns the target scores ``y`` into pairwise statements (gap
    above ``delta`` is strict, otherwise indifferent). ``fit(X, pairs=...)``
    takes the statements directly.
    """

    def __init__(self, k_additive=None, objective="feasibility", delta=DEFAULT_DELTA,
                 shapley_comparisons=(), interaction_statements=(), veto=(), favour=()):
        self.k_additive = k_additive
        self.objective = objective
        self.delta = delta
        self.shapley_comparisons = shapley_comparisons
        self.interaction_statements = interaction_statements
        self.veto = veto
        self.favour = favour

    def _dataset(self, X, y, pairs) -> PreferenceDataset:
        if (y is None) == (pairs is None):
            raise MalformedInputError("pass exactly one of y or pairs")
        if y is not None:
            y = np.asarray(y, dtype=float)
            if y.shape != (X.shape[0],):
                raise MalformedInputError(f"y must have shape ({X.shape[0]},), got {y.shape}")
            prefs = preferences_from_scores(y, self.delta)
        else:
            prefs = check_pairs(pairs, X.shape[0])
        d = Deltas(self.delta, self.delta, self.delta)
        return PreferenceDataset(X.shape[1], X, tuple(prefs), tuple(self.shapley_comparisons),
                                 tuple(self.interaction_statements), frozenset(self.veto),
                                 frozenset(self.favour), d)

    def fit(self, X, y=None, pairs=None):
        X = check_profiles(X)
        data = self._dataset(X, y, pairs)
        cfg = IdentificationConfig(k_additive=self.k_additive, objective=self.objective)
        self.outcome_ = identify(data, cfg)
        self.capacity_ = self.outcome_.capacity
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self)
        X = check_profiles(X, self.n_features_in_)
        return choquet_many(self.capacity_.values, X)

    def score(self, X, y) -> float:
        """Fraction of pairs ordered as ``y`` orders them (ties in ``y`` skipped)."""
        s = self.predict(X)
        y = np.asarray(y, dtype=float)
        dy = np.sign(y[:, None] - y[None, :])
        ds = np.sign(s[:, None] - s[None, :])
        mask = dy != 0
        return float((dy[mask] == ds[mask]).mean()) if mask.any() else 1.0

    @property
    def shapley_(self) -> np.ndarray:
        check_is_fitted(self)
        return shapley(self.capacity_)

    @property
    def mobius_(self):
        check_is_fitted(self)
        return mobius(self.capacity_)


class JointChoquetRanker(BaseEstimator):
    """Learns a capacity and per-criterion value functions from labelled alternatives.

    ``levels`` lists each criterion's labels worst to best; when omitted the
    sorted distinct labels seen in ``fit`` are used.
    """

    def __init__(self, levels=None, restarts=10, seed=0, delta=DEFAULT_DELTA,
                 k_additive=None, max_iterations=50):
        self.levels = levels
        self.restarts = restarts
        self.seed = seed
        self.delta = delta
        self.k_additive = k_additive
        self.max_iterations = max_iterations

    def fit(self, X, y=None, pairs=None):
        labels = [tuple(row) for row in X]
        if not labels:
            raise MalformedInputError("need at least one alternative")
        n = len(labels[0])
        levels = self.levels
        if levels is None:
            levels = [tuple(sorted({x[i] for x in labels})) for i in range(n)]
        if (y is None) == (pairs is None):
            raise MalformedInputError("pass exactly one of y or pairs")
        if y is not None:
            prefs = preferences_from_scores(np.asarray(y, dtype=float), self.delta)
        else:
            prefs = check_pairs(pairs, len(labels))
        data = PreferenceDataset(n, None, tuple(prefs), deltas=Deltas(self.delta, self.delta, self.delta),
                                 levels=tuple(map(tuple, levels)), labels=tuple(labels))
        cfg = JointConfig(restarts=self.restarts, seed=self.seed, k_additive=self.k_additive,
                          max_iterations=self.max_iterations)
        self.report_ = learn_joint(data, cfg)
        self.capacity_ = self.report_.capacity
        self.value_functions_ = self.report_.value_functions
        self.n_features_in_ = n
        return self

    def transform(self, X) -> np.ndarray:
        """Profiles of labelled alternatives under the learned value functions."""
        check_is_fitted(self)
        return self.value_functions_.apply([tuple(row) for row in X])

    def predict(self, X) -> np.ndarray:
        return choquet_many(self.capacity_.values, self.transform(X))
