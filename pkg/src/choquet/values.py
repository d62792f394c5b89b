"""Per-criterion value functions over finite ordered levels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DomainError, MalformedInputError

ANCHOR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ValueFunctionSet:
    """Levels (in preference order) and their values in [0, 1] for each criterion.

    Between numeric levels the value is linearly interpolated.
    """

    levels: tuple[tuple, ...]
    values: tuple[np.ndarray, ...]

    def __post_init__(self):
        levels = tuple(tuple(lv) for lv in self.levels)
        if len(levels) != len(self.values):
            raise MalformedInputError("levels and values must cover the same criteria")
        vals = []
        for i, (lv, v) in enumerate(zip(levels, self.values)):
            arr = np.array(v, dtype=float)
            if arr.ndim != 1 or arr.size != len(lv) or arr.size == 0:
                raise MalformedInputError(f"criterion {i}: need one value per level")
            if len(set(lv)) != len(lv):
                raise MalformedInputError(f"criterion {i}: levels must be distinct")
            if arr.min() < -ANCHOR_TOL or arr.max() > 1 + ANCHOR_TOL:
                raise DomainError(f"criterion {i}: values must lie in [0, 1]")
            if np.any(np.diff(arr) < -ANCHOR_TOL):
                raise DomainError(f"criterion {i}: values must be nondecreasing along the levels")
            arr.setflags(write=False)
            vals.append(arr)
        lo = min(a.min() for a in vals)
        hi = max(a.max() for a in vals)
        if abs(lo) > ANCHOR_TOL or abs(hi - 1.0) > ANCHOR_TOL:
            raise DomainError(f"value functions must attain 0 and 1 (got min {lo:.6g}, max {hi:.6g})")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "values", tuple(vals))

    @property
    def n(self) -> int:
        return len(self.levels)

    @classmethod
    def equally_spaced(cls, levels: Sequence[Sequence]) -> "ValueFunctionSet":
        vals = [np.linspace(0.0, 1.0, len(lv)) if len(lv) > 1 else np.zeros(1) for lv in levels]
        if all(len(lv) == 1 for lv in levels):
            raise DomainError("at least one criterion needs two levels to anchor the scale")
        return cls(tuple(levels), tuple(vals))

    def index(self, labels) -> np.ndarray:
        """Level positions of labelled alternatives, shape (m, n)."""
        pos = [{lab: k for k, lab in enumerate(lv)} for lv in self.levels]
        try:
            return np.array([[pos[i][x[i]] for i in range(self.n)] for x in labels],
                            dtype=np.int64).reshape(-1, self.n)
        except KeyError as exc:
            raise DomainError(f"unknown level label {exc.args[0]!r}") from None

    def apply_index(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx)
        return np.column_stack([self.values[i][idx[:, i]] for i in range(self.n)])

    def apply(self, labels) -> np.ndarray:
        """Profiles of labelled alternatives."""
        return self.apply_index(self.index(labels))

    def interpolate(self, i: int, x: float) -> float:
        """Value of a numeric point on criterion i (levels must be increasing numbers)."""
        lv = np.asarray(self.levels[i], dtype=float)
        if np.any(np.diff(lv) <= 0):
            raise DomainError(f"criterion {i}: interpolation needs increasing numeric levels")
        return float(np.interp(x, lv, self.values[i]))

    def pairs(self) -> list[list[tuple]]:
        return [list(zip(lv, map(float, v))) for lv, v in zip(self.levels, self.values)]
