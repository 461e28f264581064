from typing import Sequence, Tuple

import numpy as np
import xarray as xr
from pydantic import BaseModel, validator

from .scenario import Scenario
from ..errors import DimensionMismatchError, InvalidBehaviorError
from ..pydantic_utils import FrozenConfig, readonly
from ..settings import get_settings

__all__ = ['Behavior', 'check_no_signaling', 'mixture', 'isotropic_behavior']


class Behavior(BaseModel):
    """
    Joint conditional probabilities P(ab|xy) of a `Scenario`, stored flat in `idx` order. Marginals are never
    stored; they are derived from the joint table.
    """
    class Config(FrozenConfig):
        pass

    scenario: Scenario
    p: np.ndarray

    @validator('p', pre=True)
    def to_readonly_array(cls, v):
        return readonly(v)

    @validator('p')
    def check_probabilities(cls, v, values):
        scenario = values.get('scenario')
        if scenario is None:
            return v
        if v.shape != (scenario.dim,):
            raise DimensionMismatchError('behavior vector', scenario.dim, v.size)
        if not np.all(np.isfinite(v)):
            raise InvalidBehaviorError('behavior contains non-finite entries')
        settings = get_settings()
        if v.min() < -settings.TOL_POS:
            raise InvalidBehaviorError(f'negative probability {v.min():.3e} (tolerance {settings.TOL_POS:.0e})')
        block_sums = v.reshape(scenario.m ** 2, scenario.k ** 2).sum(axis=1)
        deviation = np.abs(block_sums - 1).max()
        if deviation > settings.TOL_NORM:
            raise InvalidBehaviorError(f'setting pair not normalized, deviation {deviation:.3e}')
        return v

    @classmethod
    def uniform(cls, scenario: Scenario) -> 'Behavior':
        return cls(scenario=scenario, p=np.full(scenario.dim, 1 / scenario.k ** 2))

    @classmethod
    def from_table(cls, scenario: Scenario, table) -> 'Behavior':
        """Accepts an array indexed `[x, y, a, b]` (0-based)."""
        return cls(scenario=scenario, p=np.asarray(table, dtype=np.float64).reshape(-1))

    @property
    def table(self) -> xr.DataArray:
        """The behavior as labelled array with dims `(x, y, a, b)` and 1-based coordinates."""
        m, k = self.scenario.m, self.scenario.k
        settings, outcomes = np.arange(1, m + 1), np.arange(1, k + 1)
        return xr.DataArray(self.p.reshape(m, m, k, k), dims=('x', 'y', 'a', 'b'),
                            coords={'x': settings, 'y': settings, 'a': outcomes, 'b': outcomes})

    def alice_marginals(self) -> np.ndarray:
        """P(a|x) as array `[x, a]`, averaged over Bob's setting."""
        return self.table.sum('b').mean('y').transpose('x', 'a').values

    def bob_marginals(self) -> np.ndarray:
        """P(b|y) as array `[y, b]`, averaged over Alice's setting."""
        return self.table.sum('a').mean('x').transpose('y', 'b').values

    def value(self, h: np.ndarray) -> float:
        return float(np.dot(h, self.p))

    def __repr__(self):
        return f'Behavior({self.scenario})'


def check_no_signaling(behavior: Behavior, tol: float = None) -> Tuple[bool, float]:
    """
    Returns whether Alice's marginals do not depend on Bob's setting and vice versa, together with the largest
    residual |sum_b P(ab|xy) - sum_b P(ab|xy')| over all a, x, y, y' (and the analogue for Bob).
    """
    tol = get_settings().TOL_NO_SIGNALING if tol is None else tol
    table = behavior.table
    alice = table.sum('b')
    bob = table.sum('a')
    residual = max(float((alice.max('y') - alice.min('y')).max()),
                   float((bob.max('x') - bob.min('x')).max()))
    return residual <= tol, residual


def mixture(behaviors: Sequence[Behavior], weights: Sequence[float]) -> Behavior:
    """Convex combination sum_i w_i P_i / sum_i w_i."""
    weights = np.asarray(weights, dtype=np.float64)
    if len(behaviors) != len(weights) or len(weights) == 0:
        raise ValueError('one weight per behavior is required')
    if weights.min() < 0 or weights.sum() <= 0:
        raise ValueError('weights must be non-negative and not all zero')
    scenario = behaviors[0].scenario
    if any(b.scenario != scenario for b in behaviors):
        raise ValueError('all behaviors of a mixture must share the scenario')
    p = weights @ np.array([b.p for b in behaviors]) / weights.sum()
    return Behavior(scenario=scenario, p=p)


def isotropic_behavior(behavior: Behavior, visibility: float) -> Behavior:
    """v·P + (1 - v)·uniform, the white-noise family through `behavior`."""
    if not 0 <= visibility <= 1:
        raise ValueError(f'visibility {visibility} outside [0, 1]')
    return mixture([behavior, Behavior.uniform(behavior.scenario)], [visibility, 1 - visibility])
