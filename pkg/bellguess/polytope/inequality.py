from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, validator

from ..enums import FacetClass
from ..errors import DimensionMismatchError, InvariantError
from ..pydantic_utils import FrozenConfig, readonly
from ..scenario import Behavior, Scenario, vertex_matrix
from ..settings import get_settings

__all__ = ['BellInequality', 'classical_bound', 'canonical_form', 'direction_basis']


def classical_bound(h: np.ndarray, scenario: Scenario) -> float:
    """Maximum of h·v over all deterministic local vertices."""
    return float(np.max(vertex_matrix(scenario) @ h))


@lru_cache(maxsize=16)
def direction_basis(scenario: Scenario) -> np.ndarray:
    """
    Orthonormal basis (columns) of the linear space spanned by differences of local vertices. It is orthogonal to
    the normalization and the no-signaling identities, so two coefficient vectors induce the same functional on
    no-signaling behaviors (up to a constant) iff their projections onto this space agree.
    """
    vertices = vertex_matrix(scenario)
    basis = scipy.linalg.orth((vertices[1:] - vertices[0]).T)
    return readonly(basis)


def canonical_form(h: np.ndarray, scenario: Scenario) -> Tuple[np.ndarray, float]:
    """
    Deterministic representative of the Bell inequality with coefficients `h`: projection onto the direction
    space of the local polytope, scaled to max|h_i| = 1 and snapped to 12 decimals, with the classical bound
    recomputed by brute force.
    """
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (scenario.dim,):
        raise DimensionMismatchError('coefficient vector', scenario.dim, h.size)
    basis = direction_basis(scenario)
    projected = basis @ (basis.T @ h)
    scale = np.abs(projected).max()
    if scale < 1e-12:
        raise InvariantError('coefficients are constant on every no-signaling behavior; no Bell inequality')
    canonical = np.round(projected / scale, 12) + 0.
    return canonical, classical_bound(canonical, scenario)


class BellInequality(BaseModel):
    """Bell inequality sum_abxy h_abxy P(ab|xy) <= c."""
    class Config(FrozenConfig):
        pass

    scenario: Scenario
    h: np.ndarray
    c: float
    facet_class: Optional[FacetClass] = None

    @validator('h', pre=True)
    def to_readonly_array(cls, v):
        return readonly(v)

    @validator('h')
    def check_length(cls, v, values):
        scenario = values.get('scenario')
        if scenario is not None and v.shape != (scenario.dim,):
            raise DimensionMismatchError('coefficient vector', scenario.dim, v.size)
        if not np.all(np.isfinite(v)):
            raise ValueError('coefficients must be finite')
        return v

    @classmethod
    def from_coefficients(cls, scenario: Scenario, h, facet_class: FacetClass = None) -> 'BellInequality':
        """Builds the tight inequality for `h`, i.e. with `c` set to the classical bound."""
        h = np.asarray(h, dtype=np.float64)
        return cls(scenario=scenario, h=h, c=classical_bound(h, scenario), facet_class=facet_class)

    def value(self, behavior: Behavior) -> float:
        """Bell value B[P] = h·P."""
        return behavior.value(self.h)

    def vertex_values(self) -> np.ndarray:
        return vertex_matrix(self.scenario) @ self.h

    @property
    def classical_max(self) -> float:
        return float(self.vertex_values().max())

    def is_tight(self, tol: float = None) -> bool:
        tol = get_settings().TOL_TIGHT if tol is None else tol
        return abs(self.classical_max - self.c) <= tol

    def check_tight(self):
        if not self.is_tight():
            raise InvariantError(f'inequality is not tight: classical maximum {self.classical_max:.12g} '
                                 f'differs from c={self.c:.12g}')

    def spanning_mask(self, tol: float = None) -> np.ndarray:
        tol = get_settings().TOL_TIGHT if tol is None else tol
        return np.abs(self.vertex_values() - self.c) <= tol

    @property
    def n_spanning(self) -> int:
        return int(self.spanning_mask().sum())

    def is_trivial(self) -> bool:
        """
        True if the inequality holds for every normalized non-negative (even signaling) behavior, like the
        positivity facets. Adding the per-setting-pair maximum to c turns h into a non-positive vector; the
        inequality is then trivial iff the shifted bound is still non-negative.
        """
        blocks = self.h.reshape(self.scenario.m ** 2, self.scenario.k ** 2)
        shift = blocks.max(axis=1).sum()
        return self.c - shift >= -get_settings().TOL_TIGHT

    def canonical(self) -> 'BellInequality':
        h, c = canonical_form(self.h, self.scenario)
        return BellInequality(scenario=self.scenario, h=h, c=c, facet_class=self.facet_class)

    def to_dict(self):
        output = dict(scenario=self.scenario.to_list(), h=self.h.tolist(), c=self.c)
        if self.facet_class is not None:
            output['class'] = self.facet_class.value
        return output

    @classmethod
    def from_dict(cls, d: dict) -> 'BellInequality':
        facet_class = d.get('class')
        return cls(scenario=Scenario(m=d['scenario'][0], k=d['scenario'][1]), h=d['h'], c=d['c'],
                   facet_class=FacetClass(facet_class) if facet_class is not None else None)

    def __repr__(self):
        label = f' {self.facet_class.value}' if self.facet_class is not None else ''
        return f'BellInequality({self.scenario}{label}, c={self.c:.6g})'
