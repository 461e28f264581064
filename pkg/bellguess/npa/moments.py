from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel

from .words import ALICE, BOB, IDENTITY, Operator, Word, adjoint, build_word_list, canonical_moment, reduce_word
from ..errors import DimensionMismatchError
from ..pydantic_utils import FrozenConfig
from ..scenario import Scenario, decode

__all__ = ['MomentStructure', 'build_moment_structure', 'ZERO']

ZERO = -1
Functional = Dict[int, float]


class MomentStructure(BaseModel):
    """
    Moment matrix layout Γ[i, j] = <w_i† w_j> of an NPA level. `variables[i, j]` is the moment-variable id of the
    entry (ids are numbered in order of first appearance in the upper triangle, id 0 is the identity Γ[0, 0];
    vanishing products get `ZERO`). Entries with equal id must be equal.
    """
    class Config(FrozenConfig):
        pass

    scenario: Scenario
    level: int
    words: Tuple[Word, ...]
    moments: Tuple[Word, ...]
    variables: np.ndarray

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def n_variables(self) -> int:
        return len(self.moments)

    def locations(self) -> Dict[int, List[Tuple[int, int]]]:
        """Upper-triangular positions of every variable id (including `ZERO`)."""
        out: Dict[int, List[Tuple[int, int]]] = {}
        rows, cols = np.triu_indices(self.size)
        for i, j in zip(rows, cols):
            out.setdefault(int(self.variables[i, j]), []).append((int(i), int(j)))
        return out

    def location(self, variable: int) -> Tuple[int, int]:
        """First upper-triangular position of a variable."""
        return _first_locations(self)[variable]

    def variable_of(self, operators) -> int:
        word = reduce_word(tuple(operators))
        if word is None:
            return ZERO
        try:
            return self.moments.index(canonical_moment(word))
        except ValueError:
            raise KeyError(f'moment of {word} does not appear in the level-{self.level} moment matrix') from None

    def alice(self, a: int, x: int) -> Functional:
        """<A(a|x)> as functional over moment variables, A(k|x) = 1 - sum_{a<k} A(a|x)."""
        return self._marginal(ALICE, a, x)

    def bob(self, b: int, y: int) -> Functional:
        return self._marginal(BOB, b, y)

    def _marginal(self, party, outcome, setting) -> Functional:
        k = self.scenario.k
        if outcome < k:
            return {self.variable_of([Operator(party, setting, outcome)]): 1.}
        functional = {0: 1.}
        for o in range(1, k):
            _accumulate(functional, {self.variable_of([Operator(party, setting, o)]): -1.})
        return functional

    def probability(self, a: int, b: int, x: int, y: int) -> Functional:
        """P(ab|xy) = <A(a|x) B(b|y)> with the last outcome of each setting eliminated."""
        k = self.scenario.k
        if a < k and b < k:
            return {self.variable_of([Operator(ALICE, x, a), Operator(BOB, y, b)]): 1.}
        if a == k and b < k:
            functional = dict(self.bob(b, y))
            for o in range(1, k):
                _accumulate(functional, self.probability(o, b, x, y), -1.)
            return functional
        if b == k and a < k:
            functional = dict(self.alice(a, x))
            for o in range(1, k):
                _accumulate(functional, self.probability(a, o, x, y), -1.)
            return functional
        functional = {0: 1.}
        for o in range(1, k):
            _accumulate(functional, self.alice(o, x), -1.)
            _accumulate(functional, self.bob(o, y), -1.)
            for p in range(1, k):
                _accumulate(functional, self.probability(o, p, x, y))
        return functional

    def bell_functional(self, h: np.ndarray) -> Functional:
        """sum h_abxy P(ab|xy) as functional over moment variables (id 0 carries the constant part)."""
        if h.shape != (self.scenario.dim,):
            raise DimensionMismatchError('coefficient vector', self.scenario.dim, h.size)
        functional: Functional = {}
        for index in np.flatnonzero(h):
            _accumulate(functional, self.probability(*decode(int(index), self.scenario)), float(h[index]))
        functional.pop(ZERO, None)
        return {var: coefficient for var, coefficient in functional.items() if coefficient != 0.}

    def __hash__(self):
        return hash((self.scenario, self.level))

    def __eq__(self, other):
        return isinstance(other, MomentStructure) and (self.scenario, self.level) == (other.scenario, other.level)


def _accumulate(target: Functional, source: Functional, factor: float = 1.):
    for var, coefficient in source.items():
        target[var] = target.get(var, 0.) + factor * coefficient


@lru_cache(maxsize=16)
def _first_locations(structure: MomentStructure) -> Dict[int, Tuple[int, int]]:
    return {var: positions[0] for var, positions in structure.locations().items()}


@lru_cache(maxsize=16)
def build_moment_structure(scenario: Scenario, level: int = 2) -> MomentStructure:
    words = build_word_list(scenario, level)
    size = len(words)
    ids: Dict[Word, int] = {IDENTITY: 0}
    variables = np.full((size, size), ZERO, dtype=np.int64)
    for i in range(size):
        for j in range(i, size):
            product = reduce_word(adjoint(words[i]) + words[j])
            if product is None:
                continue
            variables[i, j] = variables[j, i] = ids.setdefault(canonical_moment(product), len(ids))
    moments = tuple(sorted(ids, key=ids.get))
    variables.setflags(write=False)
    return MomentStructure(scenario=scenario, level=level, words=tuple(words), moments=moments, variables=variables)
