import itertools
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel

from .behavior import Behavior
from .scenario import Scenario, idx
from ..errors import CapacityError
from ..pydantic_utils import FrozenConfig, readonly
from ..settings import get_settings

__all__ = ['DeterministicVertex', 'enumerate_vertices', 'vertex_matrix', 'deterministic_behavior']


class DeterministicVertex(BaseModel):
    """Local deterministic strategy: Alice answers `alice_map[x-1]`, Bob answers `bob_map[y-1]` (1-based)."""
    class Config(FrozenConfig):
        pass

    alice_map: Tuple[int, ...]
    bob_map: Tuple[int, ...]
    behavior: Behavior

    def __repr__(self):
        return f'DeterministicVertex(alice={self.alice_map}, bob={self.bob_map})'


def _check_capacity(scenario: Scenario):
    limit = get_settings().MAX_VERTICES
    if scenario.n_vertices > limit:
        raise CapacityError('local vertices', scenario.n_vertices, limit)


def _maps(scenario: Scenario) -> np.ndarray:
    """All functions setting -> outcome (0-based) in lexicographic order, shape (k^m, m)."""
    return np.array(list(itertools.product(range(scenario.k), repeat=scenario.m)), dtype=np.int64)


@lru_cache(maxsize=16)
def vertex_matrix(scenario: Scenario) -> np.ndarray:
    """Rows are the deterministic vertices in `enumerate_vertices` order, shape (k^(2m), m²k²)."""
    _check_capacity(scenario)
    m, k = scenario.m, scenario.k
    maps = _maps(scenario)
    n_maps = len(maps)
    table = np.zeros((n_maps, n_maps, m, m, k, k))
    ia, ib, x, y = np.meshgrid(np.arange(n_maps), np.arange(n_maps), np.arange(m), np.arange(m), indexing='ij')
    table[ia, ib, x, y, maps[ia, x], maps[ib, y]] = 1.
    return readonly(table.reshape(n_maps * n_maps, scenario.dim))


def deterministic_behavior(alice_map, bob_map, scenario: Scenario) -> Behavior:
    p = np.zeros(scenario.dim)
    for x, a in enumerate(alice_map, start=1):
        for y, b in enumerate(bob_map, start=1):
            p[idx(a, b, x, y, scenario)] = 1.
    return Behavior(scenario=scenario, p=p)


def enumerate_vertices(scenario: Scenario) -> List[DeterministicVertex]:
    """
    All k^(2m) deterministic local vertices, lexicographic in the Alice map and then in the Bob map.
    """
    rows = vertex_matrix(scenario)
    maps = [tuple(int(o) + 1 for o in row) for row in _maps(scenario)]
    vertices = []
    for (alice_map, bob_map), row in zip(itertools.product(maps, maps), rows):
        behavior = Behavior.construct(scenario=scenario, p=row)
        vertices.append(DeterministicVertex.construct(alice_map=alice_map, bob_map=bob_map, behavior=behavior))
    return vertices
