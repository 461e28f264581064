from typing import List, Optional, Sequence

import numpy as np

from ..errors import InvariantError
from ..polytope import BellInequality
from ..scenario import Behavior, DeterministicVertex, mixture

__all__ = ['weighted_vertex_mixture', 'sample_behavior', 'record_seed']

MAX_WEIGHT_DRAWS = 10


def record_seed(master_seed: int, index: int) -> int:
    """64-bit seed of record `index`, independent of every other record."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1, dtype=np.uint64)[0])


def weighted_vertex_mixture(pr_box: Behavior, spanning: Sequence[DeterministicVertex], w0: float,
                            weights: Sequence[float]) -> Behavior:
    """(n·w0·P_PR + sum_i w_i P_i) / (n·w0 + sum_i w_i) for the n spanning vertices P_i."""
    n = len(spanning)
    if n == 0:
        raise ValueError('at least one spanning vertex is required')
    if len(weights) != n:
        raise ValueError(f'{len(weights)} vertex weights given for {n} spanning vertices')
    return mixture([pr_box] + [v.behavior for v in spanning], [n * w0] + list(weights))


def sample_behavior(facet: BellInequality, spanning: List[DeterministicVertex], pr_box: Behavior,
                    rng: np.random.Generator) -> Behavior:
    """Random mixture of the facet's PR box and its spanning vertices with i.i.d. uniform weights."""
    if pr_box.scenario != facet.scenario:
        raise InvariantError(f'PR box of {pr_box.scenario} given for a facet of {facet.scenario}')
    weights: Optional[np.ndarray] = None
    for _ in range(MAX_WEIGHT_DRAWS):
        weights = rng.uniform(0., 1., size=len(spanning) + 1)
        if weights.sum() > 0:
            break
    else:
        raise InvariantError(f'{MAX_WEIGHT_DRAWS} weight draws in a row were all zero')
    return weighted_vertex_mixture(pr_box, spanning, weights[0], weights[1:])
