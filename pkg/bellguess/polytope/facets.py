import json
import sys
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np
from tqdm import tqdm

from .inequality import BellInequality, canonical_form
from .relabeling import relabeling_group
from ..enums import FacetClass
from ..errors import InvariantError, UnsupportedScenarioError
from ..scenario import DeterministicVertex, Scenario, idx
from ..settings import get_settings

__all__ = ['canonical_chsh', 'chsh_correlator', 'canonical_i3322', 'generate_facet_orbit', 'spanning_vertices',
           'generate_facets', 'write_facets', 'read_facets']

# Collins-Gisin table of I3322 <= 0: marginal coefficients of Alice (x=1..3) and Bob (y=1..3) for outcome 1 and the
# joint coefficients of P(11|xy)
I3322_ALICE = (-2., -1., 0.)
I3322_BOB = (-1., 0., 0.)
I3322_JOINT = ((1., 1., 1.),
               (1., 1., -1.),
               (1., -1., 0.))


def _require_binary(scenario: Scenario):
    if scenario.k != 2:
        raise UnsupportedScenarioError(scenario, 'CHSH-type inequalities need k = 2 outcomes')


def canonical_chsh(scenario: Scenario) -> BellInequality:
    """
    CH inequality on settings 1 and 2 in joint-probability form,
    P(11|12) + P(11|21) - P(11|22) - P(11|11) - P(12|11) - P(21|11) <= 0,
    i.e. the marginals P_A(1|1) and P_B(1|1) are written through the setting pair (1,1).
    """
    _require_binary(scenario)
    h = np.zeros(scenario.dim)
    for (a, b, x, y), coefficient in {(1, 1, 1, 1): -1., (1, 2, 1, 1): -1., (2, 1, 1, 1): -1.,
                                      (1, 1, 1, 2): 1., (1, 1, 2, 1): 1., (1, 1, 2, 2): -1.}.items():
        h[idx(a, b, x, y, scenario)] = coefficient
    return BellInequality(scenario=scenario, h=h, c=0., facet_class=FacetClass.CHSH)


def chsh_correlator(scenario: Scenario) -> BellInequality:
    """CHSH E11 + E12 + E21 - E22 <= 2 on settings 1 and 2, written with joint probabilities."""
    _require_binary(scenario)
    h = np.zeros(scenario.dim)
    for x in (1, 2):
        for y in (1, 2):
            sign = -1. if x == y == 2 else 1.
            for a in (1, 2):
                for b in (1, 2):
                    h[idx(a, b, x, y, scenario)] = sign * (1. if a == b else -1.)
    return BellInequality(scenario=scenario, h=h, c=2., facet_class=FacetClass.CHSH)


def canonical_i3322() -> BellInequality:
    """
    I3322 <= 0 in the [3,2] scenario, converted from Collins-Gisin to joint probabilities with
    P_A(1|x) = sum_b P(1b|x1) and P_B(1|y) = sum_a P(a1|1y).
    """
    scenario = Scenario(m=3, k=2)
    h = np.zeros(scenario.dim)
    for x in range(1, 4):
        for y in range(1, 4):
            h[idx(1, 1, x, y, scenario)] += I3322_JOINT[x - 1][y - 1]
    for x in range(1, 4):
        for b in (1, 2):
            h[idx(1, b, x, 1, scenario)] += I3322_ALICE[x - 1]
    for y in range(1, 4):
        for a in (1, 2):
            h[idx(a, 1, 1, y, scenario)] += I3322_BOB[y - 1]
    ineq = BellInequality(scenario=scenario, h=h, c=0., facet_class=FacetClass.I3322)
    ineq.check_tight()
    return ineq


def _key(h: np.ndarray):
    return tuple(np.round(h, 10) + 0.)


def generate_facet_orbit(canonical: BellInequality, progress: bool = False) -> List[BellInequality]:
    """
    All distinct images of `canonical` under the relabeling group, each in canonical form (see `canonical_form`)
    and sorted by coefficients.
    """
    canonical.check_tight()
    scenario = canonical.scenario
    n_spanning = canonical.n_spanning
    h, _ = canonical_form(canonical.h, scenario)
    images = {}
    group = relabeling_group(scenario)
    if progress:
        group = tqdm(group, desc=f'Relabel {canonical.facet_class.value if canonical.facet_class else "facet"}',
                     unit='relabeling', file=sys.stdout, leave=False)
    for relabeling in group:
        image = relabeling.apply_to_vector(h)
        images.setdefault(_key(image), image)

    orbit = [BellInequality.from_coefficients(scenario, images[key], facet_class=canonical.facet_class)
             for key in sorted(images)]
    for facet in orbit:
        if facet.n_spanning != n_spanning:
            raise InvariantError(f'relabeled facet is spanned by {facet.n_spanning} vertices instead of {n_spanning}')
    return orbit


def spanning_vertices(ineq: BellInequality, vertices: List[DeterministicVertex]) -> List[DeterministicVertex]:
    """The vertices that saturate the (tight) inequality."""
    ineq.check_tight()
    values = np.array([ineq.value(v.behavior) for v in vertices])
    return [v for v, value in zip(vertices, values) if abs(value - ineq.c) <= get_settings().TOL_TIGHT]


def generate_facets(scenario: Scenario, progress: bool = False) -> List[BellInequality]:
    """Facet Bell inequalities of [2,2] (CHSH class) and [3,2] (CHSH and I3322 classes)."""
    if scenario.k != 2 or scenario.m not in (2, 3):
        raise UnsupportedScenarioError(scenario, 'facets are generated for [2,2] and [3,2] only')
    facets = generate_facet_orbit(canonical_chsh(scenario), progress=progress)
    if scenario.m == 3:
        facets += generate_facet_orbit(canonical_i3322(), progress=progress)
    return facets


def write_facets(filename: Union[str, Path], facets: Iterable[BellInequality]):
    with open(filename, 'w') as f:
        for facet in facets:
            record = facet.to_dict()
            record['n_spanning'] = facet.n_spanning
            f.write(json.dumps(record) + '\n')


def read_facets(filename: Union[str, Path]) -> List[BellInequality]:
    if not Path(filename).is_file():
        raise FileNotFoundError("File {} not found".format(filename))
    with open(filename, 'r') as f:
        return [BellInequality.from_dict(json.loads(line)) for line in f if line.strip()]
