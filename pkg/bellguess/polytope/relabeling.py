import itertools
from typing import Iterator, Tuple

import numpy as np
from pydantic import BaseModel, root_validator

from .inequality import BellInequality
from ..pydantic_utils import FrozenConfig
from ..scenario import Behavior, Scenario

__all__ = ['Relabeling', 'relabeling_group']

Permutation = Tuple[int, ...]


def _is_permutation(p, n):
    return sorted(p) == list(range(n))


class Relabeling(BaseModel):
    """
    Symmetry of a Bell scenario acting on the coordinates P(ab|xy). The parties are exchanged first (if `swap`),
    then setting x goes to `alice_settings[x]` and outcome a of setting x goes to `alice_outcomes[x][a]` (all
    0-based; outcome permutations are indexed by the setting before it is permuted). Bob likewise.
    """
    class Config(FrozenConfig):
        pass

    swap: bool = False
    alice_settings: Permutation
    bob_settings: Permutation
    alice_outcomes: Tuple[Permutation, ...]
    bob_outcomes: Tuple[Permutation, ...]

    @root_validator(skip_on_failure=True)
    def check_permutations(cls, values):
        m = len(values['alice_settings'])
        if not (_is_permutation(values['alice_settings'], m) and _is_permutation(values['bob_settings'], m)):
            raise ValueError('setting relabelings must be permutations of the same length')
        outcomes = values['alice_outcomes'] + values['bob_outcomes']
        if len(outcomes) != 2 * m:
            raise ValueError('one outcome permutation per setting and party is required')
        k = len(outcomes[0])
        if not all(_is_permutation(p, k) for p in outcomes):
            raise ValueError('outcome relabelings must be permutations of the same length')
        return values

    @classmethod
    def identity(cls, scenario: Scenario) -> 'Relabeling':
        settings = tuple(range(scenario.m))
        outcomes = (tuple(range(scenario.k)),) * scenario.m
        return cls(alice_settings=settings, bob_settings=settings, alice_outcomes=outcomes, bob_outcomes=outcomes)

    def permutation(self) -> np.ndarray:
        """`target[i]` is the coordinate that coordinate `i` is moved to."""
        m, k = len(self.alice_settings), len(self.alice_outcomes[0])
        x, y, a, b = (g.reshape(-1) for g in np.meshgrid(np.arange(m), np.arange(m), np.arange(k), np.arange(k),
                                                         indexing='ij'))
        if self.swap:
            a, b, x, y = b, a, y, x
        alice_settings, bob_settings = np.array(self.alice_settings), np.array(self.bob_settings)
        alice_outcomes, bob_outcomes = np.array(self.alice_outcomes), np.array(self.bob_outcomes)
        new_x, new_y = alice_settings[x], bob_settings[y]
        new_a, new_b = alice_outcomes[x, a], bob_outcomes[y, b]
        return ((new_x * m + new_y) * k + new_a) * k + new_b

    def apply_to_vector(self, v: np.ndarray) -> np.ndarray:
        out = np.empty_like(v)
        out[self.permutation()] = v
        return out

    def apply_to_behavior(self, behavior: Behavior) -> Behavior:
        return Behavior(scenario=behavior.scenario, p=self.apply_to_vector(behavior.p))

    def apply_to_inequality(self, ineq: BellInequality) -> BellInequality:
        return BellInequality(scenario=ineq.scenario, h=self.apply_to_vector(ineq.h), c=ineq.c,
                              facet_class=ineq.facet_class)

    def compose(self, other: 'Relabeling') -> 'Relabeling':
        """The relabeling that applies `other` first and then `self`."""
        if self.swap:
            # self exchanges the parties, so Alice's side of the result is fed by Bob's side of `other`
            a_settings, a_outcomes = other.bob_settings, other.bob_outcomes
            b_settings, b_outcomes = other.alice_settings, other.alice_outcomes
        else:
            a_settings, a_outcomes = other.alice_settings, other.alice_outcomes
            b_settings, b_outcomes = other.bob_settings, other.bob_outcomes

        def chain(settings, outcomes, outer_settings, outer_outcomes):
            new_settings = tuple(outer_settings[s] for s in settings)
            new_outcomes = tuple(tuple(outer_outcomes[settings[x]][o] for o in outcomes[x])
                                 for x in range(len(settings)))
            return new_settings, new_outcomes

        alice_settings, alice_outcomes = chain(a_settings, a_outcomes, self.alice_settings, self.alice_outcomes)
        bob_settings, bob_outcomes = chain(b_settings, b_outcomes, self.bob_settings, self.bob_outcomes)
        return Relabeling(swap=self.swap != other.swap, alice_settings=alice_settings, bob_settings=bob_settings,
                          alice_outcomes=alice_outcomes, bob_outcomes=bob_outcomes)


def relabeling_group(scenario: Scenario) -> Iterator[Relabeling]:
    """All 2·(m!)²·(k!)^(2m) relabelings, including the party exchange."""
    setting_perms = list(itertools.permutations(range(scenario.m)))
    outcome_perms = list(itertools.product(itertools.permutations(range(scenario.k)), repeat=scenario.m))
    for swap, sa, sb, oa, ob in itertools.product((False, True), setting_perms, setting_perms, outcome_perms,
                                                  outcome_perms):
        yield Relabeling.construct(swap=swap, alice_settings=sa, bob_settings=sb, alice_outcomes=oa,
                                   bob_outcomes=ob)
