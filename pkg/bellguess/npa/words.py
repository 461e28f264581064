import itertools
from typing import List, NamedTuple, Optional, Sequence, Tuple

from ..scenario import Scenario

__all__ = ['Operator', 'Word', 'IDENTITY', 'reduce_word', 'adjoint', 'canonical_moment', 'build_word_list',
           'format_word']

ALICE, BOB = 0, 1


class Operator(NamedTuple):
    """Projector A(outcome|setting) (party 0) or B(outcome|setting) (party 1), 1-based labels."""
    party: int
    setting: int
    outcome: int

    def __str__(self):
        return f'{"AB"[self.party]}({self.outcome}|{self.setting})'


Word = Tuple[Operator, ...]
IDENTITY: Word = ()


def reduce_word(operators: Sequence[Operator]) -> Optional[Word]:
    """
    Normal form of a product of projectors: Alice's operators first (they commute with Bob's), equal neighbours
    merged, `None` if two different outcomes of the same setting meet.
    """
    reduced = []
    for party in (ALICE, BOB):
        stack = []
        for op in operators:
            if op.party != party:
                continue
            if stack and stack[-1].setting == op.setting:
                if stack[-1].outcome != op.outcome:
                    return None
                continue
            stack.append(op)
        reduced.extend(stack)
    return tuple(reduced)


def adjoint(word: Word) -> Word:
    return reduce_word(tuple(reversed(word)))


def canonical_moment(word: Word) -> Word:
    """Representative shared by a word and its adjoint; all moments are real."""
    return min(word, adjoint(word))


def build_word_list(scenario: Scenario, level: int) -> List[Word]:
    """
    Reduced products of at most `level` projectors, the last outcome of every setting left out. Sorted by length,
    then lexicographically.
    """
    if level not in (1, 2):
        raise ValueError(f'NPA level {level} is not supported; use 1 or 2.')
    letters = [Operator(party, setting, outcome) for party in (ALICE, BOB) for setting in range(1, scenario.m + 1)
               for outcome in range(1, scenario.k)]
    words = {IDENTITY}
    for length in range(1, level + 1):
        for product in itertools.product(letters, repeat=length):
            word = reduce_word(product)
            if word is not None:
                words.add(word)
    return sorted(words, key=lambda w: (len(w), w))


def format_word(word: Word) -> str:
    return ''.join(str(op) for op in word) or '1'
