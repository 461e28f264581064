from typing import Tuple

import parse
from pydantic import BaseModel, conint

from ..pydantic_utils import FrozenConfig

__all__ = ['Scenario', 'idx', 'decode']


class Scenario(BaseModel):
    """
    Two-party Bell scenario `[m,k]`: `m` measurement settings per party with `k` outcomes each.
    """
    class Config(FrozenConfig):
        pass

    m: conint(ge=2)
    k: conint(ge=2)

    @property
    def dim(self) -> int:
        """Length of the joint-probability vector P(ab|xy)."""
        return self.m ** 2 * self.k ** 2

    @property
    def n_vertices(self) -> int:
        return self.k ** (2 * self.m)

    @classmethod
    def from_string(cls, text: str) -> 'Scenario':
        """Parses `'3,2'` or `'[3,2]'`."""
        result = parse.parse('{m:d},{k:d}', text.strip().strip('[]').replace(' ', ''))
        if result is None:
            raise ValueError(f'Cannot parse scenario from {text!r}; expected "m,k" such as "2,2".')
        return cls(m=result['m'], k=result['k'])

    def to_list(self):
        return [self.m, self.k]

    def __str__(self):
        return f'[{self.m},{self.k}]'

    def __repr__(self):
        return f'Scenario{self}'


def idx(a: int, b: int, x: int, y: int, scenario: Scenario) -> int:
    """
    Position of P(ab|xy) in the flat behavior vector. Labels are 1-based; the layout is row-major in (x, y)
    followed by (a, b).
    """
    m, k = scenario.m, scenario.k
    for name, value, upper in (('a', a, k), ('b', b, k), ('x', x, m), ('y', y, m)):
        if not 1 <= value <= upper:
            raise IndexError(f'{name}={value} is outside 1..{upper} for scenario {scenario}')
    return ((x - 1) * m + (y - 1)) * k ** 2 + (a - 1) * k + (b - 1)


def decode(index: int, scenario: Scenario) -> Tuple[int, int, int, int]:
    """Inverse of `idx`: returns the 1-based `(a, b, x, y)`."""
    if not 0 <= index < scenario.dim:
        raise IndexError(f'index {index} is outside 0..{scenario.dim - 1} for scenario {scenario}')
    setting_pair, outcome_pair = divmod(index, scenario.k ** 2)
    x, y = divmod(setting_pair, scenario.m)
    a, b = divmod(outcome_pair, scenario.k)
    return a + 1, b + 1, x + 1, y + 1
