from typing import Iterable, List, Optional

import numpy as np
from pydantic import BaseModel

from .moments import MomentStructure, ZERO, build_moment_structure
from ..enums import SdpStatus
from ..errors import InvariantError
from ..optimization import SdpBuilder, SdpProblem, SdpSolver, get_solver
from ..polytope import BellInequality
from ..pydantic_utils import PydanticConfig

__all__ = ['GuessingBound', 'add_moment_constraints', 'guessing_problem', 'bound_guessing_probability',
           'guessing_curve', 'analytic_chsh_guessing_probability', 'chsh_to_ch_value', 'ch_to_chsh_value',
           'TSIRELSON_CH', 'TSIRELSON_CHSH']

TSIRELSON_CHSH = 2 * np.sqrt(2)
TSIRELSON_CH = (np.sqrt(2) - 1) / 2


class GuessingBound(BaseModel):
    class Config(PydanticConfig):
        pass

    p_guess: Optional[float] = None
    status: SdpStatus
    gap: Optional[float] = None
    block_weights: Optional[np.ndarray] = None

    def to_dict(self):
        return dict(p_guess=self.p_guess, status=self.status.value, gap=self.gap)


def add_moment_constraints(builder: SdpBuilder, block: int, structure: MomentStructure):
    """Ties all entries of a block that share a moment variable and pins vanishing products to zero."""
    for var, positions in structure.locations().items():
        if var == ZERO:
            for position in positions:
                builder.add(builder.constraint(0.), block, *position, 1.)
        else:
            for position in positions[1:]:
                builder.equate(block, positions[0], position)


def guessing_problem(ineq: BellInequality, bell_value: float, structure: MomentStructure,
                     guessed_setting: int = 1) -> SdpProblem:
    """
    One moment-matrix block per outcome e that Eve announces. The blocks are subnormalized (their weights Γ_e[0,0]
    sum to one), their Bell values sum to `bell_value`, and the objective collects the probability that Alice's
    outcome for `guessed_setting` equals e.
    """
    scenario = structure.scenario
    if ineq.scenario != scenario:
        raise InvariantError(f'inequality of {ineq.scenario} used with moment structure of {scenario}')
    if not 1 <= guessed_setting <= scenario.m:
        raise IndexError(f'guessed setting {guessed_setting} is outside 1..{scenario.m}')
    k, n = scenario.k, structure.size
    builder = SdpBuilder([n] * k)
    for e in range(k):
        add_moment_constraints(builder, e, structure)

    normalization = builder.constraint(1.)
    for e in range(k):
        builder.add(normalization, e, 0, 0, 1.)

    bell = builder.constraint(bell_value)
    for var, coefficient in structure.bell_functional(ineq.h).items():
        for e in range(k):
            builder.add(bell, e, *structure.location(var), coefficient)

    for e in range(k):
        for var, coefficient in structure.alice(e + 1, guessed_setting).items():
            builder.add_objective(e, *structure.location(var), coefficient)
    return builder.build()


def bound_guessing_probability(bell_value: float, ineq: BellInequality, guessed_setting: int = 1,
                               structure: MomentStructure = None, solver: SdpSolver = None) -> GuessingBound:
    """Upper bound on Eve's probability to guess Alice's outcome, given only the observed Bell value."""
    structure = build_moment_structure(ineq.scenario, 2) if structure is None else structure
    solver = get_solver() if solver is None else solver
    result = solver.solve(guessing_problem(ineq, bell_value, structure, guessed_setting))
    if not result.status.solved:
        return GuessingBound(status=result.status, gap=result.gap)
    weights = np.array([block[0, 0] for block in result.blocks])
    return GuessingBound(p_guess=float(np.clip(result.primal_objective, 0., 1.)), status=result.status,
                         gap=result.gap, block_weights=weights)


def guessing_curve(ineq: BellInequality, bell_values: Iterable[float], guessed_setting: int = 1,
                   structure: MomentStructure = None, solver: SdpSolver = None) -> List[GuessingBound]:
    structure = build_moment_structure(ineq.scenario, 2) if structure is None else structure
    solver = get_solver() if solver is None else solver
    return [bound_guessing_probability(value, ineq, guessed_setting, structure, solver) for value in bell_values]


def chsh_to_ch_value(s: float) -> float:
    return (s - 2) / 4


def ch_to_chsh_value(value: float) -> float:
    return 4 * value + 2


def analytic_chsh_guessing_probability(s: float) -> float:
    """Tight bound 1/2 + 1/2·sqrt(2 - S²/4) for CHSH value S in [2, 2√2]; 1 at or below the local bound."""
    if s <= 2:
        return 1.
    if s > TSIRELSON_CHSH:
        raise ValueError(f'CHSH value {s} exceeds the quantum maximum {TSIRELSON_CHSH:.6f}')
    return 0.5 + 0.5 * np.sqrt(max(2 - s ** 2 / 4, 0.))