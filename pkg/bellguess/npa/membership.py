import numpy as np

from .moments import MomentStructure, ZERO, build_moment_structure
from ..enums import SdpStatus
from ..errors import InvariantError, SolverError
from ..optimization import SdpBuilder, SdpProblem, SdpSolver, get_solver
from ..scenario import Behavior
from ..settings import get_settings

__all__ = ['q2_problem', 'q2_membership', 'min_eigenvalue_bound']

GAMMA, SHIFT = 0, 1


class _ShiftedMoments:
    """
    Writes constraints on Γ = Z + (u - 1)·I with Z PSD (block 0) and u >= 0 (1x1 block 1). Maximizing u gives
    1 + the largest smallest-eigenvalue over all moment matrices consistent with the data.
    """
    def __init__(self, builder: SdpBuilder):
        self.builder = builder

    def constrain(self, terms, rhs: float):
        constraint = self.builder.constraint(rhs + sum(c for (i, j), c in terms if i == j))
        for (i, j), coefficient in terms:
            self.builder.add(constraint, GAMMA, i, j, coefficient)
            if i == j:
                self.builder.add(constraint, SHIFT, 0, 0, coefficient)


def q2_problem(behavior: Behavior, structure: MomentStructure) -> SdpProblem:
    scenario = behavior.scenario
    if scenario != structure.scenario:
        raise InvariantError(f'behavior of {scenario} used with moment structure of {structure.scenario}')
    builder = SdpBuilder([structure.size, 1])
    gamma = _ShiftedMoments(builder)
    for var, positions in structure.locations().items():
        if var == ZERO:
            for position in positions:
                gamma.constrain([(position, 1.)], 0.)
        else:
            for position in positions[1:]:
                gamma.constrain([(positions[0], 1.), (position, -1.)], 0.)
    gamma.constrain([((0, 0), 1.)], 1.)

    k = scenario.k
    table = behavior.table.values
    alice, bob = behavior.alice_marginals(), behavior.bob_marginals()
    for x in range(1, scenario.m + 1):
        for a in range(1, k):
            (var, _), = structure.alice(a, x).items()
            gamma.constrain([(structure.location(var), 1.)], alice[x - 1, a - 1])
            (var, _), = structure.bob(a, x).items()
            gamma.constrain([(structure.location(var), 1.)], bob[x - 1, a - 1])
        for y in range(1, scenario.m + 1):
            for a in range(1, k):
                for b in range(1, k):
                    (var, _), = structure.probability(a, b, x, y).items()
                    gamma.constrain([(structure.location(var), 1.)], table[x - 1, y - 1, a - 1, b - 1])
    builder.add_objective(SHIFT, 0, 0, 1.)
    return builder.build()


def min_eigenvalue_bound(behavior: Behavior, structure: MomentStructure = None, solver: SdpSolver = None) -> float:
    """
    Largest achievable smallest eigenvalue of a moment matrix reproducing the behavior, or -inf if it lies below
    -1. Non-negative iff the behavior has a realization at the structure's NPA level.
    """
    structure = build_moment_structure(behavior.scenario, 2) if structure is None else structure
    solver = get_solver() if solver is None else solver
    result = solver.solve(q2_problem(behavior, structure))
    if result.status is SdpStatus.INFEASIBLE:
        return -np.inf
    if not result.status.solved:
        raise SolverError(f'Q2 membership SDP for {behavior!r} failed with status {result.status.value}')
    return result.primal_objective - 1.


def q2_membership(behavior: Behavior, structure: MomentStructure = None, solver: SdpSolver = None) -> bool:
    return min_eigenvalue_bound(behavior, structure, solver) >= -get_settings().Q2_SLACK
