from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.optimize import linprog

from ..enums import LpStatus
from ..errors import DimensionMismatchError, InvalidBehaviorError, SolverError, TrivialInequalityError
from ..polytope import BellInequality, canonical_form
from ..pydantic_utils import PydanticConfig
from ..scenario import Behavior, DeterministicVertex, Scenario, check_no_signaling, vertex_matrix
from ..settings import get_settings

__all__ = ['LpSolution', 'find_optimal_bell_inequality', 'find_pr_box', 'no_signaling_constraints']

HIGHS_OPTIONS = dict(primal_feasibility_tolerance=1e-10, dual_feasibility_tolerance=1e-10)


class LpSolution(BaseModel):
    """
    Outcome of the separating LP. `h`/`c` are in canonical form and set only for `status == optimal`;
    `violation` is h·P - c of the returned inequality (or the raw LP optimum otherwise).
    """
    class Config(PydanticConfig):
        pass

    scenario: Scenario
    h: Optional[np.ndarray] = None
    c: Optional[float] = None
    violation: float = 0.
    status: LpStatus
    duality_gap: Optional[float] = None

    @property
    def inequality(self) -> Optional[BellInequality]:
        if self.h is None:
            return None
        return BellInequality(scenario=self.scenario, h=self.h, c=self.c)

    def to_dict(self):
        return dict(h=None if self.h is None else self.h.tolist(), c=self.c, violation=self.violation,
                    status=self.status.value)


def _vertex_rows(vertices: Optional[List[DeterministicVertex]], scenario: Scenario) -> np.ndarray:
    if vertices is None:
        return vertex_matrix(scenario)
    rows = np.array([v.behavior.p for v in vertices])
    if rows.ndim != 2 or rows.shape[1] != scenario.dim:
        raise DimensionMismatchError('vertex vectors', scenario.dim, rows.shape[-1] if rows.ndim == 2 else 0)
    return rows


def _dual_objective(res, b_ub, bounds) -> float:
    lower = np.array([-np.inf if lo is None else lo for lo, _ in bounds])
    upper = np.array([np.inf if up is None else up for _, up in bounds])
    dual = float(np.dot(b_ub, res.ineqlin.marginals))
    finite = np.isfinite(lower)
    dual += float(np.dot(lower[finite], res.lower.marginals[finite]))
    finite = np.isfinite(upper)
    dual += float(np.dot(upper[finite], res.upper.marginals[finite]))
    return dual


def find_optimal_bell_inequality(behavior: Behavior, vertices: List[DeterministicVertex] = None) -> LpSolution:
    """
    Solves  max h·P - c  s.t.  h·v <= c for every local vertex v,  -1 <= h_i <= 1,  c free.
    A non-positive optimum (below TOL_SEP) means the behavior cannot be separated from the local polytope. A
    signaling behavior that only the normalization and no-signaling directions separate raises InvalidBehaviorError.
    """
    settings = get_settings()
    scenario = behavior.scenario
    rows = _vertex_rows(vertices, scenario)
    n = scenario.dim

    cost = np.concatenate([-behavior.p, [1.]])
    a_ub = np.hstack([rows, -np.ones((len(rows), 1))])
    b_ub = np.zeros(len(rows))
    bounds = [(-1., 1.)] * n + [(None, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method='highs-ds', options=HIGHS_OPTIONS)
    if res.status != 0:
        return LpSolution(scenario=scenario, status=LpStatus.NUMERICAL_FAILURE)

    optimum = -float(res.fun)
    gap = abs(float(res.fun) - _dual_objective(res, b_ub, bounds))
    if gap > settings.LP_DUALITY_GAP * max(1., abs(optimum)):
        return LpSolution(scenario=scenario, status=LpStatus.NUMERICAL_FAILURE, violation=optimum, duality_gap=gap)
    if optimum <= settings.TOL_SEP:
        return LpSolution(scenario=scenario, status=LpStatus.LOCAL_BEHAVIOR, violation=optimum, duality_gap=gap)

    h, c = res.x[:n], float(res.x[n])
    if np.max(rows @ h) > c + settings.TOL_SOUNDNESS:
        return LpSolution(scenario=scenario, status=LpStatus.NUMERICAL_FAILURE, violation=optimum, duality_gap=gap)

    h, c = canonical_form(h, scenario)
    violation = behavior.value(h) - c
    if violation <= settings.TOL_SEP:
        # the canonical form drops the normalization and no-signaling directions
        signaling_free, residual = check_no_signaling(behavior)
        if not signaling_free:
            raise InvalidBehaviorError(f'{behavior!r} is signaling (residual {residual:.3g}); it lies outside the '
                                       f'local polytope only along directions that Bell inequalities ignore')
        return LpSolution(scenario=scenario, status=LpStatus.NUMERICAL_FAILURE, violation=violation,
                          duality_gap=gap)
    return LpSolution(scenario=scenario, h=h, c=c, violation=violation, status=LpStatus.OPTIMAL, duality_gap=gap)


@lru_cache(maxsize=16)
def no_signaling_constraints(scenario: Scenario) -> Tuple[np.ndarray, np.ndarray]:
    """
    Equality system (A, b) of normalization per setting pair and no-signaling, where every marginal is compared
    with the one obtained for the other party's first setting.
    """
    m, k = scenario.m, scenario.k
    index = np.arange(scenario.dim).reshape(m, m, k, k)
    rows = []
    for x in range(m):
        for y in range(m):
            row = np.zeros(scenario.dim)
            row[index[x, y].reshape(-1)] = 1.
            rows.append(row)
    for x in range(m):
        for y in range(1, m):
            for a in range(k):
                row = np.zeros(scenario.dim)
                row[index[x, y, a, :]] = 1.
                row[index[x, 0, a, :]] = -1.
                rows.append(row)
    for y in range(m):
        for x in range(1, m):
            for b in range(k):
                row = np.zeros(scenario.dim)
                row[index[x, y, :, b]] = 1.
                row[index[0, y, :, b]] = -1.
                rows.append(row)
    a_eq = np.array(rows)
    b_eq = np.concatenate([np.ones(m * m), np.zeros(len(rows) - m * m)])
    return a_eq, b_eq


def find_pr_box(ineq: BellInequality) -> Behavior:
    """
    No-signaling behavior maximizing the inequality, as a basic (vertex) optimal solution of the LP over the
    no-signaling polytope.
    """
    if ineq.is_trivial():
        raise TrivialInequalityError()
    ineq.check_tight()
    a_eq, b_eq = no_signaling_constraints(ineq.scenario)
    res = linprog(-ineq.h, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method='highs-ds', options=HIGHS_OPTIONS)
    if res.status != 0:
        raise SolverError(f'no-signaling maximization of {ineq!r} failed: {res.message}')
    p = np.where(np.abs(res.x) < 1e-12, 0., res.x)
    return Behavior(scenario=ineq.scenario, p=np.clip(p, 0., None))
