import warnings
from abc import ABC, abstractmethod
from typing import List, Optional

import cvxpy as cp
import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel

from .problem import OBJECTIVE, SdpProblem
from ..enums import SdpStatus
from ..pydantic_utils import PydanticConfig
from ..settings import get_settings

__all__ = ['SdpResult', 'SdpSolver', 'CvxpySdpSolver', 'get_solver']

_STATUS = {cp.OPTIMAL: SdpStatus.OPTIMAL,
           cp.OPTIMAL_INACCURATE: SdpStatus.OPTIMAL_INACCURATE,
           cp.INFEASIBLE: SdpStatus.INFEASIBLE,
           cp.INFEASIBLE_INACCURATE: SdpStatus.INFEASIBLE}


class SdpResult(BaseModel):
    class Config(PydanticConfig):
        pass

    status: SdpStatus
    primal_objective: Optional[float] = None
    dual_objective: Optional[float] = None
    gap: Optional[float] = None
    blocks: Optional[List[np.ndarray]] = None


class SdpSolver(ABC):
    """Conic backend: anything that turns an `SdpProblem` into an `SdpResult`."""

    @abstractmethod
    def solve(self, problem: SdpProblem) -> SdpResult:
        pass


def _vec_operator(problem: SdpProblem, block: int, matrices: np.ndarray, n_rows: int) -> sp.csr_matrix:
    """
    Sparse operator mapping the column-major vectorization of block `block` to <M_i, X_b> for the data matrices
    listed in `matrices` (row r of the operator belongs to matrices[r]).
    """
    n = problem.block_sizes[block]
    lookup = {int(m): r for r, m in enumerate(matrices)}
    mask = (problem.block == block) & np.isin(problem.matrix, matrices)
    rows, cols, data = [], [], []
    for m, i, j, v in zip(problem.matrix[mask], problem.row[mask], problem.col[mask], problem.value[mask]):
        rows.append(lookup[int(m)])
        cols.append(i + j * n)
        data.append(v)
        if i != j:
            rows.append(lookup[int(m)])
            cols.append(j + i * n)
            data.append(v)
    return sp.coo_matrix((data, (rows, cols)), shape=(n_rows, n * n)).tocsr()


class CvxpySdpSolver(SdpSolver):
    """Solves through cvxpy with one PSD variable per block (default solver: CLARABEL, interior point)."""

    def __init__(self, solver: str = None, **solver_options):
        self.solver = solver or get_settings().SDP_SOLVER
        self.solver_options = solver_options

    def solve(self, problem: SdpProblem) -> SdpResult:
        variables = [cp.Variable((n, n), PSD=True) for n in problem.block_sizes]
        constraint_ids = np.arange(1, problem.n_constraints + 1)
        lhs, objective = 0, 0
        for b, (n, x) in enumerate(zip(problem.block_sizes, variables)):
            vec = cp.reshape(x, (n * n,), order='F')
            operator = _vec_operator(problem, b, constraint_ids, problem.n_constraints)
            if operator.nnz:
                lhs = lhs + operator @ vec
            cost = _vec_operator(problem, b, np.array([OBJECTIVE]), 1)
            if cost.nnz:
                objective = objective + cost.toarray()[0] @ vec
        constraints = [lhs == problem.rhs] if problem.n_constraints else []
        program = cp.Problem(cp.Maximize(objective), constraints)
        try:
            program.solve(solver=self.solver, **self.solver_options)
        except cp.error.SolverError as e:
            warnings.warn(f'SDP backend {self.solver} failed: {e}')
            return SdpResult(status=SdpStatus.SOLVER_FAILURE)

        status = _STATUS.get(program.status, SdpStatus.SOLVER_FAILURE)
        if not status.solved:
            return SdpResult(status=status)
        primal = float(program.value)
        # cvxpy reports the multipliers of the equivalent minimization of -objective, so for our maximization they
        # are the sensitivities of the optimum to `rhs` and rhs·y is the dual objective
        dual = float(np.dot(problem.rhs, constraints[0].dual_value)) if constraints else 0.
        gap = abs(primal - dual)
        if gap > get_settings().SDP_INFEASIBILITY_GAP:
            return SdpResult(status=SdpStatus.INFEASIBLE, primal_objective=primal, dual_objective=dual, gap=gap)
        if status is SdpStatus.OPTIMAL_INACCURATE:
            warnings.warn(f'Accepting inaccurate SDP solution (objective {primal:.8f}, gap {gap:.2e}).')
        return SdpResult(status=status, primal_objective=primal, dual_objective=dual, gap=gap,
                         blocks=[np.array(x.value) for x in variables])


def get_solver(name: str = None) -> SdpSolver:
    return CvxpySdpSolver(solver=name)
