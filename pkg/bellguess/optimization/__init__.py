from .separation import LpSolution, find_optimal_bell_inequality, find_pr_box, no_signaling_constraints
from .problem import SdpProblem, SdpBuilder
from .backend import SdpResult, SdpSolver, CvxpySdpSolver, get_solver

__all__ = ['LpSolution', 'find_optimal_bell_inequality', 'find_pr_box', 'no_signaling_constraints', 'SdpProblem',
           'SdpBuilder', 'SdpResult', 'SdpSolver', 'CvxpySdpSolver', 'get_solver']
