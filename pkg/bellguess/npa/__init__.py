from .words import Operator, Word, IDENTITY, reduce_word, adjoint, canonical_moment, build_word_list, format_word
from .moments import MomentStructure, build_moment_structure, ZERO
from .guessing import (GuessingBound, add_moment_constraints, guessing_problem, bound_guessing_probability,
                       guessing_curve, analytic_chsh_guessing_probability, chsh_to_ch_value, ch_to_chsh_value,
                       TSIRELSON_CH, TSIRELSON_CHSH)
from .membership import q2_problem, q2_membership, min_eigenvalue_bound

__all__ = ['Operator', 'Word', 'IDENTITY', 'reduce_word', 'adjoint', 'canonical_moment', 'build_word_list',
           'format_word', 'MomentStructure', 'build_moment_structure', 'ZERO', 'GuessingBound',
           'add_moment_constraints', 'guessing_problem', 'bound_guessing_probability', 'guessing_curve',
           'analytic_chsh_guessing_probability', 'chsh_to_ch_value', 'ch_to_chsh_value', 'TSIRELSON_CH',
           'TSIRELSON_CHSH', 'q2_problem', 'q2_membership', 'min_eigenvalue_bound']
