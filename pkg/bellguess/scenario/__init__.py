from .scenario import Scenario, idx, decode
from .behavior import Behavior, check_no_signaling, mixture, isotropic_behavior
from .vertices import DeterministicVertex, enumerate_vertices, vertex_matrix, deterministic_behavior

__all__ = ['Scenario', 'idx', 'decode', 'Behavior', 'check_no_signaling', 'mixture', 'isotropic_behavior',
           'DeterministicVertex', 'enumerate_vertices', 'vertex_matrix', 'deterministic_behavior']
