from .inequality import BellInequality, classical_bound, canonical_form, direction_basis
from .relabeling import Relabeling, relabeling_group
from .facets import (canonical_chsh, chsh_correlator, canonical_i3322, generate_facet_orbit, spanning_vertices,
                     generate_facets, write_facets, read_facets)

__all__ = ['BellInequality', 'classical_bound', 'canonical_form', 'direction_basis', 'Relabeling', 'relabeling_group',
           'canonical_chsh', 'chsh_correlator', 'canonical_i3322', 'generate_facet_orbit', 'spanning_vertices',
           'generate_facets', 'write_facets', 'read_facets']
