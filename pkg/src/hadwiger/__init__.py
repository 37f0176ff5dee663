"""Hexagonal-lattice models whose energy is a valuation of the filled region."""

from .errors import HadwigerError, TooLargeError
from .functionals import (
    Configuration,
    GeometricValues,
    VertexState,
    delta_energy,
    energy,
    geometric_values_direct,
    geometric_values_from_states,
    vertex_state,
)
from .hexlattice import HexDomain, HexTorus, make_domain, make_torus
from .model import (
    CONVENTION,
    GeometricParams,
    RegionLabel,
    VertexEnergies,
    classify,
    ground_configurations,
    preset,
    to_geometric_params,
    to_vertex_energies,
)

__version__ = "0.1.0"
