"""Spatial grids, kinetic energy and bound states."""

from phasegate.grid.eigen import (BoundState,
                                  check_grid_convergence,
                                  displaced_ground_state,
                                  export_eigenstates,
                                  ground_state_overlap,
                                  solve_bound_states)
from phasegate.grid.grid import (GridSpec,
                                 MappedMapping,
                                 SpatialGrid,
                                 UniformMapping,
                                 apply_kinetic,
                                 boundary_population,
                                 build_grid,
                                 kinetic_matrix)


__all__ = [
    'BoundState',
    'GridSpec',
    'MappedMapping',
    'SpatialGrid',
    'UniformMapping',
    'apply_kinetic',
    'boundary_population',
    'build_grid',
    'check_grid_convergence',
    'displaced_ground_state',
    'export_eigenstates',
    'ground_state_overlap',
    'kinetic_matrix',
    'solve_bound_states',
]
