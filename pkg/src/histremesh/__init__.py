"""History-preserving remeshing for triangle surface meshes.

A mesh carries two node configurations: the initial (reference) one and
the current (deformed) one.  When element quality degrades, a fresh mesh
of the current surface is generated and every new node is mapped back
through the old mesh's per-element linear deformation, giving it an
initial position consistent with the old mesh's history.  Strain, and
hence membrane stress, survives the remesh.
"""

from ._accel import BACKEND, HAS_NUMBA
from .deformations import (
    IdentityDeformation,
    QuadraticStretch,
    SinusoidalBend,
    TimeInterpolatedDeformation,
    exact_invariants,
)
from .errors import (
    ConfigurationError,
    DegenerateElementError,
    FileFormatError,
    GeometryError,
    HistremeshError,
    MeshBuildError,
    NonManifoldError,
    SearchError,
    SimulationDivergedError,
    TransferError,
)
from .fileio import (
    load_mesh_pair,
    read_obj,
    read_off,
    save_mesh_pair,
    write_obj,
    write_off,
)
from .harness import (
    run_cylinder_spatial_experiment,
    run_frequency_experiment,
    run_pressure_simulation,
    run_square_spatial_experiment,
    run_strain_experiment,
    spatial_error,
    strain_error,
    write_results,
)
from .membrane import (
    MembraneState,
    SkalakParams,
    deformation_gradient,
    elastic_nodal_forces,
    element_invariants,
    membrane_state,
    pressure_nodal_forces,
    skalak_energy_density,
    step_overdamped,
    strain_invariants,
    total_energy,
)
from .mesh import (
    ElementBasis,
    QualitySummary,
    SurfaceMesh,
    aspect_ratio,
    aspect_ratios,
    boundary_loops,
    build_mesh,
    element_basis,
    element_centroid,
    element_normals,
    mesh_quality_summary,
    median_edge_length,
    total_area,
)
from .remesh import (
    RemeshConfig,
    remesh_mesh,
    remesh_planar,
    remesh_surface,
    should_remesh,
    triangulate_polygon,
)
from .search import (
    SearchResult,
    brute_force_nearest_elements,
    closest_points_on_mesh,
    dividing_plane,
    find_nearest_element,
    find_nearest_elements,
    nearest_centroid_element,
    nearest_edge,
    point_in_prism,
)
from .shapes import cylinder_mesh, icosphere_mesh, square_mesh, torus_mesh
from .transfer import (
    BasisCoefficients,
    MapResult,
    TransferReport,
    apply_basis,
    basis_coefficients,
    map_to_initial,
    transfer_initial_configuration,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
