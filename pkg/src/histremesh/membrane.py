"""Membrane strain measures, elastic energy, and nodal forces.

The strain model penalizes in-plane shear and area change of each element
relative to its stored initial shape:

    W(I1, I2) = (ks / 12) (I1^2 + 2 I1 - 2 I2) + (ka / 12) I2^2

with I1 = s1^2 + s2^2 - 2 and I2 = (s1 s2)^2 - 1 built from the principal
in-plane stretches s1 >= s2 of the element deformation gradient.

All element-level quantities are computed from edge Gram matrices, which
keeps them frame independent:  with G0 and G the initial and current Gram
matrices of the two edge vectors, B = G0^{-1},

    I1 = B : G - 2           I2 = det(G) / det(G0) - 1.

The force kernels in the compute backends differentiate exactly this
energy, so the discrete forces are the exact negative gradient of
``total_energy`` for any element shapes.
"""

from dataclasses import dataclass, replace

import numpy as np

from ._accel import kernels
from .errors import (
    ConfigurationError,
    DegenerateElementError,
    GeometryError,
    SimulationDivergedError,
)
from .mesh import SurfaceMesh


@dataclass(frozen=True)
class SkalakParams:
    """Shear and area-dilation moduli of the membrane energy."""

    kappa_shear: float = 0.01
    kappa_area: float = 1.0e-6

    def __post_init__(self):
        if self.kappa_shear < 0 or self.kappa_area < 0:
            raise ConfigurationError("moduli must be non-negative")


def skalak_energy_density(i1, i2, params):
    """Energy per unit initial area as a function of the invariants."""
    i1 = np.asarray(i1, dtype=np.float64)
    i2 = np.asarray(i2, dtype=np.float64)
    ks = params.kappa_shear
    ka = params.kappa_area
    w = (ks / 12.0) * (i1 * i1 + 2.0 * i1 - 2.0 * i2) + (ka / 12.0) * i2 * i2
    return w if w.ndim else float(w)


def _edge_vectors(mesh: SurfaceMesh, config: str):
    pos = mesh.positions(config)
    tri = mesh.triangles
    u1 = pos[tri[:, 1]] - pos[tri[:, 0]]
    u2 = pos[tri[:, 2]] - pos[tri[:, 0]]
    return u1, u2


def _gram(u1, u2):
    g11 = np.einsum("ij,ij->i", u1, u1)
    g12 = np.einsum("ij,ij->i", u1, u2)
    g22 = np.einsum("ij,ij->i", u2, u2)
    return g11, g12, g22


def element_invariants(mesh: SurfaceMesh):
    """Invariants (I1, I2) of every element, current vs initial shape."""
    u1, u2 = _edge_vectors(mesh, "current")
    v1, v2 = _edge_vectors(mesh, "initial")
    g11, g12, g22 = _gram(u1, u2)
    h11, h12, h22 = _gram(v1, v2)
    det0 = h11 * h22 - h12 * h12
    if np.any(det0 <= 0.0):
        bad = int(np.argmax(det0 <= 0.0))
        raise DegenerateElementError(
            "degenerate initial element", element=bad
        )
    det = g11 * g22 - g12 * g12
    i1 = (h22 * g11 - 2.0 * h12 * g12 + h11 * g22) / det0 - 2.0
    i2 = det / det0 - 1.0
    return i1, i2


def element_energies(mesh: SurfaceMesh, params: SkalakParams):
    """Per-element strain energy: density times initial area."""
    i1, i2 = element_invariants(mesh)
    v1, v2 = _edge_vectors(mesh, "initial")
    h11, h12, h22 = _gram(v1, v2)
    area0 = 0.5 * np.sqrt(h11 * h22 - h12 * h12)
    return skalak_energy_density(i1, i2, params) * area0


def total_energy(mesh: SurfaceMesh, params: SkalakParams) -> float:
    return float(np.sum(element_energies(mesh, params)))


def deformation_gradient(mesh: SurfaceMesh, element: int):
    """In-plane deformation gradient of one element as a 2x2 matrix.

    Expressed in the orthonormal tangent frames obtained by Gram-Schmidt
    on the edge vectors of the initial and current shapes; the singular
    values are the principal stretches.
    """
    u1, u2 = _edge_vectors(mesh, "current")
    v1, v2 = _edge_vectors(mesh, "initial")
    d = _frame_coords(u1[element], u2[element])
    d0 = _frame_coords(v1[element], v2[element])
    return d @ np.linalg.inv(d0)


def _frame_coords(e1, e2):
    n1 = np.linalg.norm(e1)
    if n1 == 0.0:
        raise DegenerateElementError("zero edge in element")
    t1 = e1 / n1
    p = float(e2 @ t1)
    r = e2 - p * t1
    n2 = np.linalg.norm(r)
    if n2 == 0.0:
        raise DegenerateElementError("collinear element edges")
    return np.array([[n1, p], [0.0, n2]])


def strain_invariants(f):
    """Invariants from a 2x2 deformation gradient via its singular values."""
    s = np.linalg.svd(np.asarray(f, dtype=np.float64), compute_uv=False)
    s1, s2 = float(s[0]), float(s[1])
    return s1 * s1 + s2 * s2 - 2.0, (s1 * s2) ** 2 - 1.0


def _reference_tables(mesh: SurfaceMesh):
    v1, v2 = _edge_vectors(mesh, "initial")
    h11, h12, h22 = _gram(v1, v2)
    det0 = h11 * h22 - h12 * h12
    if np.any(det0 <= 0.0):
        bad = int(np.argmax(det0 <= 0.0))
        raise DegenerateElementError(
            "degenerate initial element", element=bad
        )
    inv_det0 = 1.0 / det0
    b11 = h22 * inv_det0
    b12 = -h12 * inv_det0
    b22 = h11 * inv_det0
    area0 = 0.5 * np.sqrt(det0)
    return b11, b12, b22, inv_det0, area0


def elastic_nodal_forces(mesh: SurfaceMesh, params: SkalakParams,
                         positions=None):
    """Nodal elastic forces; exact negative gradient of the total energy.

    ``positions`` overrides the mesh's current configuration so a time
    stepper can evaluate forces without rebuilding the mesh object.
    """
    pos = mesh.current if positions is None else np.asarray(
        positions, dtype=np.float64)
    b11, b12, b22, inv_det0, area0 = _reference_tables(mesh)
    return kernels.elastic_forces(
        np.ascontiguousarray(pos),
        np.ascontiguousarray(mesh.triangles),
        b11, b12, b22, inv_det0, area0,
        params.kappa_shear, params.kappa_area,
    )


def enclosed_volume(mesh: SurfaceMesh, positions=None) -> float:
    """Signed volume enclosed by a closed surface (divergence theorem)."""
    pos = mesh.current if positions is None else np.asarray(
        positions, dtype=np.float64)
    tri = mesh.triangles
    a, b, c = pos[tri[:, 0]], pos[tri[:, 1]], pos[tri[:, 2]]
    return float(np.sum(np.einsum("ij,ij->i", a, np.cross(b, c))) / 6.0)


def pressure_nodal_forces(mesh: SurfaceMesh, pressure: float,
                          positions=None, allow_open: bool = False):
    """Nodal forces of a uniform pressure acting along element normals.

    Each element contributes p * (u1 x u2) / 6 to each of its corners;
    positive pressure inflates an outward-oriented closed surface.
    """
    if not allow_open and not mesh.is_closed:
        raise GeometryError("pressure load needs a closed surface")
    pos = mesh.current if positions is None else np.asarray(
        positions, dtype=np.float64)
    return kernels.pressure_forces(
        np.ascontiguousarray(pos),
        np.ascontiguousarray(mesh.triangles),
        float(pressure),
    )


@dataclass(frozen=True)
class MembraneState:
    """Overdamped membrane simulation state.

    ``mesh`` holds connectivity and the stored initial configuration;
    ``positions`` carries the evolving current coordinates, which may be
    ahead of ``mesh.current`` between remeshes.
    """

    mesh: SurfaceMesh
    positions: np.ndarray
    time: float
    params: SkalakParams
    pressure: float
    mobility: float

    def current_mesh(self) -> SurfaceMesh:
        return self.mesh.with_current(self.positions)


def membrane_state(mesh: SurfaceMesh, params: SkalakParams,
                   pressure: float = 0.0, mobility: float = 1.0,
                   time: float = 0.0) -> MembraneState:
    """Validate and assemble a simulation state.

    A non-zero pressure requires a closed, outward-oriented surface.
    """
    if mobility <= 0.0:
        raise ConfigurationError("mobility must be positive")
    if pressure != 0.0:
        if not mesh.is_closed:
            raise GeometryError("pressure load needs a closed surface")
        if enclosed_volume(mesh) <= 0.0:
            raise GeometryError("surface orientation is inward")
    return MembraneState(
        mesh=mesh,
        positions=np.array(mesh.current, dtype=np.float64, copy=True),
        time=float(time),
        params=params,
        pressure=float(pressure),
        mobility=float(mobility),
    )


def step_overdamped(state: MembraneState, dt: float) -> MembraneState:
    """Advance one explicit step: x += mobility * f(x) * dt."""
    if dt <= 0.0:
        raise ConfigurationError("dt must be positive")
    forces = elastic_nodal_forces(state.mesh, state.params,
                                  positions=state.positions)
    if state.pressure != 0.0:
        forces = forces + pressure_nodal_forces(
            state.mesh, state.pressure, positions=state.positions)
    new_pos = state.positions + state.mobility * dt * forces
    if not np.all(np.isfinite(new_pos)):
        bad = int(np.argmin(np.isfinite(new_pos).all(axis=1)))
        raise SimulationDivergedError(state.time + dt, bad)
    return replace(state, positions=new_pos, time=state.time + dt)
