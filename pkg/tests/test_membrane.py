"""Skalak strain energy, nodal forces, and the overdamped stepper."""

import numpy as np
import pytest

from histremesh import (
    ConfigurationError,
    DegenerateElementError,
    GeometryError,
    SimulationDivergedError,
    SkalakParams,
    build_mesh,
    cylinder_mesh,
    deformation_gradient,
    elastic_nodal_forces,
    element_invariants,
    icosphere_mesh,
    membrane_state,
    pressure_nodal_forces,
    skalak_energy_density,
    square_mesh,
    step_overdamped,
    strain_invariants,
    torus_mesh,
    total_area,
    total_energy,
)
from histremesh.membrane import element_energies, enclosed_volume

PARAMS = SkalakParams(kappa_shear=0.01, kappa_area=1e-6)


def stretched_triangle(scale_x, scale_y):
    ini = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    cur = ini * [scale_x, scale_y]
    return build_mesh(ini, cur, [[0, 1, 2]])


def test_energy_density_frozen_values():
    assert skalak_energy_density(0.0, 0.0, PARAMS) == 0.0
    # I1 = 6, I2 = 15 is an equibiaxial stretch of 2
    assert skalak_energy_density(6.0, 15.0, PARAMS) == pytest.approx(
        0.01501875, rel=1e-15
    )
    # I1 = 2.25, I2 = 0 is area preserving
    assert skalak_energy_density(2.25, 0.0, PARAMS) == pytest.approx(
        7.96875e-3, rel=1e-15
    )
    assert skalak_energy_density(2.0, 3.0, PARAMS) == pytest.approx(
        1.667416666666667e-3, rel=1e-14
    )


def test_energy_density_accepts_arrays():
    i1 = np.array([0.0, 6.0])
    i2 = np.array([0.0, 15.0])
    out = skalak_energy_density(i1, i2, PARAMS)
    np.testing.assert_allclose(out, [0.0, 0.01501875], rtol=1e-15)


def test_energy_density_identity_and_positivity():
    # I1^2 + 2 I1 - 2 I2 equals the sum of squared principal strains,
    # so the shear term never drives the density negative
    rng = np.random.default_rng(2)
    lam = rng.uniform(0.5, 2.0, size=(1000, 2))
    i1 = (lam ** 2).sum(axis=1) - 2.0
    i2 = (lam ** 2).prod(axis=1) - 1.0
    lhs = i1 ** 2 + 2.0 * i1 - 2.0 * i2
    rhs = ((lam ** 2 - 1.0) ** 2).sum(axis=1)
    assert np.abs(lhs - rhs).max() <= 1e-12 * np.maximum(1.0, np.abs(rhs)).max()
    assert np.all(skalak_energy_density(i1, i2, PARAMS) >= 0.0)


def test_params_must_be_non_negative():
    with pytest.raises(ConfigurationError, match="non-negative"):
        SkalakParams(kappa_shear=-0.01, kappa_area=1e-6)
    with pytest.raises(ConfigurationError, match="non-negative"):
        SkalakParams(kappa_shear=0.01, kappa_area=-1.0)


def test_element_invariants_undeformed():
    mesh = square_mesh(size=1.0, target_edge_length=0.3, seed=0)
    i1, i2 = element_invariants(mesh)
    np.testing.assert_allclose(i1, 0.0, atol=1e-12)
    np.testing.assert_allclose(i2, 0.0, atol=1e-12)


def test_element_invariants_uniform_scale():
    mesh = stretched_triangle(2.0, 2.0)
    i1, i2 = element_invariants(mesh)
    assert i1[0] == pytest.approx(6.0, abs=1e-12)
    assert i2[0] == pytest.approx(15.0, abs=1e-12)


def test_element_invariants_rotation_invariant():
    rng = np.random.default_rng(7)
    mesh = square_mesh(size=1.0, target_edge_length=0.3, seed=0)
    stretched = mesh.current.copy()
    stretched[:, 0] *= 1.7
    stretched[:, 1] *= 0.8
    base = build_mesh(mesh.initial, stretched, mesh.triangles, mode="planar")
    i1_ref, i2_ref = element_invariants(base)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    rotated = build_mesh(
        mesh.initial, stretched @ q.T + [0.3, -1.0, 2.0], mesh.triangles,
        mode="surface",
    )
    i1_rot, i2_rot = element_invariants(rotated)
    np.testing.assert_allclose(i1_rot, i1_ref, atol=1e-10)
    np.testing.assert_allclose(i2_rot, i2_ref, atol=1e-10)


def test_element_invariants_degenerate_reference():
    mesh = stretched_triangle(1.0, 1.0)
    broken = mesh.with_initial(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    )
    with pytest.raises(DegenerateElementError, match="initial"):
        element_invariants(broken)


def test_deformation_gradient_frozen_cases():
    np.testing.assert_allclose(
        deformation_gradient(stretched_triangle(1.0, 1.0), 0), np.eye(2),
        atol=1e-14,
    )
    np.testing.assert_allclose(
        deformation_gradient(stretched_triangle(2.0, 2.0), 0),
        [[2.0, 0.0], [0.0, 2.0]], atol=1e-14,
    )
    np.testing.assert_allclose(
        deformation_gradient(stretched_triangle(2.0, 0.5), 0),
        [[2.0, 0.0], [0.0, 0.5]], atol=1e-14,
    )


def test_strain_invariants_from_gradient():
    f = deformation_gradient(stretched_triangle(2.0, 0.5), 0)
    i1, i2 = strain_invariants(f)
    assert i1 == pytest.approx(2.25, abs=1e-12)
    assert i2 == pytest.approx(0.0, abs=1e-12)
    # agreement with the Gram-matrix route
    i1g, i2g = element_invariants(stretched_triangle(2.0, 0.5))
    assert i1 == pytest.approx(i1g[0], abs=1e-12)
    assert i2 == pytest.approx(i2g[0], abs=1e-12)


def test_total_energy_hand_value():
    mesh = stretched_triangle(2.0, 2.0)
    # density 0.01501875 over initial area 1/2
    assert total_energy(mesh, PARAMS) == pytest.approx(7.509375e-3, rel=1e-14)
    energies = element_energies(mesh, PARAMS)
    assert energies.shape == (1,)
    assert energies[0] == pytest.approx(7.509375e-3, rel=1e-14)


def test_forces_vanish_at_rest():
    mesh = square_mesh(size=1.0, target_edge_length=0.3, seed=0)
    forces = elastic_nodal_forces(mesh, PARAMS)
    assert forces.shape == (mesh.n_nodes, 3)
    assert np.abs(forces).max() < 1e-12


def test_forces_are_translation_invariant():
    mesh = square_mesh(size=1.0, target_edge_length=0.3, seed=0)
    stretched = mesh.current * [1.4, 0.9, 1.0]
    f0 = elastic_nodal_forces(mesh, PARAMS, positions=stretched)
    f1 = elastic_nodal_forces(mesh, PARAMS, positions=stretched + [3.0, -2.0, 0.0])
    np.testing.assert_allclose(f1, f0, rtol=1e-9, atol=1e-15)
    # and they sum to zero: internal forces carry no net momentum
    np.testing.assert_allclose(f0.sum(axis=0), 0.0, atol=1e-12)


def test_forces_match_energy_gradient():
    mesh = square_mesh(size=1.0, target_edge_length=0.4, seed=6)
    stretched = mesh.current * [1.3, 0.85, 1.0]
    stretched[:, 2] = 0.0
    mesh = mesh.with_current(stretched)
    forces = elastic_nodal_forces(mesh, PARAMS)
    h = 1e-6
    rng = np.random.default_rng(10)
    nodes = rng.choice(mesh.n_nodes, size=6, replace=False)
    for node in nodes:
        for axis in range(3):
            plus = mesh.current.copy()
            minus = mesh.current.copy()
            plus[node, axis] += h
            minus[node, axis] -= h
            ep = total_energy(
                build_mesh(mesh.initial, plus, mesh.triangles, mode="surface"),
                PARAMS,
            )
            em = total_energy(
                build_mesh(mesh.initial, minus, mesh.triangles, mode="surface"),
                PARAMS,
            )
            fd = -(ep - em) / (2.0 * h)
            assert forces[node, axis] == pytest.approx(fd, rel=1e-4, abs=1e-10)


def test_enclosed_volume():
    ball = icosphere_mesh(radius=1.0, subdivisions=3)
    assert enclosed_volume(ball) == pytest.approx(4.0 * np.pi / 3.0, rel=0.01)
    donut = torus_mesh(major_radius=1.0, minor_radius=0.4, target_edge_length=0.1)
    assert enclosed_volume(donut) == pytest.approx(
        2.0 * np.pi ** 2 * 1.0 * 0.4 ** 2, rel=0.02
    )


def test_pressure_forces_closed_surface():
    ball = icosphere_mesh(radius=1.0, subdivisions=2)
    forces = pressure_nodal_forces(ball, 0.5)
    # uniform pressure on a closed surface has zero resultant
    total = np.abs(forces).sum()
    assert np.abs(forces.sum(axis=0)).max() < 1e-6 * total
    # outward orientation: positive pressure pushes away from the center
    outward = (forces * ball.current).sum()
    assert outward > 0.0
    assert np.all(pressure_nodal_forces(ball, 0.0) == 0.0)


def test_pressure_forces_open_surface():
    tube = cylinder_mesh(target_edge_length=0.5)
    with pytest.raises(GeometryError, match="closed surface"):
        pressure_nodal_forces(tube, 1.0)
    square = square_mesh(size=1.0, target_edge_length=0.3, seed=0)
    forces = pressure_nodal_forces(square, 2.0, allow_open=True)
    expected = np.array([0.0, 0.0, 2.0 * total_area(square)])
    np.testing.assert_allclose(forces.sum(axis=0), expected, rtol=1e-12)


def test_membrane_state_validation():
    ball = icosphere_mesh(radius=1.0, subdivisions=1)
    with pytest.raises(ConfigurationError, match="mobility"):
        membrane_state(ball, PARAMS, mobility=0.0)
    tube = cylinder_mesh(target_edge_length=0.5)
    with pytest.raises(GeometryError, match="closed surface"):
        membrane_state(tube, PARAMS, pressure=0.1)
    flipped = build_mesh(
        ball.initial, ball.current, np.asarray(ball.triangles)[:, ::-1]
    )
    with pytest.raises(GeometryError, match="inward"):
        membrane_state(flipped, PARAMS, pressure=0.1)
    # zero pressure: open meshes are fine
    state = membrane_state(tube, PARAMS, mobility=2.0)
    assert state.mobility == 2.0
    np.testing.assert_array_equal(state.positions, tube.current)
    np.testing.assert_array_equal(state.current_mesh().current, tube.current)


def test_step_overdamped_rest_state():
    ball = icosphere_mesh(radius=1.0, subdivisions=1)
    state = membrane_state(ball, PARAMS)
    after = step_overdamped(state, 0.25)
    assert after.time == 0.25
    np.testing.assert_allclose(after.positions, state.positions, atol=1e-12)
    with pytest.raises(ConfigurationError, match="dt"):
        step_overdamped(state, 0.0)


def test_step_overdamped_relaxes_energy():
    ball = icosphere_mesh(radius=1.0, subdivisions=1)
    inflated = build_mesh(ball.initial, ball.current * 1.2, ball.triangles)
    state = membrane_state(inflated, PARAMS, mobility=10.0)
    before = total_energy(inflated, PARAMS)
    for _ in range(20):
        state = step_overdamped(state, 0.05)
    after = total_energy(state.current_mesh(), PARAMS)
    assert after < before


def test_step_overdamped_detects_divergence():
    ball = icosphere_mesh(radius=1.0, subdivisions=1)
    inflated = build_mesh(ball.initial, ball.current * 1.5, ball.triangles)
    state = membrane_state(inflated, PARAMS, mobility=1e12)
    with np.errstate(all="ignore"):
        with pytest.raises(SimulationDivergedError) as exc:
            for _ in range(50):
                state = step_overdamped(state, 1e6)
    assert exc.value.time > 0.0
    assert 0 <= exc.value.node < ball.n_nodes
