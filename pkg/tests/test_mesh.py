"""Mesh construction, adjacency tables, and quality metrics."""

import numpy as np
import pytest

from histremesh import (
    DegenerateElementError,
    MeshBuildError,
    NonManifoldError,
    aspect_ratio,
    aspect_ratios,
    boundary_loops,
    build_mesh,
    element_basis,
    element_centroid,
    element_normals,
    median_edge_length,
    mesh_quality_summary,
    torus_mesh,
    total_area,
)
from histremesh.mesh import edge_lengths, element_areas, quantiles_sorted


def flat_mesh(points, triangles, mode="auto"):
    pts = np.asarray(points, dtype=np.float64)
    return build_mesh(pts, pts, np.asarray(triangles, dtype=np.int64), mode=mode)


def test_unit_triangle():
    mesh = flat_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    assert mesh.mode == "planar"
    assert mesh.n_nodes == 3
    assert mesh.n_elements == 1
    assert mesh.n_edges == 3
    assert mesh.initial.shape == (3, 3)
    assert np.all(mesh.initial[:, 2] == 0.0)
    assert mesh.boundary_edge_mask.all()
    assert not mesh.is_closed

    assert total_area(mesh) == pytest.approx(0.5, abs=1e-15)
    assert element_areas(mesh)[0] == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(element_normals(mesh), [[0.0, 0.0, 1.0]], atol=1e-15)
    np.testing.assert_allclose(
        element_centroid(mesh, 0), [1 / 3, 1 / 3, 0.0], atol=1e-15
    )
    # edges 1, 1, sqrt(2)
    assert median_edge_length(mesh) == pytest.approx(1.0)
    assert sorted(edge_lengths(mesh)) == pytest.approx([1.0, 1.0, np.sqrt(2.0)])


def test_positions_accessor():
    mesh = flat_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    assert mesh.positions("initial") is mesh.initial
    assert mesh.positions("current") is mesh.current
    with pytest.raises(ValueError, match="unknown configuration"):
        mesh.positions("bogus")


def test_arrays_are_read_only():
    mesh = flat_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    for arr in (mesh.initial, mesh.current, mesh.triangles, mesh.edges):
        assert not arr.flags.writeable


def test_shared_edge_adjacency():
    mesh = flat_mesh(
        [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        [[0, 1, 2], [0, 2, 3]],
    )
    assert mesh.n_edges == 5
    assert mesh.boundary_edge_mask.sum() == 4

    # rebuild the incidence independently from the triangle list
    incidence = {}
    for t, tri in enumerate(mesh.triangles):
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            incidence.setdefault((min(a, b), max(a, b)), []).append(t)
    for e, (a, b) in enumerate(mesh.edges):
        expected = incidence[(a, b)]
        got = [t for t in mesh.edge_tris[e] if t >= 0]
        assert got == expected

    # every triangle contributes exactly three edge slots
    counts = (mesh.edge_tris >= 0).sum()
    assert counts == 3 * mesh.n_elements

    # tri_edges round trip: each listed edge uses two vertices of its triangle
    for t, tri in enumerate(mesh.triangles):
        for e in mesh.tri_edges[t]:
            assert set(mesh.edges[e]) <= set(tri)


def test_closed_mesh_has_no_boundary():
    mesh = torus_mesh(target_edge_length=0.5)
    assert mesh.is_closed
    assert not mesh.boundary_edge_mask.any()
    assert boundary_loops(mesh) == []


def test_build_rejects_bad_shapes():
    pts = np.zeros((3, 4))
    with pytest.raises(MeshBuildError, match=r"\(N, 2\) or \(N, 3\)"):
        build_mesh(pts, pts, [[0, 1, 2]])
    good = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(MeshBuildError, match="differ in shape"):
        build_mesh(good, good[:2], [[0, 1, 2]])
    with pytest.raises(MeshBuildError, match=r"\(T, 3\)"):
        build_mesh(good, good, [[0, 1]])
    with pytest.raises(MeshBuildError, match="no triangles"):
        build_mesh(good, good, np.zeros((0, 3), dtype=np.int64))
    with pytest.raises(MeshBuildError, match="non-finite"):
        build_mesh(np.array([[0.0, 0.0], [np.nan, 0.0], [0.0, 1.0]]), good,
                   [[0, 1, 2]])


def test_build_rejects_bad_indices():
    pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    with pytest.raises(MeshBuildError, match="out of range") as exc:
        flat_mesh(pts, [[0, 1, 3]])
    assert exc.value.triangle == 0
    with pytest.raises(MeshBuildError, match="repeats a vertex"):
        flat_mesh(pts, [[0, 1, 1]])


def test_build_rejects_duplicate_triangle():
    pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    # same element under cyclic permutation
    with pytest.raises(MeshBuildError, match="duplicate triangle") as exc:
        flat_mesh(pts, [[0, 1, 2], [1, 2, 0]])
    assert exc.value.triangle == 1


def test_build_rejects_degenerate_triangle():
    pts = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0]])
    with pytest.raises(MeshBuildError, match="degenerate triangle"):
        build_mesh(pts, pts, [[0, 1, 2]], mode="surface")


def test_build_rejects_nonmanifold_edge():
    pts = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 1.0, 0.0],
        [0.5, -1.0, 0.0],
        [0.5, 0.0, 1.0],
    ])
    tris = [[0, 1, 2], [1, 0, 3], [0, 1, 4]]
    with pytest.raises(NonManifoldError, match="3 incident triangles"):
        build_mesh(pts, pts, tris, mode="surface")


def test_build_rejects_inconsistent_winding():
    pts = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 1.0, 0.0],
        [0.5, -1.0, 0.0],
    ])
    # both triangles traverse edge (0, 1) in the same direction
    with pytest.raises(MeshBuildError, match="inconsistent winding"):
        build_mesh(pts, pts, [[0, 1, 2], [0, 1, 3]], mode="surface")


def test_planar_mode_constraints():
    pts2 = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    with pytest.raises(MeshBuildError, match="counterclockwise winding"):
        flat_mesh(pts2, [[0, 2, 1]])
    pts3 = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.5]])
    with pytest.raises(MeshBuildError, match="z == 0"):
        build_mesh(pts3, pts3, [[0, 1, 2]], mode="planar")
    with pytest.raises(MeshBuildError, match="unknown mode"):
        flat_mesh(pts2, [[0, 1, 2]], mode="cylindrical")
    # auto mode classifies the same positions as a surface
    mesh = build_mesh(pts3, pts3, [[0, 1, 2]])
    assert mesh.mode == "surface"


def test_with_current_replaces_positions():
    mesh = flat_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    moved = mesh.current.copy()
    moved[:, 0] += 1.0
    out = mesh.with_current(moved)
    assert out is not mesh
    np.testing.assert_array_equal(out.initial, mesh.initial)
    np.testing.assert_array_equal(out.current, moved)
    assert out.triangles is mesh.triangles
    with pytest.raises(MeshBuildError, match="wrong shape"):
        mesh.with_current(moved[:2])
    bad = moved.copy()
    bad[0, 2] = 0.25
    with pytest.raises(MeshBuildError, match="z == 0"):
        mesh.with_current(bad)


def test_with_initial_replaces_positions():
    mesh = flat_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    ref = mesh.initial.copy()
    ref[:, :2] *= 2.0
    out = mesh.with_initial(ref)
    np.testing.assert_array_equal(out.initial, ref)
    np.testing.assert_array_equal(out.current, mesh.current)


def test_element_basis_edge_frame():
    mesh = flat_mesh([[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]], [[0, 1, 2]])
    basis = element_basis(mesh, 0)
    np.testing.assert_array_equal(basis.origin, [0.0, 0.0, 0.0])
    np.testing.assert_array_equal(basis.u1, [2.0, 0.0, 0.0])
    np.testing.assert_array_equal(basis.u2, [1.0, 1.0, 0.0])
    np.testing.assert_allclose(basis.normal, [0.0, 0.0, 1.0], atol=1e-15)


def test_element_basis_rotated_frame():
    # edge vectors follow the element, not the world axes
    angle = 0.3
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    pts = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, 1.0, 0.0]]) @ rot.T
    shift = np.array([5.0, -2.0, 1.0])
    pts += shift
    mesh = build_mesh(pts, pts, [[0, 1, 2]], mode="surface")
    basis = element_basis(mesh, 0)
    np.testing.assert_allclose(basis.origin, shift, atol=1e-15)
    np.testing.assert_allclose(basis.u1, rot @ [2.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(basis.u2, rot @ [1.0, 1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(basis.normal, [0.0, 0.0, 1.0], atol=1e-15)
    assert np.linalg.norm(basis.normal) == pytest.approx(1.0, abs=1e-15)
    assert abs(np.dot(basis.normal, basis.u1)) < 1e-14
    assert abs(np.dot(basis.normal, basis.u2)) < 1e-14


def test_element_basis_degenerate():
    mesh = flat_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    collinear = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    squashed = mesh.with_current(collinear)
    with pytest.raises(DegenerateElementError):
        element_basis(squashed, 0)


def test_aspect_ratio_equilateral():
    h = np.sqrt(3.0) / 2.0
    mesh = flat_mesh([[0.0, 0.0], [1.0, 0.0], [0.5, h]], [[0, 1, 2]])
    assert aspect_ratio(mesh, 0) == pytest.approx(1.0, abs=1e-12)


def test_aspect_ratio_right_isoceles():
    mesh = flat_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    # r_in = (2 - sqrt(2)) / 2, r_out = sqrt(2) / 2 gives 2 sqrt(2) - 2
    assert aspect_ratio(mesh, 0) == pytest.approx(2.0 * np.sqrt(2.0) - 2.0)


def test_aspect_ratio_degenerate_is_zero():
    mesh = flat_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    sliver = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 1e-14, 0.0]])
    vals = aspect_ratios(mesh.with_current(sliver))
    assert vals[0] < 1e-8
    collapsed = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.0, 0.0]])
    assert aspect_ratios(mesh.with_current(collapsed))[0] == 0.0


def test_aspect_ratio_similarity_invariant():
    rng = np.random.default_rng(3)
    for _ in range(50):
        tri = rng.normal(size=(3, 3))
        if np.linalg.norm(np.cross(tri[1] - tri[0], tri[2] - tri[0])) < 1e-3:
            continue
        mesh = build_mesh(tri, tri, [[0, 1, 2]], mode="surface")
        base = aspect_ratio(mesh, 0)
        assert 0.0 < base <= 1.0 + 1e-12
        # uniform scaling and rigid motion leave the ratio unchanged
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        moved = 2.5 * tri @ q.T + rng.normal(size=3)
        scaled = build_mesh(moved, moved, [[0, 1, 2]], mode="surface")
        assert aspect_ratio(scaled, 0) == pytest.approx(base, abs=1e-10)


def test_quality_summary_two_equilaterals():
    h = np.sqrt(3.0) / 2.0
    pts = [[0.0, 0.0], [1.0, 0.0], [0.5, h],
           [3.0, 0.0], [4.0, 0.0], [3.5, h]]
    mesh = flat_mesh(pts, [[0, 1, 2], [3, 4, 5]])
    summary = mesh_quality_summary(mesh)
    assert summary.n_elements == 2
    assert summary.median == pytest.approx(1.0, abs=1e-12)
    assert summary.iqr == pytest.approx(0.0, abs=1e-12)
    assert summary.min == pytest.approx(summary.max)


def test_quantiles_sorted_matches_percentile():
    rng = np.random.default_rng(17)
    for n in (1, 2, 3, 4, 5, 12, 101):
        vals = np.sort(rng.integers(0, 50, size=n).astype(np.float64))
        q1, med, q3 = quantiles_sorted(vals)
        assert q1 == np.percentile(vals, 25)
        assert med == np.percentile(vals, 50)
        assert q3 == np.percentile(vals, 75)


def test_boundary_loop_order_follows_winding():
    mesh = flat_mesh(
        [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        [[0, 1, 2], [0, 2, 3]],
    )
    loops = boundary_loops(mesh)
    assert len(loops) == 1
    loop = list(loops[0])
    assert sorted(loop) == [0, 1, 2, 3]
    # counterclockwise traversal, up to starting point
    start = loop.index(0)
    rotated = loop[start:] + loop[:start]
    assert rotated == [0, 1, 2, 3]
