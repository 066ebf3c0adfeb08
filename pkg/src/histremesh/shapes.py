"""Mesh generators for tests and experiments.

All generators return meshes whose initial and current configurations
coincide (undeformed); deformation happens downstream.
"""

import numpy as np

from .errors import ConfigurationError
from .mesh import MODE_PLANAR, MODE_SURFACE, build_mesh


def _oriented(positions, triangles, outward_hint=None):
    """Fix a uniformly-wound structured mesh to positive orientation.

    ``outward_hint``: per-vertex outward directions; the mean alignment of
    element normals with it decides whether all triangles flip.  Without a
    hint the signed volume decides (closed surfaces).
    """
    v0 = positions[triangles[:, 0]]
    cr = np.cross(
        positions[triangles[:, 1]] - v0, positions[triangles[:, 2]] - v0
    )
    if outward_hint is not None:
        hint = (
            outward_hint[triangles[:, 0]]
            + outward_hint[triangles[:, 1]]
            + outward_hint[triangles[:, 2]]
        )
        score = float((cr * hint).sum())
    else:
        score = float((v0 * cr).sum())  # ~ 6 * signed volume
    if score < 0.0:
        triangles = triangles[:, [0, 2, 1]]
    return triangles


def cylinder_mesh(radius=1.0, height=2.0 * np.pi, target_edge_length=0.2):
    """Open cylinder around the z axis, z in [0, height].

    Rings are offset by half a segment alternately, which makes the strip
    triangles near equilateral.  Both boundary circles stay open loops.
    """
    if radius <= 0 or height <= 0 or target_edge_length <= 0:
        raise ConfigurationError("cylinder dimensions must be positive")
    nu = max(6, int(round(2.0 * np.pi * radius / target_edge_length)))
    dz = target_edge_length * np.sqrt(3.0) / 2.0
    nv = max(3, int(round(height / dz)) + 1)
    zs = np.linspace(0.0, height, nv)
    pts = np.empty((nv * nu, 3), dtype=np.float64)
    for i in range(nv):
        offset = 0.5 * (i % 2)
        ang = 2.0 * np.pi * (np.arange(nu) + offset) / nu
        pts[i * nu : (i + 1) * nu, 0] = radius * np.cos(ang)
        pts[i * nu : (i + 1) * nu, 1] = radius * np.sin(ang)
        pts[i * nu : (i + 1) * nu, 2] = zs[i]
    tris = []
    for i in range(nv - 1):
        a = i * nu
        b = (i + 1) * nu
        for j in range(nu):
            jn = (j + 1) % nu
            if i % 2 == 0:
                tris.append((a + j, b + j, a + jn))
                tris.append((b + j, b + jn, a + jn))
            else:
                tris.append((a + j, b + j, b + jn))
                tris.append((a + j, b + jn, a + jn))
    tris = np.asarray(tris, dtype=np.int64)
    radial = pts.copy()
    radial[:, 2] = 0.0
    tris = _oriented(pts, tris, outward_hint=radial)
    return build_mesh(pts, pts, tris, mode=MODE_SURFACE)


def torus_mesh(major_radius=1.0, minor_radius=0.4, target_edge_length=0.2):
    """Closed torus around the z axis; outward orientation."""
    if minor_radius <= 0 or major_radius <= minor_radius:
        raise ConfigurationError("torus needs 0 < minor_radius < major_radius")
    if target_edge_length <= 0:
        raise ConfigurationError("target edge length must be positive")
    nu = max(8, int(round(2.0 * np.pi * major_radius / target_edge_length)))
    nv = max(6, int(round(2.0 * np.pi * minor_radius / target_edge_length)))
    theta = 2.0 * np.pi * np.arange(nu) / nu
    phi = 2.0 * np.pi * np.arange(nv) / nv
    pts = np.empty((nu * nv, 3), dtype=np.float64)
    centers = np.empty_like(pts)
    for i in range(nu):
        ring = major_radius + minor_radius * np.cos(phi)
        base = i * nv
        pts[base : base + nv, 0] = ring * np.cos(theta[i])
        pts[base : base + nv, 1] = ring * np.sin(theta[i])
        pts[base : base + nv, 2] = minor_radius * np.sin(phi)
        centers[base : base + nv, 0] = major_radius * np.cos(theta[i])
        centers[base : base + nv, 1] = major_radius * np.sin(theta[i])
        centers[base : base + nv, 2] = 0.0
    tris = []
    for i in range(nu):
        a = i * nv
        b = ((i + 1) % nu) * nv
        for j in range(nv):
            jn = (j + 1) % nv
            tris.append((a + j, b + j, b + jn))
            tris.append((a + j, b + jn, a + jn))
    tris = np.asarray(tris, dtype=np.int64)
    tris = _oriented(pts, tris, outward_hint=pts - centers)
    return build_mesh(pts, pts, tris, mode=MODE_SURFACE)


def icosphere_mesh(radius=1.0, subdivisions=2):
    """Unit icosahedron subdivided and projected to the sphere."""
    if subdivisions < 0 or subdivisions > 7:
        raise ConfigurationError("subdivisions out of range")
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
            (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
            (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
        ],
        dtype=np.float64,
    )
    verts /= np.sqrt((verts * verts).sum(axis=1))[:, None]
    faces = np.array(
        [
            (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
            (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
            (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
            (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
        ],
        dtype=np.int64,
    )
    for _ in range(subdivisions):
        verts_list = [v for v in verts]
        midpoint = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                m = verts_list[i] + verts_list[j]
                m = m / np.sqrt(m @ m)
                midpoint[key] = len(verts_list)
                verts_list.append(m)
            return midpoint[key]

        new_faces = []
        for (a, b, c) in faces:
            ab = mid(a, b)
            bc = mid(b, c)
            ca = mid(c, a)
            new_faces.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        verts = np.asarray(verts_list)
        faces = np.asarray(new_faces, dtype=np.int64)
    pts = radius * verts
    faces = _oriented(pts, faces)
    return build_mesh(pts, pts, faces, mode=MODE_SURFACE)


def square_mesh(size=3.0, target_edge_length=0.2, seed=0):
    """Unstructured triangulation of the axis-aligned square [0, size]^2.

    Interior nodes are strongly randomized (no lattice alignment, no
    smoothing) so element orientations and shapes vary the way meshes
    from general-purpose generators do; anisotropic deformations then
    degrade element quality instead of being partially absorbed by a
    perfectly regular pattern.
    """
    from .remesh import triangulate_polygon

    if size <= 0 or target_edge_length <= 0:
        raise ConfigurationError("square dimensions must be positive")
    corners = np.array(
        [(0.0, 0.0), (size, 0.0), (size, size), (0.0, size)], dtype=np.float64
    )
    pts, tris = triangulate_polygon(corners, target_edge_length, seed=seed,
                                    smooth_iters=0, jitter=0.35)
    return build_mesh(pts, pts, tris, mode=MODE_PLANAR)
