"""Pure-numpy kernel lane.

Reference implementations of the hot geometric loops.  The jitted lane in
``_kernels_numba`` mirrors these function-for-function; the two must agree
bitwise on query results (identical arithmetic, identical tie-breaking).

Conventions shared by both lanes:

- triangle vertex blocks ``tri_pts`` have shape (T, 3, 3): element, vertex,
  coordinate, in the element's stored winding order
- argmin ties are broken toward the lowest index
- search case codes: 1 = prism of the nearest-centroid element,
  2 = prism test at the nearest edge, 3 = dividing plane at the nearest
  edge, 4 = boundary edge
- the uniform grid is CSR-packed: ``cell_start`` (C+1,) and ``cell_items``
  hold element ids per cell, cells indexed x-fastest
"""

import numpy as np

CASE_PRISM = 1
CASE_EDGE_PRISM = 2
CASE_PLANE = 3
CASE_BOUNDARY = 4

_FOLD_EPS = 1e-12


# ---------------------------------------------------------------------------
# point/triangle primitives


def _closest_points_tris(a, b, c, p):
    """Closest point on each triangle (a, b, c) to p.

    a, b, c : (M, 3) vertex blocks, p : (3,).  Returns (points (M, 3),
    squared distances (M,)).  Region tests follow the standard Voronoi
    walk over vertex/edge/interior regions; branch priority matches the
    scalar kernel exactly.
    """
    ab = b - a
    ac = c - a
    ap = p[None, :] - a
    d1 = ab[:, 0] * ap[:, 0] + ab[:, 1] * ap[:, 1] + ab[:, 2] * ap[:, 2]
    d2 = ac[:, 0] * ap[:, 0] + ac[:, 1] * ap[:, 1] + ac[:, 2] * ap[:, 2]

    bp = p[None, :] - b
    d3 = ab[:, 0] * bp[:, 0] + ab[:, 1] * bp[:, 1] + ab[:, 2] * bp[:, 2]
    d4 = ac[:, 0] * bp[:, 0] + ac[:, 1] * bp[:, 1] + ac[:, 2] * bp[:, 2]

    cp = p[None, :] - c
    d5 = ab[:, 0] * cp[:, 0] + ab[:, 1] * cp[:, 1] + ab[:, 2] * cp[:, 2]
    d6 = ac[:, 0] * cp[:, 0] + ac[:, 1] * cp[:, 1] + ac[:, 2] * cp[:, 2]

    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    with np.errstate(divide="ignore", invalid="ignore"):
        v_ab = d1 / (d1 - d3)
        w_ac = d2 / (d2 - d6)
        w_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        denom = 1.0 / (va + vb + vc)
        v_in = vb * denom
        w_in = vc * denom

        pt_ab = a + v_ab[:, None] * ab
        pt_ac = a + w_ac[:, None] * ac
        pt_bc = b + w_bc[:, None] * (c - b)
        pt_in = a + v_in[:, None] * ab + w_in[:, None] * ac

        conds = [
            (d1 <= 0.0) & (d2 <= 0.0),
            (d3 >= 0.0) & (d4 <= d3),
            (vc <= 0.0) & (d1 >= 0.0) & (d3 <= 0.0),
            (d6 >= 0.0) & (d5 <= d6),
            (vb <= 0.0) & (d2 >= 0.0) & (d6 <= 0.0),
            (va <= 0.0) & ((d4 - d3) >= 0.0) & ((d5 - d6) >= 0.0),
        ]
        pts = np.empty_like(a)
        for k in range(3):
            pts[:, k] = np.select(
                conds,
                [a[:, k], b[:, k], pt_ab[:, k], c[:, k], pt_ac[:, k], pt_bc[:, k]],
                default=pt_in[:, k],
            )

    dx = p[0] - pts[:, 0]
    dy = p[1] - pts[:, 1]
    dz = p[2] - pts[:, 2]
    return pts, dx * dx + dy * dy + dz * dz


def _tri_sqdist(tri_pts, idx, p):
    """Squared distances from p to the triangles listed in idx."""
    sub = tri_pts[idx]
    _, sqd = _closest_points_tris(sub[:, 0], sub[:, 1], sub[:, 2], p)
    return sqd


def nearest_triangles(tri_pts, queries):
    """Exhaustive point-to-triangle argmin for each query.

    Returns (ids (Q,), squared distances (Q,)); ties go to the lowest id.
    """
    nq = queries.shape[0]
    ids = np.empty(nq, dtype=np.int64)
    sqd = np.empty(nq, dtype=np.float64)
    a = tri_pts[:, 0]
    b = tri_pts[:, 1]
    c = tri_pts[:, 2]
    for i in range(nq):
        _, d = _closest_points_tris(a, b, c, queries[i])
        j = int(np.argmin(d))
        ids[i] = j
        sqd[i] = d[j]
    return ids, sqd


def project_points_exhaustive(tri_pts, queries):
    """Closest point on the whole triangle set for each query.

    Returns (ids, points (Q, 3), squared distances).
    """
    nq = queries.shape[0]
    ids = np.empty(nq, dtype=np.int64)
    pts = np.empty((nq, 3), dtype=np.float64)
    sqd = np.empty(nq, dtype=np.float64)
    a = tri_pts[:, 0]
    b = tri_pts[:, 1]
    c = tri_pts[:, 2]
    for i in range(nq):
        cp, d = _closest_points_tris(a, b, c, queries[i])
        j = int(np.argmin(d))
        ids[i] = j
        pts[i] = cp[j]
        sqd[i] = d[j]
    return ids, pts, sqd


# ---------------------------------------------------------------------------
# uniform grid walk
#
# Cells at Chebyshev ring r around the query's (clamped) cell only hold
# items at Euclidean distance >= (r - 1) * cell_size, which bounds every
# walk below.  Items are binned by bounding box, so the bound also covers
# centroids and edges of binned elements.


def _cell_of(q, origin, inv_cell, dims):
    ix = int(np.floor((q[0] - origin[0]) * inv_cell))
    iy = int(np.floor((q[1] - origin[1]) * inv_cell))
    iz = int(np.floor((q[2] - origin[2]) * inv_cell))
    ix = min(max(ix, 0), int(dims[0]) - 1)
    iy = min(max(iy, 0), int(dims[1]) - 1)
    iz = min(max(iz, 0), int(dims[2]) - 1)
    return ix, iy, iz


def _ring_items(cx, cy, cz, r, dims, cell_start, cell_items):
    """Element ids stored in cells at Chebyshev distance exactly r."""
    nx, ny, nz = int(dims[0]), int(dims[1]), int(dims[2])
    out = []
    for dx in range(-r, r + 1):
        x = cx + dx
        if x < 0 or x >= nx:
            continue
        for dy in range(-r, r + 1):
            y = cy + dy
            if y < 0 or y >= ny:
                continue
            for dz in range(-r, r + 1):
                if max(abs(dx), abs(dy), abs(dz)) != r:
                    continue
                z = cz + dz
                if z < 0 or z >= nz:
                    continue
                cell = (z * ny + y) * nx + x
                s, e = cell_start[cell], cell_start[cell + 1]
                if e > s:
                    out.append(cell_items[s:e])
    if not out:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(out)


def _max_ring(cx, cy, cz, dims):
    return max(
        cx, int(dims[0]) - 1 - cx, cy, int(dims[1]) - 1 - cy, cz, int(dims[2]) - 1 - cz
    )


def _better(d, i, best_d, best):
    return d < best_d or (d == best_d and i < best)


def _grid_nearest_centroid(q, centroids, origin, inv_cell, dims, cell_start,
                           cell_items, stamp, tick):
    cs = 1.0 / inv_cell
    cx, cy, cz = _cell_of(q, origin, inv_cell, dims)
    rmax = _max_ring(cx, cy, cz, dims)
    best = -1
    best_d = np.inf
    for r in range(rmax + 1):
        if best >= 0:
            lb = (r - 1) * cs
            if lb > 0.0 and lb * lb > best_d:
                break
        ids = _ring_items(cx, cy, cz, r, dims, cell_start, cell_items)
        if ids.size == 0:
            continue
        ids = ids[stamp[ids] != tick]
        if ids.size == 0:
            continue
        stamp[ids] = tick
        d = _centroid_sqdist(centroids, ids, q)
        for j in np.argsort(ids):
            if _better(d[j], ids[j], best_d, best):
                best = int(ids[j])
                best_d = float(d[j])
    return best, best_d


def _grid_nearest_edge(q, tri_edges, pa, pb, origin, inv_cell, dims, cell_start,
                       cell_items, estamp, tick):
    cs = 1.0 / inv_cell
    cx, cy, cz = _cell_of(q, origin, inv_cell, dims)
    rmax = _max_ring(cx, cy, cz, dims)
    best = -1
    best_d = np.inf
    for r in range(rmax + 1):
        if best >= 0:
            lb = (r - 1) * cs
            if lb > 0.0 and lb * lb > best_d:
                break
        ids = _ring_items(cx, cy, cz, r, dims, cell_start, cell_items)
        if ids.size == 0:
            continue
        eids = np.unique(tri_edges[ids].ravel())
        eids = eids[estamp[eids] != tick]
        if eids.size == 0:
            continue
        estamp[eids] = tick
        d = _seg_sqdist(pa, pb, eids, q)
        for j in range(eids.size):
            if _better(d[j], eids[j], best_d, best):
                best = int(eids[j])
                best_d = float(d[j])
    return best, best_d


def _grid_nearest_triangle(q, tri_pts, origin, inv_cell, dims, cell_start,
                           cell_items, stamp, tick):
    cs = 1.0 / inv_cell
    cx, cy, cz = _cell_of(q, origin, inv_cell, dims)
    rmax = _max_ring(cx, cy, cz, dims)
    best = -1
    best_d = np.inf
    for r in range(rmax + 1):
        if best >= 0:
            lb = (r - 1) * cs
            if lb > 0.0 and lb * lb > best_d:
                break
        ids = _ring_items(cx, cy, cz, r, dims, cell_start, cell_items)
        if ids.size == 0:
            continue
        ids = ids[stamp[ids] != tick]
        if ids.size == 0:
            continue
        stamp[ids] = tick
        d = _tri_sqdist(tri_pts, ids, q)
        for j in np.argsort(ids):
            if _better(d[j], ids[j], best_d, best):
                best = int(ids[j])
                best_d = float(d[j])
    return best, best_d


def project_points(tri_pts, queries, origin, inv_cell, dims, cell_start, cell_items):
    """Grid-accelerated closest point on the triangle set for each query."""
    nq = queries.shape[0]
    ids = np.empty(nq, dtype=np.int64)
    pts = np.empty((nq, 3), dtype=np.float64)
    sqd = np.empty(nq, dtype=np.float64)
    stamp = np.full(tri_pts.shape[0], -1, dtype=np.int64)
    for i in range(nq):
        q = queries[i]
        j, d = _grid_nearest_triangle(
            q, tri_pts, origin, inv_cell, dims, cell_start, cell_items, stamp, i
        )
        cp, _ = _closest_points_tris(
            tri_pts[j : j + 1, 0], tri_pts[j : j + 1, 1], tri_pts[j : j + 1, 2], q
        )
        ids[i] = j
        pts[i] = cp[0]
        sqd[i] = d
    return ids, pts, sqd


# ---------------------------------------------------------------------------
# nearest-element cascade


def _seg_sqdist(pa, pb, idx, q):
    """Squared point-segment distances for the segments listed in idx."""
    a = pa[idx]
    d = pb[idx] - a
    dd = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2]
    qa = q[None, :] - a
    t = (qa[:, 0] * d[:, 0] + qa[:, 1] * d[:, 1] + qa[:, 2] * d[:, 2]) / dd
    t = np.minimum(np.maximum(t, 0.0), 1.0)
    cx = qa[:, 0] - t * d[:, 0]
    cy = qa[:, 1] - t * d[:, 1]
    cz = qa[:, 2] - t * d[:, 2]
    return cx * cx + cy * cy + cz * cz


def _centroid_sqdist(centroids, idx, q):
    c = centroids[idx]
    dx = c[:, 0] - q[0]
    dy = c[:, 1] - q[1]
    dz = c[:, 2] - q[2]
    return dx * dx + dy * dy + dz * dz


def _bary_in_prism(tri_pts, j, q, tol):
    """True if q projects into triangle j with barycentric slack tol."""
    v0 = tri_pts[j, 0]
    u1 = tri_pts[j, 1] - v0
    u2 = tri_pts[j, 2] - v0
    d = q - v0
    m11 = u1[0] * u1[0] + u1[1] * u1[1] + u1[2] * u1[2]
    m12 = u1[0] * u2[0] + u1[1] * u2[1] + u1[2] * u2[2]
    m22 = u2[0] * u2[0] + u2[1] * u2[1] + u2[2] * u2[2]
    r1 = u1[0] * d[0] + u1[1] * d[1] + u1[2] * d[2]
    r2 = u2[0] * d[0] + u2[1] * d[1] + u2[2] * d[2]
    det = m11 * m22 - m12 * m12
    b1 = (r1 * m22 - r2 * m12) / det
    b2 = (m11 * r2 - m12 * r1) / det
    b0 = 1.0 - b1 - b2
    return b0 >= -tol and b1 >= -tol and b2 >= -tol


def _plane_pick(tri_pts, centroids, normals, pa_k, pb_k, t1, t2, q):
    """Case 3 element choice at an interior edge.

    Dividing plane through the edge along the mean normal; the side facing
    element t1's centroid is positive.  Near fold-back (mean normal ~ 0,
    or a centroid exactly on the plane) fall back to the smaller
    point-to-triangle distance, preferring the lower id on a tie.
    """
    ex = pb_k[0] - pa_k[0]
    ey = pb_k[1] - pa_k[1]
    ez = pb_k[2] - pa_k[2]
    nx = 0.5 * (normals[t1, 0] + normals[t2, 0])
    ny = 0.5 * (normals[t1, 1] + normals[t2, 1])
    nz = 0.5 * (normals[t1, 2] + normals[t2, 2])
    mx = ey * nz - ez * ny
    my = ez * nx - ex * nz
    mz = ex * ny - ey * nx
    mlen = np.sqrt(mx * mx + my * my + mz * mz)
    if mlen > _FOLD_EPS:
        mx /= mlen
        my /= mlen
        mz /= mlen
        s = (
            mx * (centroids[t1, 0] - pa_k[0])
            + my * (centroids[t1, 1] - pa_k[1])
            + mz * (centroids[t1, 2] - pa_k[2])
        )
        if s != 0.0:
            if s < 0.0:
                mx = -mx
                my = -my
                mz = -mz
            side = (
                mx * (q[0] - pa_k[0]) + my * (q[1] - pa_k[1]) + mz * (q[2] - pa_k[2])
            )
            return t1 if side >= 0.0 else t2
    d1 = _tri_sqdist(tri_pts, np.array([t1], dtype=np.int64), q)[0]
    d2 = _tri_sqdist(tri_pts, np.array([t2], dtype=np.int64), q)[0]
    return t1 if d1 <= d2 else t2


def _finish_cascade(q, tol, tri_pts, centroids, normals, pa, pb, edge_tris, j, k):
    """Shared tail of the cascade once the two argmins are known."""
    if _bary_in_prism(tri_pts, j, q, tol):
        return j, CASE_PRISM
    t1 = int(edge_tris[k, 0])
    t2 = int(edge_tris[k, 1])
    if t2 < 0:
        return t1, CASE_BOUNDARY
    in1 = _bary_in_prism(tri_pts, t1, q, tol)
    in2 = _bary_in_prism(tri_pts, t2, q, tol)
    if in1 != in2:
        return (t1 if in1 else t2), CASE_EDGE_PRISM
    e = _plane_pick(tri_pts, centroids, normals, pa[k], pb[k], t1, t2, q)
    return e, CASE_PLANE


def search_batch_exhaustive(queries, tol, tri_pts, centroids, normals, pa, pb,
                            edge_tris):
    """Nearest-element cascade over all queries, exhaustive scans."""
    nq = queries.shape[0]
    ne = pa.shape[0]
    elems = np.empty(nq, dtype=np.int64)
    cases = np.empty(nq, dtype=np.int8)
    all_tris = np.arange(centroids.shape[0], dtype=np.int64)
    all_edges = np.arange(ne, dtype=np.int64)
    for i in range(nq):
        q = queries[i]
        dc = _centroid_sqdist(centroids, all_tris, q)
        j = int(np.argmin(dc))
        if _bary_in_prism(tri_pts, j, q, tol):
            elems[i] = j
            cases[i] = CASE_PRISM
            continue
        de = _seg_sqdist(pa, pb, all_edges, q)
        k = int(np.argmin(de))
        e, c = _finish_cascade(
            q, tol, tri_pts, centroids, normals, pa, pb, edge_tris, j, k
        )
        elems[i] = e
        cases[i] = c
    return elems, cases


def search_batch(queries, tol, tri_pts, centroids, normals, pa, pb, edge_tris,
                 tri_edges, origin, inv_cell, dims, cell_start, cell_items):
    """Nearest-element cascade with grid-accelerated argmin scans.

    Must agree bitwise with ``search_batch_exhaustive``: same distance
    arithmetic per candidate, ties to the lowest id, the grid only prunes.
    """
    nq = queries.shape[0]
    nt = centroids.shape[0]
    elems = np.empty(nq, dtype=np.int64)
    cases = np.empty(nq, dtype=np.int8)
    tstamp = np.full(nt, -1, dtype=np.int64)
    estamp = np.full(pa.shape[0], -1, dtype=np.int64)
    for i in range(nq):
        q = queries[i]
        j, _ = _grid_nearest_centroid(
            q, centroids, origin, inv_cell, dims, cell_start, cell_items,
            tstamp, 2 * i,
        )
        if _bary_in_prism(tri_pts, j, q, tol):
            elems[i] = j
            cases[i] = CASE_PRISM
            continue
        k, _ = _grid_nearest_edge(
            q, tri_edges, pa, pb, origin, inv_cell, dims, cell_start, cell_items,
            estamp, 2 * i,
        )
        e, c = _finish_cascade(
            q, tol, tri_pts, centroids, normals, pa, pb, edge_tris, j, k
        )
        elems[i] = e
        cases[i] = c
    return elems, cases


# ---------------------------------------------------------------------------
# membrane force assembly


def elastic_forces(pos, tri, b11, b12, b22, inv_det_g0, area0, ks, ka):
    """Nodal forces of the strain energy, exact negative gradient.

    Per element, with G the current metric (Gram matrix of the two edge
    vectors) and B the inverse reference metric: I1 = B:G - 2,
    I2 = det(G)/det(G0) - 1, and the energy density
    psi = ks/12 (I1^2 + 2 I1 - 2 I2) + ka/12 I2^2 integrates over the
    reference area.  Differentiating through G gives per-edge force
    weights; accumulation order is fixed by element index.
    """
    v0 = pos[tri[:, 0]]
    u1 = pos[tri[:, 1]] - v0
    u2 = pos[tri[:, 2]] - v0
    g11 = (u1 * u1).sum(axis=1)
    g12 = (u1 * u2).sum(axis=1)
    g22 = (u2 * u2).sum(axis=1)
    i1 = b11 * g11 + 2.0 * b12 * g12 + b22 * g22 - 2.0
    det_g = g11 * g22 - g12 * g12
    i2 = det_g * inv_det_g0 - 1.0
    psi1 = ks / 6.0 * (i1 + 1.0)
    psi2 = -ks / 6.0 + ka / 6.0 * i2
    s11 = psi1 * b11 + psi2 * inv_det_g0 * g22
    s12 = psi1 * b12 - psi2 * inv_det_g0 * g12
    s22 = psi1 * b22 + psi2 * inv_det_g0 * g11
    w = 2.0 * area0
    grad1 = (w * s11)[:, None] * u1 + (w * s12)[:, None] * u2
    grad2 = (w * s12)[:, None] * u1 + (w * s22)[:, None] * u2
    forces = np.zeros_like(pos)
    np.add.at(forces, tri[:, 1], -grad1)
    np.add.at(forces, tri[:, 2], -grad2)
    np.add.at(forces, tri[:, 0], grad1 + grad2)
    return forces


def pressure_forces(pos, tri, p):
    """Uniform pressure load: p * area * normal / 3 to each element vertex."""
    v0 = pos[tri[:, 0]]
    u1 = pos[tri[:, 1]] - v0
    u2 = pos[tri[:, 2]] - v0
    cr = np.cross(u1, u2)  # 2 * area * unit normal
    contrib = (p / 6.0) * cr
    forces = np.zeros_like(pos)
    np.add.at(forces, tri[:, 0], contrib)
    np.add.at(forces, tri[:, 1], contrib)
    np.add.at(forces, tri[:, 2], contrib)
    return forces
