"""Jitted kernel lane.

Function-for-function mirror of ``_kernels_numpy`` (same signatures, same
arithmetic, same tie-breaking); see that module for the conventions.  Query
results (ids, case codes) must match the numpy lane exactly; the kernel
equivalence tests enforce it.
"""

import numpy as np
from numba import njit

CASE_PRISM = 1
CASE_EDGE_PRISM = 2
CASE_PLANE = 3
CASE_BOUNDARY = 4

_FOLD_EPS = 1e-12


@njit(cache=True)
def _closest_point_tri(tri_pts, j, qx, qy, qz):
    """Closest point on triangle j to q; Voronoi region walk."""
    ax = tri_pts[j, 0, 0]
    ay = tri_pts[j, 0, 1]
    az = tri_pts[j, 0, 2]
    bx = tri_pts[j, 1, 0]
    by = tri_pts[j, 1, 1]
    bz = tri_pts[j, 1, 2]
    cx = tri_pts[j, 2, 0]
    cy = tri_pts[j, 2, 1]
    cz = tri_pts[j, 2, 2]

    abx = bx - ax
    aby = by - ay
    abz = bz - az
    acx = cx - ax
    acy = cy - ay
    acz = cz - az

    apx = qx - ax
    apy = qy - ay
    apz = qz - az
    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        return ax, ay, az

    bpx = qx - bx
    bpy = qy - by
    bpz = qz - bz
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        return bx, by, bz

    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return ax + v * abx, ay + v * aby, az + v * abz

    cpx = qx - cx
    cpy = qy - cy
    cpz = qz - cz
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        return cx, cy, cz

    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return ax + w * acx, ay + w * acy, az + w * acz

    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return bx + w * (cx - bx), by + w * (cy - by), bz + w * (cz - bz)

    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return (
        ax + abx * v + acx * w,
        ay + aby * v + acy * w,
        az + abz * v + acz * w,
    )


@njit(cache=True)
def _tri_sqdist_one(tri_pts, j, qx, qy, qz):
    px, py, pz = _closest_point_tri(tri_pts, j, qx, qy, qz)
    dx = qx - px
    dy = qy - py
    dz = qz - pz
    return dx * dx + dy * dy + dz * dz


@njit(cache=True)
def nearest_triangles(tri_pts, queries):
    nq = queries.shape[0]
    nt = tri_pts.shape[0]
    ids = np.empty(nq, dtype=np.int64)
    sqd = np.empty(nq, dtype=np.float64)
    for i in range(nq):
        qx = queries[i, 0]
        qy = queries[i, 1]
        qz = queries[i, 2]
        best = -1
        best_d = np.inf
        for j in range(nt):
            d = _tri_sqdist_one(tri_pts, j, qx, qy, qz)
            if d < best_d:
                best = j
                best_d = d
        ids[i] = best
        sqd[i] = best_d
    return ids, sqd


@njit(cache=True)
def project_points_exhaustive(tri_pts, queries):
    nq = queries.shape[0]
    nt = tri_pts.shape[0]
    ids = np.empty(nq, dtype=np.int64)
    pts = np.empty((nq, 3), dtype=np.float64)
    sqd = np.empty(nq, dtype=np.float64)
    for i in range(nq):
        qx = queries[i, 0]
        qy = queries[i, 1]
        qz = queries[i, 2]
        best = -1
        best_d = np.inf
        for j in range(nt):
            d = _tri_sqdist_one(tri_pts, j, qx, qy, qz)
            if d < best_d:
                best = j
                best_d = d
        px, py, pz = _closest_point_tri(tri_pts, best, qx, qy, qz)
        ids[i] = best
        pts[i, 0] = px
        pts[i, 1] = py
        pts[i, 2] = pz
        sqd[i] = best_d
    return ids, pts, sqd


# ---------------------------------------------------------------------------
# uniform grid walk


@njit(cache=True)
def _cell_of(qx, qy, qz, origin, inv_cell, dims):
    ix = int(np.floor((qx - origin[0]) * inv_cell))
    iy = int(np.floor((qy - origin[1]) * inv_cell))
    iz = int(np.floor((qz - origin[2]) * inv_cell))
    if ix < 0:
        ix = 0
    elif ix > dims[0] - 1:
        ix = int(dims[0] - 1)
    if iy < 0:
        iy = 0
    elif iy > dims[1] - 1:
        iy = int(dims[1] - 1)
    if iz < 0:
        iz = 0
    elif iz > dims[2] - 1:
        iz = int(dims[2] - 1)
    return ix, iy, iz


@njit(cache=True)
def _max_ring(cx, cy, cz, dims):
    m = cx
    if dims[0] - 1 - cx > m:
        m = int(dims[0] - 1 - cx)
    if cy > m:
        m = cy
    if dims[1] - 1 - cy > m:
        m = int(dims[1] - 1 - cy)
    if cz > m:
        m = cz
    if dims[2] - 1 - cz > m:
        m = int(dims[2] - 1 - cz)
    return m


@njit(cache=True)
def _grid_nearest_centroid(qx, qy, qz, centroids, origin, inv_cell, dims,
                           cell_start, cell_items, stamp, tick):
    cs = 1.0 / inv_cell
    cx, cy, cz = _cell_of(qx, qy, qz, origin, inv_cell, dims)
    rmax = _max_ring(cx, cy, cz, dims)
    nx = int(dims[0])
    ny = int(dims[1])
    nz = int(dims[2])
    best = -1
    best_d = np.inf
    for r in range(rmax + 1):
        if best >= 0:
            lb = (r - 1) * cs
            if lb > 0.0 and lb * lb > best_d:
                break
        for dx in range(-r, r + 1):
            x = cx + dx
            if x < 0 or x >= nx:
                continue
            for dy in range(-r, r + 1):
                y = cy + dy
                if y < 0 or y >= ny:
                    continue
                for dz in range(-r, r + 1):
                    if max(abs(dx), abs(dy)) != r and abs(dz) != r:
                        continue
                    z = cz + dz
                    if z < 0 or z >= nz:
                        continue
                    cell = (z * ny + y) * nx + x
                    for s in range(cell_start[cell], cell_start[cell + 1]):
                        t = cell_items[s]
                        if stamp[t] == tick:
                            continue
                        stamp[t] = tick
                        ddx = centroids[t, 0] - qx
                        ddy = centroids[t, 1] - qy
                        ddz = centroids[t, 2] - qz
                        d = ddx * ddx + ddy * ddy + ddz * ddz
                        if d < best_d or (d == best_d and t < best):
                            best = t
                            best_d = d
    return best, best_d


@njit(cache=True)
def _seg_sqdist_one(pa, pb, k, qx, qy, qz):
    ax = pa[k, 0]
    ay = pa[k, 1]
    az = pa[k, 2]
    dx = pb[k, 0] - ax
    dy = pb[k, 1] - ay
    dz = pb[k, 2] - az
    dd = dx * dx + dy * dy + dz * dz
    qax = qx - ax
    qay = qy - ay
    qaz = qz - az
    t = (qax * dx + qay * dy + qaz * dz) / dd
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    cx = qax - t * dx
    cy = qay - t * dy
    cz = qaz - t * dz
    return cx * cx + cy * cy + cz * cz


@njit(cache=True)
def _grid_nearest_edge(qx, qy, qz, tri_edges, pa, pb, origin, inv_cell, dims,
                       cell_start, cell_items, estamp, tick):
    cs = 1.0 / inv_cell
    cx, cy, cz = _cell_of(qx, qy, qz, origin, inv_cell, dims)
    rmax = _max_ring(cx, cy, cz, dims)
    nx = int(dims[0])
    ny = int(dims[1])
    nz = int(dims[2])
    best = -1
    best_d = np.inf
    for r in range(rmax + 1):
        if best >= 0:
            lb = (r - 1) * cs
            if lb > 0.0 and lb * lb > best_d:
                break
        for dx in range(-r, r + 1):
            x = cx + dx
            if x < 0 or x >= nx:
                continue
            for dy in range(-r, r + 1):
                y = cy + dy
                if y < 0 or y >= ny:
                    continue
                for dz in range(-r, r + 1):
                    if max(abs(dx), abs(dy)) != r and abs(dz) != r:
                        continue
                    z = cz + dz
                    if z < 0 or z >= nz:
                        continue
                    cell = (z * ny + y) * nx + x
                    for s in range(cell_start[cell], cell_start[cell + 1]):
                        t = cell_items[s]
                        for a in range(3):
                            k = tri_edges[t, a]
                            if estamp[k] == tick:
                                continue
                            estamp[k] = tick
                            d = _seg_sqdist_one(pa, pb, k, qx, qy, qz)
                            if d < best_d or (d == best_d and k < best):
                                best = k
                                best_d = d
    return best, best_d


@njit(cache=True)
def _grid_nearest_triangle(qx, qy, qz, tri_pts, origin, inv_cell, dims,
                           cell_start, cell_items, stamp, tick):
    cs = 1.0 / inv_cell
    cx, cy, cz = _cell_of(qx, qy, qz, origin, inv_cell, dims)
    rmax = _max_ring(cx, cy, cz, dims)
    nx = int(dims[0])
    ny = int(dims[1])
    nz = int(dims[2])
    best = -1
    best_d = np.inf
    for r in range(rmax + 1):
        if best >= 0:
            lb = (r - 1) * cs
            if lb > 0.0 and lb * lb > best_d:
                break
        for dx in range(-r, r + 1):
            x = cx + dx
            if x < 0 or x >= nx:
                continue
            for dy in range(-r, r + 1):
                y = cy + dy
                if y < 0 or y >= ny:
                    continue
                for dz in range(-r, r + 1):
                    if max(abs(dx), abs(dy)) != r and abs(dz) != r:
                        continue
                    z = cz + dz
                    if z < 0 or z >= nz:
                        continue
                    cell = (z * ny + y) * nx + x
                    for s in range(cell_start[cell], cell_start[cell + 1]):
                        t = cell_items[s]
                        if stamp[t] == tick:
                            continue
                        stamp[t] = tick
                        d = _tri_sqdist_one(tri_pts, t, qx, qy, qz)
                        if d < best_d or (d == best_d and t < best):
                            best = t
                            best_d = d
    return best, best_d


@njit(cache=True)
def project_points(tri_pts, queries, origin, inv_cell, dims, cell_start, cell_items):
    nq = queries.shape[0]
    ids = np.empty(nq, dtype=np.int64)
    pts = np.empty((nq, 3), dtype=np.float64)
    sqd = np.empty(nq, dtype=np.float64)
    stamp = np.full(tri_pts.shape[0], -1, dtype=np.int64)
    for i in range(nq):
        qx = queries[i, 0]
        qy = queries[i, 1]
        qz = queries[i, 2]
        j, d = _grid_nearest_triangle(
            qx, qy, qz, tri_pts, origin, inv_cell, dims, cell_start, cell_items,
            stamp, i,
        )
        px, py, pz = _closest_point_tri(tri_pts, j, qx, qy, qz)
        ids[i] = j
        pts[i, 0] = px
        pts[i, 1] = py
        pts[i, 2] = pz
        sqd[i] = d
    return ids, pts, sqd


# ---------------------------------------------------------------------------
# nearest-element cascade


@njit(cache=True)
def _bary_in_prism(tri_pts, j, qx, qy, qz, tol):
    v0x = tri_pts[j, 0, 0]
    v0y = tri_pts[j, 0, 1]
    v0z = tri_pts[j, 0, 2]
    u1x = tri_pts[j, 1, 0] - v0x
    u1y = tri_pts[j, 1, 1] - v0y
    u1z = tri_pts[j, 1, 2] - v0z
    u2x = tri_pts[j, 2, 0] - v0x
    u2y = tri_pts[j, 2, 1] - v0y
    u2z = tri_pts[j, 2, 2] - v0z
    dx = qx - v0x
    dy = qy - v0y
    dz = qz - v0z
    m11 = u1x * u1x + u1y * u1y + u1z * u1z
    m12 = u1x * u2x + u1y * u2y + u1z * u2z
    m22 = u2x * u2x + u2y * u2y + u2z * u2z
    r1 = u1x * dx + u1y * dy + u1z * dz
    r2 = u2x * dx + u2y * dy + u2z * dz
    det = m11 * m22 - m12 * m12
    b1 = (r1 * m22 - r2 * m12) / det
    b2 = (m11 * r2 - m12 * r1) / det
    b0 = 1.0 - b1 - b2
    return b0 >= -tol and b1 >= -tol and b2 >= -tol


@njit(cache=True)
def _plane_pick(tri_pts, centroids, normals, pa, pb, k, t1, t2, qx, qy, qz):
    ax = pa[k, 0]
    ay = pa[k, 1]
    az = pa[k, 2]
    ex = pb[k, 0] - ax
    ey = pb[k, 1] - ay
    ez = pb[k, 2] - az
    nxm = 0.5 * (normals[t1, 0] + normals[t2, 0])
    nym = 0.5 * (normals[t1, 1] + normals[t2, 1])
    nzm = 0.5 * (normals[t1, 2] + normals[t2, 2])
    mx = ey * nzm - ez * nym
    my = ez * nxm - ex * nzm
    mz = ex * nym - ey * nxm
    mlen = np.sqrt(mx * mx + my * my + mz * mz)
    if mlen > _FOLD_EPS:
        mx /= mlen
        my /= mlen
        mz /= mlen
        s = (
            mx * (centroids[t1, 0] - ax)
            + my * (centroids[t1, 1] - ay)
            + mz * (centroids[t1, 2] - az)
        )
        if s != 0.0:
            if s < 0.0:
                mx = -mx
                my = -my
                mz = -mz
            side = mx * (qx - ax) + my * (qy - ay) + mz * (qz - az)
            if side >= 0.0:
                return t1
            return t2
    d1 = _tri_sqdist_one(tri_pts, t1, qx, qy, qz)
    d2 = _tri_sqdist_one(tri_pts, t2, qx, qy, qz)
    if d1 <= d2:
        return t1
    return t2


@njit(cache=True)
def _finish_cascade(qx, qy, qz, tol, tri_pts, centroids, normals, pa, pb,
                    edge_tris, j, k):
    if _bary_in_prism(tri_pts, j, qx, qy, qz, tol):
        return j, CASE_PRISM
    t1 = edge_tris[k, 0]
    t2 = edge_tris[k, 1]
    if t2 < 0:
        return t1, CASE_BOUNDARY
    in1 = _bary_in_prism(tri_pts, t1, qx, qy, qz, tol)
    in2 = _bary_in_prism(tri_pts, t2, qx, qy, qz, tol)
    if in1 != in2:
        if in1:
            return t1, CASE_EDGE_PRISM
        return t2, CASE_EDGE_PRISM
    e = _plane_pick(tri_pts, centroids, normals, pa, pb, k, t1, t2, qx, qy, qz)
    return e, CASE_PLANE


@njit(cache=True)
def search_batch_exhaustive(queries, tol, tri_pts, centroids, normals, pa, pb,
                            edge_tris):
    nq = queries.shape[0]
    nt = centroids.shape[0]
    ne = pa.shape[0]
    elems = np.empty(nq, dtype=np.int64)
    cases = np.empty(nq, dtype=np.int8)
    for i in range(nq):
        qx = queries[i, 0]
        qy = queries[i, 1]
        qz = queries[i, 2]
        j = -1
        jd = np.inf
        for t in range(nt):
            ddx = centroids[t, 0] - qx
            ddy = centroids[t, 1] - qy
            ddz = centroids[t, 2] - qz
            d = ddx * ddx + ddy * ddy + ddz * ddz
            if d < jd:
                j = t
                jd = d
        if _bary_in_prism(tri_pts, j, qx, qy, qz, tol):
            elems[i] = j
            cases[i] = CASE_PRISM
            continue
        k = -1
        kd = np.inf
        for t in range(ne):
            d = _seg_sqdist_one(pa, pb, t, qx, qy, qz)
            if d < kd:
                k = t
                kd = d
        e, c = _finish_cascade(
            qx, qy, qz, tol, tri_pts, centroids, normals, pa, pb, edge_tris, j, k
        )
        elems[i] = e
        cases[i] = c
    return elems, cases


@njit(cache=True)
def search_batch(queries, tol, tri_pts, centroids, normals, pa, pb, edge_tris,
                 tri_edges, origin, inv_cell, dims, cell_start, cell_items):
    nq = queries.shape[0]
    nt = centroids.shape[0]
    elems = np.empty(nq, dtype=np.int64)
    cases = np.empty(nq, dtype=np.int8)
    tstamp = np.full(nt, -1, dtype=np.int64)
    estamp = np.full(pa.shape[0], -1, dtype=np.int64)
    for i in range(nq):
        qx = queries[i, 0]
        qy = queries[i, 1]
        qz = queries[i, 2]
        j, _ = _grid_nearest_centroid(
            qx, qy, qz, centroids, origin, inv_cell, dims, cell_start, cell_items,
            tstamp, 2 * i,
        )
        if _bary_in_prism(tri_pts, j, qx, qy, qz, tol):
            elems[i] = j
            cases[i] = CASE_PRISM
            continue
        k, _ = _grid_nearest_edge(
            qx, qy, qz, tri_edges, pa, pb, origin, inv_cell, dims, cell_start,
            cell_items, estamp, 2 * i,
        )
        e, c = _finish_cascade(
            qx, qy, qz, tol, tri_pts, centroids, normals, pa, pb, edge_tris, j, k
        )
        elems[i] = e
        cases[i] = c
    return elems, cases


# ---------------------------------------------------------------------------
# membrane force assembly


@njit(cache=True)
def elastic_forces(pos, tri, b11, b12, b22, inv_det_g0, area0, ks, ka):
    """Nodal forces of the strain energy; see the numpy lane for the math."""
    forces = np.zeros_like(pos)
    nt = tri.shape[0]
    for t in range(nt):
        i0 = tri[t, 0]
        i1 = tri[t, 1]
        i2 = tri[t, 2]
        u1x = pos[i1, 0] - pos[i0, 0]
        u1y = pos[i1, 1] - pos[i0, 1]
        u1z = pos[i1, 2] - pos[i0, 2]
        u2x = pos[i2, 0] - pos[i0, 0]
        u2y = pos[i2, 1] - pos[i0, 1]
        u2z = pos[i2, 2] - pos[i0, 2]
        g11 = u1x * u1x + u1y * u1y + u1z * u1z
        g12 = u1x * u2x + u1y * u2y + u1z * u2z
        g22 = u2x * u2x + u2y * u2y + u2z * u2z
        i1v = b11[t] * g11 + 2.0 * b12[t] * g12 + b22[t] * g22 - 2.0
        det_g = g11 * g22 - g12 * g12
        i2v = det_g * inv_det_g0[t] - 1.0
        psi1 = ks / 6.0 * (i1v + 1.0)
        psi2 = -ks / 6.0 + ka / 6.0 * i2v
        s11 = psi1 * b11[t] + psi2 * inv_det_g0[t] * g22
        s12 = psi1 * b12[t] - psi2 * inv_det_g0[t] * g12
        s22 = psi1 * b22[t] + psi2 * inv_det_g0[t] * g11
        w = 2.0 * area0[t]
        g1x = w * (s11 * u1x + s12 * u2x)
        g1y = w * (s11 * u1y + s12 * u2y)
        g1z = w * (s11 * u1z + s12 * u2z)
        g2x = w * (s12 * u1x + s22 * u2x)
        g2y = w * (s12 * u1y + s22 * u2y)
        g2z = w * (s12 * u1z + s22 * u2z)
        forces[i1, 0] -= g1x
        forces[i1, 1] -= g1y
        forces[i1, 2] -= g1z
        forces[i2, 0] -= g2x
        forces[i2, 1] -= g2y
        forces[i2, 2] -= g2z
        forces[i0, 0] += g1x + g2x
        forces[i0, 1] += g1y + g2y
        forces[i0, 2] += g1z + g2z
    return forces


@njit(cache=True)
def pressure_forces(pos, tri, p):
    """Uniform pressure load: p * area * normal / 3 to each element vertex."""
    forces = np.zeros_like(pos)
    nt = tri.shape[0]
    for t in range(nt):
        i0 = tri[t, 0]
        i1 = tri[t, 1]
        i2 = tri[t, 2]
        u1x = pos[i1, 0] - pos[i0, 0]
        u1y = pos[i1, 1] - pos[i0, 1]
        u1z = pos[i1, 2] - pos[i0, 2]
        u2x = pos[i2, 0] - pos[i0, 0]
        u2y = pos[i2, 1] - pos[i0, 1]
        u2z = pos[i2, 2] - pos[i0, 2]
        crx = u1y * u2z - u1z * u2y
        cry = u1z * u2x - u1x * u2z
        crz = u1x * u2y - u1y * u2x
        fx = (p / 6.0) * crx
        fy = (p / 6.0) * cry
        fz = (p / 6.0) * crz
        forces[i0, 0] += fx
        forces[i0, 1] += fy
        forces[i0, 2] += fz
        forces[i1, 0] += fx
        forces[i1, 1] += fy
        forces[i1, 2] += fz
        forces[i2, 0] += fx
        forces[i2, 1] += fy
        forces[i2, 2] += fz
    return forces
