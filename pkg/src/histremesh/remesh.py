"""Mesh generation at a target resolution, independent of mesh history.

Planar domains are retriangulated from scratch: the boundary polygon is
resampled at the target spacing, the interior is seeded with a hexagonal
lattice, and a Delaunay triangulation is relaxed by a few Laplacian
passes.  Surfaces are remeshed incrementally (split / collapse / flip /
smooth) with every vertex kept on the input surface by projection, the
usual approach when no parametrization is available.

Both paths return a mesh whose stored initial configuration equals the
newly generated node positions; carrying the history of the old mesh onto
the new one is a separate transfer step.
"""

import warnings
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .errors import ConfigurationError, GeometryError
from .mesh import (
    SurfaceMesh,
    boundary_loops,
    build_mesh,
    mesh_quality_summary,
    total_area,
)
from .search import closest_points_on_mesh


@dataclass(frozen=True)
class RemeshConfig:
    """When and how to rebuild the mesh during a simulation."""

    target_edge_length: float
    interval: float | None = None
    quality_threshold: float | None = 0.6
    seed: int = 0

    def __post_init__(self):
        if self.target_edge_length <= 0:
            raise ConfigurationError("target edge length must be positive")
        if self.interval is not None and self.interval <= 0:
            raise ConfigurationError("remesh interval must be positive")


def should_remesh(mesh: SurfaceMesh, config: RemeshConfig, time: float,
                  last_remesh_time: float = 0.0) -> bool:
    """Interval elapsed, or median element quality below the threshold."""
    if config.interval is not None:
        if time - last_remesh_time >= config.interval - 1e-12:
            return True
    if config.quality_threshold is not None:
        summary = mesh_quality_summary(mesh, config="current")
        if summary.median < config.quality_threshold:
            return True
    return False


# ---------------------------------------------------------------------------
# planar: polygon utilities


def _polygon_signed_area(poly):
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * yn - xn * y))


def _points_in_polygon(pts, poly):
    """Crossing-number test, vectorized over query points."""
    x = pts[:, 0][:, None]
    y = pts[:, 1][:, None]
    x1, y1 = poly[:, 0][None, :], poly[:, 1][None, :]
    x2 = np.roll(poly[:, 0], -1)[None, :]
    y2 = np.roll(poly[:, 1], -1)[None, :]
    crosses = (y1 <= y) != (y2 <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (y - y1) / (y2 - y1)
        xc = x1 + t * (x2 - x1)
    hits = crosses & (xc > x)
    return (np.sum(hits, axis=1) % 2) == 1


def _distance_to_polygon(pts, poly):
    """Min distance from each point to the closed boundary polyline."""
    a = poly
    b = np.roll(poly, -1, axis=0)
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    dd = np.where(dd == 0.0, 1.0, dd)
    ap = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("ijk,jk->ij", ap, d) / dd[None, :], 0.0, 1.0)
    diff = ap - t[:, :, None] * d[None, :, :]
    return np.sqrt(np.min(np.einsum("ijk,ijk->ij", diff, diff), axis=1))


def _polygon_self_intersects(poly):
    """Proper crossing between any two non-adjacent boundary segments."""
    n = poly.shape[0]
    a = poly
    b = np.roll(poly, -1, axis=0)

    def cross(o, p, q):
        return ((p[..., 0] - o[..., 0]) * (q[..., 1] - o[..., 1])
                - (p[..., 1] - o[..., 1]) * (q[..., 0] - o[..., 0]))

    ai, bi = a[:, None, :], b[:, None, :]
    aj, bj = a[None, :, :], b[None, :, :]
    d1 = cross(ai, bi, aj)
    d2 = cross(ai, bi, bj)
    d3 = cross(aj, bj, ai)
    d4 = cross(aj, bj, bi)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    idx = np.arange(n)
    adjacent = (np.abs(idx[:, None] - idx[None, :]) <= 1) | (
        np.abs(idx[:, None] - idx[None, :]) == n - 1)
    return bool(np.any(proper & ~adjacent))


def _detect_corners(poly, angle_deg=25.0):
    """Indices where the boundary turns by more than the threshold."""
    prev = poly - np.roll(poly, 1, axis=0)
    nxt = np.roll(poly, -1, axis=0) - poly
    ln_p = np.linalg.norm(prev, axis=1)
    ln_n = np.linalg.norm(nxt, axis=1)
    denom = np.where(ln_p * ln_n == 0.0, 1.0, ln_p * ln_n)
    cosang = np.clip(np.einsum("ij,ij->i", prev, nxt) / denom, -1.0, 1.0)
    turn = np.degrees(np.arccos(cosang))
    return np.nonzero(turn > angle_deg)[0]


def _resample_chain(chain, spacing):
    """Equally spaced points along a polyline, end point excluded.

    Samples are linear interpolants of the input vertices, so they lie
    exactly on the original polyline.
    """
    seg = np.linalg.norm(np.diff(chain, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    length = s[-1]
    n = max(1, int(round(length / spacing)))
    ts = length * np.arange(n) / n
    out = np.empty((n, chain.shape[1]))
    for k in range(chain.shape[1]):
        out[:, k] = np.interp(ts, s, chain[:, k])
    return out


def _resample_polygon(poly, target):
    corners = _detect_corners(poly)
    n = poly.shape[0]
    if corners.size == 0:
        chains = [np.vstack([poly, poly[:1]])]
    else:
        chains = []
        for k in range(corners.size):
            i = int(corners[k])
            j = int(corners[(k + 1) % corners.size])
            idx = np.arange(i, j + 1) if j > i else np.concatenate(
                [np.arange(i, n), np.arange(0, j + 1)])
            chains.append(poly[idx])
    pts = np.vstack([_resample_chain(c, target) for c in chains])
    if pts.shape[0] < 3:
        loop = np.vstack([poly, poly[:1]])
        seg = np.linalg.norm(np.diff(loop, axis=0), axis=1)
        pts = _resample_chain(loop, float(np.sum(seg)) / 3.0 * 0.999)
    return pts


def _hex_lattice(poly, target, clearance, jitter, rng):
    xmin, ymin = poly.min(axis=0)
    xmax, ymax = poly.max(axis=0)
    dy = target * np.sqrt(3.0) / 2.0
    rows = []
    y = ymin + dy
    row = 0
    while y < ymax - 0.25 * dy:
        x0 = xmin + (target / 2.0 if row % 2 else target)
        xs = np.arange(x0, xmax - 0.25 * target, target)
        if xs.size:
            rows.append(np.column_stack([xs, np.full(xs.size, y)]))
        y += dy
        row += 1
    if not rows:
        return np.empty((0, 2))
    pts = np.vstack(rows)
    keep = _points_in_polygon(pts, poly)
    pts = pts[keep]
    if pts.shape[0]:
        pts = pts[_distance_to_polygon(pts, poly) >= clearance]
    if pts.shape[0]:
        pts = pts + rng.uniform(-1.0, 1.0, pts.shape) * (jitter * target)
    return pts


def _delaunay_cull(pts, poly):
    try:
        dt = Delaunay(pts)
    except QhullError as exc:
        raise GeometryError(f"triangulation failed: {exc}") from exc
    tris = dt.simplices.astype(np.int64)
    a, b, c = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
    signed = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - \
        (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    # Qhull covers collinear boundary runs with zero-width slivers; they
    # carry no area and every edge they contribute also bounds a real
    # triangle, so they can be removed outright.
    longest_sq = np.maximum(
        ((b - a) ** 2).sum(axis=1),
        np.maximum(((c - b) ** 2).sum(axis=1), ((a - c) ** 2).sum(axis=1)),
    )
    solid = np.abs(signed) > 1e-10 * longest_sq
    tris, signed = tris[solid], signed[solid]
    a, b, c = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
    cent = (a + b + c) / 3.0
    keep = _points_in_polygon(cent, poly)
    tris, signed = tris[keep], signed[keep]
    # enforce counterclockwise orientation triangle by triangle
    flip = signed < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris


def _neighbor_average(pts, tris):
    edges = np.vstack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    edges = np.unique(np.sort(edges, axis=1), axis=0)
    sums = np.zeros_like(pts)
    counts = np.zeros(pts.shape[0])
    np.add.at(sums, edges[:, 0], pts[edges[:, 1]])
    np.add.at(sums, edges[:, 1], pts[edges[:, 0]])
    np.add.at(counts, edges[:, 0], 1.0)
    np.add.at(counts, edges[:, 1], 1.0)
    counts = np.where(counts == 0.0, 1.0, counts)
    return sums / counts[:, None]


def triangulate_polygon(polygon, target_edge_length, seed=0,
                        smooth_iters=3, jitter=0.01):
    """Triangulate the inside of a simple polygon at a target edge length.

    The boundary is resampled corner to corner at the target spacing (so
    resampled nodes lie on the input polyline), the interior is seeded
    with a hexagonal lattice displaced by ``jitter`` (a fraction of the
    target length), and the Delaunay triangulation is relaxed by moving
    interior nodes to their neighbor average.  Small jitter with a few
    smoothing passes gives near-equilateral meshes; large jitter without
    smoothing gives isotropic but irregular ones.

    Returns (positions (M, 2), triangles (T, 3)), counterclockwise.
    """
    if target_edge_length <= 0:
        raise ConfigurationError("target edge length must be positive")
    poly = np.asarray(polygon, dtype=np.float64)
    if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
        raise GeometryError("polygon must be (P, 2) with P >= 3")
    area = _polygon_signed_area(poly)
    if area == 0.0:
        raise GeometryError("polygon has zero area")
    if area < 0.0:
        poly = poly[::-1].copy()
    if _polygon_self_intersects(poly):
        raise GeometryError("polygon boundary intersects itself")

    diameter = float(np.linalg.norm(poly.max(axis=0) - poly.min(axis=0)))
    if target_edge_length > diameter:
        warnings.warn(
            "target edge length exceeds the domain size; "
            "falling back to a minimal triangulation",
            stacklevel=2,
        )

    rng = np.random.default_rng(seed)
    bnd = _resample_polygon(poly, target_edge_length)
    nb = bnd.shape[0]
    interior = _hex_lattice(poly, target_edge_length,
                            0.6 * target_edge_length, jitter, rng)
    pts = np.vstack([bnd, interior]) if interior.size else bnd.copy()

    if pts.shape[0] < 4:
        pts = np.vstack([pts, np.mean(poly, axis=0)[None, :]])

    for _ in range(smooth_iters):
        tris = _delaunay_cull(pts, poly)
        avg = _neighbor_average(pts, tris)
        pts[nb:] = avg[nb:]
    tris = _delaunay_cull(pts, poly)

    if tris.shape[0] < 2:
        pts = np.vstack([pts, np.mean(poly, axis=0)[None, :]])
        tris = _delaunay_cull(pts, poly)

    used = np.zeros(pts.shape[0], dtype=bool)
    used[tris.ravel()] = True
    if not np.all(used[:nb]):
        raise GeometryError("boundary node lost during triangulation")
    edge_set = set()
    for t in tris:
        for i, j in ((0, 1), (1, 2), (2, 0)):
            a, b = int(t[i]), int(t[j])
            edge_set.add((min(a, b), max(a, b)))
    for i in range(nb):
        j = (i + 1) % nb
        if (min(i, j), max(i, j)) not in edge_set:
            raise GeometryError(
                "resampled boundary is not conforming; "
                "polygon may be non-convex at the target resolution")
    if not np.all(used):
        keep = np.nonzero(used)[0]
        remap = -np.ones(pts.shape[0], dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        pts = pts[keep]
        tris = remap[tris]
    return pts, tris


def remesh_planar(mesh: SurfaceMesh, target_edge_length, seed=0,
                  smooth_iters=3) -> SurfaceMesh:
    """Retriangulate a planar mesh's current region at the target length.

    The new mesh is built purely from the region covered by the old mesh
    (its boundary polygon); interior nodes of the old mesh play no role.
    The result stores the generated positions as both configurations.
    """
    if mesh.mode != "planar":
        raise GeometryError("planar remeshing needs a planar mesh")
    loops = boundary_loops(mesh)
    if len(loops) != 1:
        raise GeometryError(
            f"planar remeshing needs one boundary loop, found {len(loops)}")
    poly = mesh.current[loops[0]][:, :2]
    pts, tris = triangulate_polygon(poly, target_edge_length, seed=seed,
                                    smooth_iters=smooth_iters)
    new_mesh = build_mesh(pts, pts, tris, mode="planar")
    poly_area = abs(_polygon_signed_area(poly))
    if abs(total_area(new_mesh) - poly_area) > 1e-6 * poly_area:
        raise GeometryError("triangulation does not cover the polygon")
    return new_mesh


# ---------------------------------------------------------------------------
# surface: incremental remeshing


class _SurfaceRemesher:
    """Split / collapse / flip / smooth loop over a working triangle soup.

    Vertices are pulled back to the input surface (and boundary vertices
    to their boundary polyline) after each smoothing pass, so the final
    nodes lie on the old piecewise-linear surface.
    """

    def __init__(self, mesh: SurfaceMesh, target: float):
        self.old = mesh
        self.target = float(target)
        self.lo = 0.8 * self.target
        self.hi = 4.0 / 3.0 * self.target
        self.pos = [mesh.current[i].copy() for i in range(mesh.n_nodes)]
        self.tris = [tuple(int(v) for v in t) for t in mesh.triangles]
        self.alive = [True] * len(self.tris)
        self.vtris = defaultdict(set)
        for t, tri in enumerate(self.tris):
            for v in tri:
                self.vtris[v].add(t)
        self.vloop = {}
        loops = boundary_loops(mesh)
        self.loop_pts = []
        for li, loop in enumerate(loops):
            for v in loop:
                self.vloop[int(v)] = li
            self.loop_pts.append(mesh.current[loop])
        self.n_live = len(self.tris)

    # -- basic queries ----------------------------------------------------

    def _edge_map(self):
        em = defaultdict(list)
        for t, tri in enumerate(self.tris):
            if not self.alive[t]:
                continue
            for i in range(3):
                a, b = tri[i], tri[(i + 1) % 3]
                em[(a, b) if a < b else (b, a)].append(t)
        return em

    def _length(self, a, b):
        return float(np.linalg.norm(self.pos[a] - self.pos[b]))

    def _neighbors(self, v):
        out = set()
        for t in self.vtris[v]:
            if self.alive[t]:
                out.update(self.tris[t])
        out.discard(v)
        return out

    def _live_edge_tris(self, a, b):
        return [t for t in self.vtris[a] & self.vtris[b] if self.alive[t]]

    def _tri_normal(self, tri, override=None):
        p = [override.get(v, self.pos[v]) if override else self.pos[v]
             for v in tri]
        return np.cross(p[1] - p[0], p[2] - p[0])

    def _project_boundary(self, point, loop_id):
        return _closest_on_loop(point[None, :], self.loop_pts[loop_id])[0]

    def _add_tri(self, tri):
        t = len(self.tris)
        self.tris.append(tri)
        self.alive.append(True)
        for v in tri:
            self.vtris[v].add(t)
        self.n_live += 1
        return t

    def _kill_tri(self, t):
        self.alive[t] = False
        for v in self.tris[t]:
            self.vtris[v].discard(t)
        self.n_live -= 1

    # -- passes -------------------------------------------------------------

    def _sorted_candidates(self, em, predicate, descending):
        keys = list(em.keys())
        if not keys:
            return []
        earr = np.array(keys, dtype=np.int64)
        pos = np.array(self.pos)
        lens = np.linalg.norm(pos[earr[:, 0]] - pos[earr[:, 1]], axis=1)
        cand = [(ln, e) for ln, e in zip(lens, keys) if predicate(ln)]
        cand.sort(key=lambda it: (-it[0] if descending else it[0], it[1]))
        return [e for _, e in cand]

    def split_pass(self):
        em = self._edge_map()
        cand = self._sorted_candidates(em, lambda ln: ln > self.hi, True)
        for a, b in cand:
            tids = self._live_edge_tris(a, b)
            if not tids:
                continue
            m = len(self.pos)
            pm = 0.5 * (self.pos[a] + self.pos[b])
            la = self.vloop.get(a, -1)
            lb = self.vloop.get(b, -1)
            if len(tids) == 1 and la >= 0 and la == lb:
                pm = self._project_boundary(pm, la)
                self.vloop[m] = la
            self.pos.append(pm)
            for t in sorted(tids):
                tri = self.tris[t]
                k = next(i for i in range(3)
                         if {tri[i], tri[(i + 1) % 3]} == {a, b})
                p, q, r = tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
                self._kill_tri(t)
                self._add_tri((p, m, r))
                self._add_tri((m, q, r))

    def _collapse_legal(self, keep, dead, target_pos, shared):
        nbrs_k = self._neighbors(keep)
        nbrs_d = self._neighbors(dead)
        opposite = set()
        for t in shared:
            opposite.update(self.tris[t])
        opposite -= {keep, dead}
        if nbrs_k & nbrs_d != opposite:
            return False
        override = {keep: target_pos, dead: target_pos}
        for t in sorted((self.vtris[keep] | self.vtris[dead])):
            if not self.alive[t] or t in shared:
                continue
            tri = self.tris[t]
            n_old = self._tri_normal(tri)
            n_new = self._tri_normal(tri, override)
            ln_old = np.linalg.norm(n_old)
            ln_new = np.linalg.norm(n_new)
            if ln_new < 1e-12 * max(ln_old, 1e-300):
                return False
            if ln_old > 0 and float(n_new @ n_old) <= 0.0:
                return False
        for n in (nbrs_k | nbrs_d) - {keep, dead}:
            if float(np.linalg.norm(target_pos - self.pos[n])) > self.hi:
                return False
        return True

    def collapse_pass(self):
        em = self._edge_map()
        cand = self._sorted_candidates(em, lambda ln: ln < self.lo, False)
        dead_set = set()
        for a, b in cand:
            if a in dead_set or b in dead_set:
                continue
            if self.n_live <= 4:
                break
            shared = self._live_edge_tris(a, b)
            if not shared or len(shared) > 2:
                continue
            if self._length(a, b) >= self.lo:
                continue
            la = self.vloop.get(a, -1)
            lb = self.vloop.get(b, -1)
            boundary_edge = len(shared) == 1
            if la >= 0 and lb >= 0:
                if not boundary_edge or la != lb:
                    continue
                keep, dead = a, b
                target_pos = self._project_boundary(
                    0.5 * (self.pos[a] + self.pos[b]), la)
            elif la >= 0:
                keep, dead = a, b
                target_pos = self.pos[a].copy()
            elif lb >= 0:
                keep, dead = b, a
                target_pos = self.pos[b].copy()
            else:
                keep, dead = a, b
                target_pos = 0.5 * (self.pos[a] + self.pos[b])
            if not self._collapse_legal(keep, dead, target_pos, set(shared)):
                continue
            self.pos[keep] = target_pos
            for t in sorted(shared):
                self._kill_tri(t)
            for t in sorted(self.vtris[dead]):
                if not self.alive[t]:
                    continue
                tri = self.tris[t]
                self.tris[t] = tuple(keep if v == dead else v for v in tri)
                self.vtris[keep].add(t)
            del self.vtris[dead]
            if dead in self.vloop:
                lv = self.vloop.pop(dead)
                if keep not in self.vloop:
                    self.vloop[keep] = lv
            dead_set.add(dead)

    def _valence_dev(self, v, delta=0):
        target = 4 if self.vloop.get(v, -1) >= 0 else 6
        return (len(self._neighbors(v)) + delta - target) ** 2

    def flip_pass(self):
        em = self._edge_map()
        for a, b in sorted(em.keys()):
            tids = [t for t in em[(a, b)] if self.alive[t]]
            tids = [t for t in tids if a in self.tris[t] and b in self.tris[t]]
            if len(tids) != 2:
                continue
            t1, t2 = tids
            tri1, tri2 = self.tris[t1], self.tris[t2]
            # orient: tri1 holds the a->b direction, tri2 the reverse
            if (b, a) in ((tri1[0], tri1[1]), (tri1[1], tri1[2]),
                          (tri1[2], tri1[0])):
                t1, t2 = t2, t1
                tri1, tri2 = tri2, tri1
            c = next(v for v in tri1 if v not in (a, b))
            d = next(v for v in tri2 if v not in (a, b))
            key_cd = (c, d) if c < d else (d, c)
            if key_cd in em and any(self.alive[t] and c in self.tris[t]
                                    and d in self.tris[t]
                                    for t in em[key_cd]):
                continue
            before = (self._valence_dev(a) + self._valence_dev(b)
                      + self._valence_dev(c) + self._valence_dev(d))
            after = (self._valence_dev(a, -1) + self._valence_dev(b, -1)
                     + self._valence_dev(c, 1) + self._valence_dev(d, 1))
            if after >= before:
                continue
            n1 = self._tri_normal(tri1)
            n2 = self._tri_normal(tri2)
            ref = n1 + n2
            new1 = (a, d, c)
            new2 = (d, b, c)
            m1 = self._tri_normal(new1)
            m2 = self._tri_normal(new2)
            scale = max(float(np.linalg.norm(ref)), 1e-300)
            if (np.linalg.norm(m1) < 1e-10 * scale
                    or np.linalg.norm(m2) < 1e-10 * scale):
                continue
            if float(m1 @ ref) <= 0.0 or float(m2 @ ref) <= 0.0:
                continue
            self._kill_tri(t1)
            self._kill_tri(t2)
            i1 = self._add_tri(new1)
            i2 = self._add_tri(new2)
            del em[(a, b)]
            em[key_cd] = [i1, i2]
            for key, old_t, new_t in (
                ((a, c) if a < c else (c, a), t1, i1),
                ((b, c) if b < c else (c, b), t1, i2),
                ((a, d) if a < d else (d, a), t2, i1),
                ((b, d) if b < d else (d, b), t2, i2),
            ):
                em[key] = [new_t if x == old_t else x for x in em[key]]

    def smooth_project_pass(self):
        live = [t for t in range(len(self.tris)) if self.alive[t]]
        tris = np.array([self.tris[t] for t in live], dtype=np.int64)
        npos = len(self.pos)
        pos = np.array(self.pos)
        avg = _neighbor_average_3d(pos, tris)
        normals = _vertex_normals(pos, tris, npos)

        boundary_nbrs = defaultdict(list)
        counts = defaultdict(int)
        for t in live:
            tri = self.tris[t]
            for i in range(3):
                a, b = tri[i], tri[(i + 1) % 3]
                counts[(a, b) if a < b else (b, a)] += 1
        for (a, b), cnt in counts.items():
            if cnt == 1:
                boundary_nbrs[a].append(b)
                boundary_nbrs[b].append(a)

        used = np.zeros(npos, dtype=bool)
        used[tris.ravel()] = True
        interior_ids = [v for v in range(npos)
                        if used[v] and self.vloop.get(v, -1) < 0]
        if interior_ids:
            ids = np.array(interior_ids, dtype=np.int64)
            delta = 0.5 * (avg[ids] - pos[ids])
            ncomp = np.einsum("ij,ij->i", delta, normals[ids])
            delta = delta - ncomp[:, None] * normals[ids]
            moved = pos[ids] + delta
            _, projected, _ = closest_points_on_mesh(self.old, moved,
                                                     config="current")
            for k, v in enumerate(interior_ids):
                self.pos[v] = projected[k]

        for v in sorted(boundary_nbrs):
            nb = boundary_nbrs[v]
            if len(nb) != 2 or self.vloop.get(v, -1) < 0:
                continue
            mid = 0.5 * (pos[nb[0]] + pos[nb[1]])
            moved = pos[v] + 0.5 * (mid - pos[v])
            self.pos[v] = self._project_boundary(moved, self.vloop[v])

    def run(self, iterations):
        for _ in range(iterations):
            self.split_pass()
            self.collapse_pass()
            self.flip_pass()
            self.smooth_project_pass()
        live = [self.tris[t] for t in range(len(self.tris)) if self.alive[t]]
        tris = np.array(live, dtype=np.int64)
        vids = np.unique(tris.ravel())
        remap = -np.ones(len(self.pos), dtype=np.int64)
        remap[vids] = np.arange(vids.size)
        positions = np.array([self.pos[v] for v in vids])
        return positions, remap[tris]


def _neighbor_average_3d(pos, tris):
    edges = np.vstack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    edges = np.unique(np.sort(edges, axis=1), axis=0)
    sums = np.zeros_like(pos)
    counts = np.zeros(pos.shape[0])
    np.add.at(sums, edges[:, 0], pos[edges[:, 1]])
    np.add.at(sums, edges[:, 1], pos[edges[:, 0]])
    np.add.at(counts, edges[:, 0], 1.0)
    np.add.at(counts, edges[:, 1], 1.0)
    counts = np.where(counts == 0.0, 1.0, counts)
    return sums / counts[:, None]


def _vertex_normals(pos, tris, n):
    cr = np.cross(pos[tris[:, 1]] - pos[tris[:, 0]],
                  pos[tris[:, 2]] - pos[tris[:, 0]])
    out = np.zeros((n, 3))
    for k in range(3):
        np.add.at(out, tris[:, k], cr)
    ln = np.linalg.norm(out, axis=1)
    ln = np.where(ln == 0.0, 1.0, ln)
    return out / ln[:, None]


def _closest_on_loop(points, loop_pts):
    a = loop_pts
    b = np.roll(loop_pts, -1, axis=0)
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    dd = np.where(dd == 0.0, 1.0, dd)
    ap = points[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("ijk,jk->ij", ap, d) / dd[None, :], 0.0, 1.0)
    cand = a[None, :, :] + t[:, :, None] * d[None, :, :]
    diff = points[:, None, :] - cand
    best = np.argmin(np.einsum("ijk,ijk->ij", diff, diff), axis=1)
    return cand[np.arange(points.shape[0]), best]


def remesh_surface(mesh: SurfaceMesh, target_edge_length, seed=0,
                   iterations=5) -> SurfaceMesh:
    """Remesh a surface to a target edge length by local operations.

    Long edges are split, short ones collapsed, edges flipped toward
    regular vertex valence, and vertices relaxed tangentially; every
    vertex ends on the input surface (boundary vertices on the input
    boundary).  ``seed`` is accepted for interface uniformity; the
    procedure is deterministic.

    The result stores the new positions as both configurations.
    """
    del seed
    if mesh.mode != "surface":
        raise GeometryError("surface remeshing needs a surface mesh")
    if target_edge_length <= 0:
        raise ConfigurationError("target edge length must be positive")
    worker = _SurfaceRemesher(mesh, target_edge_length)
    positions, tris = worker.run(iterations)
    return build_mesh(positions, positions, tris, mode="surface")


def remesh_mesh(mesh: SurfaceMesh, target_edge_length, seed=0) -> SurfaceMesh:
    """Mode dispatch: planar meshes are retriangulated, surfaces remeshed."""
    if mesh.mode == "planar":
        return remesh_planar(mesh, target_edge_length, seed=seed)
    return remesh_surface(mesh, target_edge_length, seed=seed)
