"""Nearest-element queries against one mesh configuration.

The query cascade, applied per point:

1. take the element with the nearest centroid; accept it if the point lies
   inside its infinite prism (normal extrusion of the triangle, barycentric
   slack ``tolerance``)
2. otherwise take the nearest edge: a boundary edge answers with its single
   element; an interior edge answers with whichever incident element's
   prism contains the point, when exactly one does
3. with both or neither prism containing, a dividing plane through the edge
   along the mean of the two element normals decides: the side facing the
   first (lower-id) element keeps it, the other side yields the second.
   A fold-back edge (mean normal ~ 0) falls back to the smaller
   point-to-triangle distance.

A uniform grid over element bounding boxes accelerates the argmin scans;
its results are bitwise-identical to the exhaustive scans by construction
(same per-candidate arithmetic, ties to the lowest id) and that equality is
enforced by an oracle test.
"""

from dataclasses import dataclass

import numpy as np

from ._accel import kernels
from ._kernels_numpy import CASE_BOUNDARY, CASE_EDGE_PRISM, CASE_PLANE, CASE_PRISM
from .errors import DegenerateElementError, GeometryError, SearchError
from .mesh import element_centroids, element_normals

CASE_NAMES = {
    CASE_PRISM: "Case1",
    CASE_EDGE_PRISM: "Case2",
    CASE_PLANE: "Case3",
    CASE_BOUNDARY: "BoundaryEdge",
}

# grid sizing: cells ~ this multiple of the median edge, capped in count
_CELL_EDGE_FACTOR = 2.0
_MAX_CELLS = 1 << 21


@dataclass(frozen=True)
class SearchResult:
    """Outcome of one nearest-element query."""

    element: int
    case_used: str


@dataclass(frozen=True)
class DividingPlane:
    """Plane through an interior edge along the mean incident normal.

    ``normal`` is unit length and points toward the side of the first
    (lower-id) incident element's centroid.
    """

    point: np.ndarray
    normal: np.ndarray


class SearchIndex:
    """Packed geometry of one mesh configuration plus the cell grid."""

    def __init__(self, mesh, config):
        pts = mesh.positions(config)
        tri = mesh.triangles
        self.config = config
        self.tri_pts = np.ascontiguousarray(pts[tri])  # (T, 3, 3)
        self.centroids = np.ascontiguousarray(element_centroids(mesh, config))
        self.normals = np.ascontiguousarray(element_normals(mesh, config))
        self.pa = np.ascontiguousarray(pts[mesh.edges[:, 0]])
        self.pb = np.ascontiguousarray(pts[mesh.edges[:, 1]])
        self.edge_tris = np.ascontiguousarray(mesh.edge_tris)
        self.tri_edges = np.ascontiguousarray(mesh.tri_edges)

        lo = self.tri_pts.min(axis=(0, 1))
        hi = self.tri_pts.max(axis=(0, 1))
        span = hi - lo
        d = pts[mesh.edges[:, 0]] - pts[mesh.edges[:, 1]]
        med_edge = float(np.median(np.sqrt((d * d).sum(axis=1))))
        cell = max(_CELL_EDGE_FACTOR * med_edge, 1e-12)
        # widen cells until the grid fits the cap
        while True:
            dims = np.maximum(np.ceil(span / cell).astype(np.int64), 1)
            if int(dims.prod()) <= _MAX_CELLS:
                break
            cell *= 2.0
        self.origin = lo
        self.inv_cell = 1.0 / cell
        self.dims = dims

        tlo = self.tri_pts.min(axis=1)
        thi = self.tri_pts.max(axis=1)
        ilo = np.clip(
            np.floor((tlo - lo) * self.inv_cell).astype(np.int64), 0, dims - 1
        )
        ihi = np.clip(
            np.floor((thi - lo) * self.inv_cell).astype(np.int64), 0, dims - 1
        )
        cells = []
        items = []
        nx, ny = int(dims[0]), int(dims[1])
        for t in range(tri.shape[0]):
            for z in range(ilo[t, 2], ihi[t, 2] + 1):
                zoff = z * ny
                for y in range(ilo[t, 1], ihi[t, 1] + 1):
                    row = (zoff + y) * nx
                    for x in range(ilo[t, 0], ihi[t, 0] + 1):
                        cells.append(row + x)
                        items.append(t)
        cells = np.asarray(cells, dtype=np.int64)
        items = np.asarray(items, dtype=np.int64)
        order = np.lexsort((items, cells))
        cells = cells[order]
        self.cell_items = items[order]
        ncells = int(dims.prod())
        counts = np.bincount(cells, minlength=ncells)
        self.cell_start = np.concatenate(
            [[0], np.cumsum(counts)]
        ).astype(np.int64)


def search_index(mesh, config="current"):
    """Cached :class:`SearchIndex` for one configuration of a mesh."""
    idx = mesh._index_cache.get(config)
    if idx is None:
        idx = SearchIndex(mesh, config)
        mesh._index_cache[config] = idx
    return idx


def find_nearest_elements(mesh, points, tolerance=1e-9, config="current",
                          use_index=True):
    """Batch cascade; returns (element ids (Q,), case codes (Q,) int8)."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 3:
        raise SearchError("query points must be (Q, 3)")
    if not np.all(np.isfinite(points)):
        raise SearchError("query points contain non-finite values")
    idx = search_index(mesh, config)
    if use_index:
        return kernels.search_batch(
            points, float(tolerance), idx.tri_pts, idx.centroids, idx.normals,
            idx.pa, idx.pb, idx.edge_tris, idx.tri_edges, idx.origin,
            idx.inv_cell, idx.dims, idx.cell_start, idx.cell_items,
        )
    return kernels.search_batch_exhaustive(
        points, float(tolerance), idx.tri_pts, idx.centroids, idx.normals,
        idx.pa, idx.pb, idx.edge_tris,
    )


def find_nearest_element(mesh, point, tolerance=1e-9, config="current",
                         use_index=True):
    """Nearest element for one query point; returns :class:`SearchResult`."""
    pts = np.asarray(point, dtype=np.float64).reshape(1, 3)
    elems, cases = find_nearest_elements(
        mesh, pts, tolerance=tolerance, config=config, use_index=use_index
    )
    return SearchResult(element=int(elems[0]), case_used=CASE_NAMES[int(cases[0])])


def nearest_centroid_element(mesh, point, config="current"):
    """Element with the nearest centroid (exhaustive, ties to lowest id)."""
    c = element_centroids(mesh, config)
    q = np.asarray(point, dtype=np.float64)
    dx = c[:, 0] - q[0]
    dy = c[:, 1] - q[1]
    dz = c[:, 2] - q[2]
    return int(np.argmin(dx * dx + dy * dy + dz * dz))


def nearest_edge(mesh, point, config="current"):
    """Edge id minimizing point-segment distance (ties to lowest id)."""
    pts = mesh.positions(config)
    q = np.asarray(point, dtype=np.float64)
    a = pts[mesh.edges[:, 0]]
    d = pts[mesh.edges[:, 1]] - a
    dd = (d * d).sum(axis=1)
    t = np.clip(((q[None, :] - a) * d).sum(axis=1) / dd, 0.0, 1.0)
    diff = q[None, :] - a - t[:, None] * d
    return int(np.argmin((diff * diff).sum(axis=1)))


def point_in_prism(mesh, element, point, tolerance=1e-9, config="current"):
    """True if the point projects into the element with barycentric slack."""
    pts = mesh.positions(config)
    i0, i1, i2 = mesh.triangles[element]
    v0 = pts[i0]
    u1 = pts[i1] - v0
    u2 = pts[i2] - v0
    d = np.asarray(point, dtype=np.float64) - v0
    m11 = float(u1 @ u1)
    m12 = float(u1 @ u2)
    m22 = float(u2 @ u2)
    det = m11 * m22 - m12 * m12
    if det == 0.0:
        raise DegenerateElementError("prism test on degenerate element",
                                     element=int(element))
    r1 = float(u1 @ d)
    r2 = float(u2 @ d)
    b1 = (r1 * m22 - r2 * m12) / det
    b2 = (m11 * r2 - m12 * r1) / det
    b0 = 1.0 - b1 - b2
    return bool(b0 >= -tolerance and b1 >= -tolerance and b2 >= -tolerance)


def dividing_plane(mesh, edge, config="current"):
    """Plane through an interior edge along the mean incident normal.

    Raises
    ------
    GeometryError
        If the edge is a boundary edge.
    DegenerateElementError
        If the mean normal vanishes (fold-back) or the first element's
        centroid lies exactly on the plane; callers fall back to distance.
    """
    t1, t2 = mesh.edge_tris[edge]
    if t2 < 0:
        raise GeometryError(f"edge {edge} is a boundary edge")
    pts = mesh.positions(config)
    a = pts[mesh.edges[edge, 0]]
    b = pts[mesh.edges[edge, 1]]
    normals = element_normals(mesh, config)
    nbar = 0.5 * (normals[t1] + normals[t2])
    m = np.cross(b - a, nbar)
    mlen = float(np.sqrt(m @ m))
    if mlen <= 1e-12:
        raise DegenerateElementError(
            f"fold-back at edge {edge}: mean normal vanishes"
        )
    m = m / mlen
    centroid = element_centroids(mesh, config)[t1]
    s = float(m @ (centroid - a))
    if s == 0.0:
        raise DegenerateElementError(
            f"dividing plane at edge {edge} contains the element centroid"
        )
    if s < 0.0:
        m = -m
    return DividingPlane(point=a.copy(), normal=m)


def brute_force_nearest_elements(mesh, points, config="current"):
    """Exhaustive point-to-triangle argmin: the oracle the cascade is
    checked against.  Returns (ids, squared distances)."""
    idx = search_index(mesh, config)
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    return kernels.nearest_triangles(idx.tri_pts, points)


def closest_points_on_mesh(mesh, points, config="current", use_index=True):
    """Closest surface point per query; returns (ids, points, sq dists)."""
    idx = search_index(mesh, config)
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    if use_index:
        return kernels.project_points(
            idx.tri_pts, points, idx.origin, idx.inv_cell, idx.dims,
            idx.cell_start, idx.cell_items,
        )
    return kernels.project_points_exhaustive(idx.tri_pts, points)
