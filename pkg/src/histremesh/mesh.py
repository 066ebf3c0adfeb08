"""Triangle surface meshes carrying two node configurations.

Every mesh stores, for the same connectivity, an *initial* (reference) and a
*current* (deformed) position per node.  Both configurations are validated
at build time; connectivity-derived tables (edges, edge incidence) are
computed once and shared.

Planar meshes are handled as 3D with z identically 0 and element normals
(0, 0, 1); no code path below special-cases two dimensions beyond that.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateElementError, MeshBuildError, NonManifoldError

MODE_PLANAR = "planar"
MODE_SURFACE = "surface"

# area below this fraction of the squared longest edge counts as degenerate
DEGENERATE_AREA_FACTOR = 1e-12


@dataclass(frozen=True)
class ElementBasis:
    """Local frame of one element: first vertex plus two edge vectors.

    ``normal`` is the unit cross product u1 x u2 / |u1 x u2|.  Coefficients
    of a point p in this frame satisfy p = origin + c1 u1 + c2 u2 + c3 n.
    """

    origin: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    normal: np.ndarray


@dataclass(frozen=True)
class QualitySummary:
    """Aspect-ratio statistics over all elements of one configuration."""

    median: float
    iqr: float
    min: float
    max: float
    q1: float
    q3: float
    n_elements: int


class SurfaceMesh:
    """Immutable triangle mesh with initial and current node positions.

    Do not mutate the arrays; they are marked read-only.  Derived tables:

    - ``edges`` (E, 2): node pairs, each sorted, rows in lexicographic order
    - ``edge_tris`` (E, 2): incident element ids ascending, -1 marks a
      boundary edge's missing second element
    - ``tri_edges`` (T, 3): edge ids of each element

    Use :func:`build_mesh` instead of constructing directly.
    """

    def __init__(self, initial, current, triangles, mode, edges, edge_tris,
                 tri_edges):
        self.initial = initial
        self.current = current
        self.triangles = triangles
        self.mode = mode
        self.edges = edges
        self.edge_tris = edge_tris
        self.tri_edges = tri_edges
        self._index_cache = {}

    @property
    def n_nodes(self):
        return self.initial.shape[0]

    @property
    def n_elements(self):
        return self.triangles.shape[0]

    @property
    def n_edges(self):
        return self.edges.shape[0]

    @property
    def boundary_edge_mask(self):
        return self.edge_tris[:, 1] < 0

    @property
    def is_closed(self):
        return not bool(self.boundary_edge_mask.any())

    def positions(self, config):
        """Node positions of one configuration ('initial' or 'current')."""
        if config == "initial":
            return self.initial
        if config == "current":
            return self.current
        raise ValueError(f"unknown configuration {config!r}")

    def with_current(self, current):
        """Copy of this mesh with replaced current positions."""
        current = _as_points(current, "current")
        if current.shape != self.current.shape:
            raise MeshBuildError("replacement positions have wrong shape")
        if self.mode == MODE_PLANAR and np.any(current[:, 2] != 0.0):
            raise MeshBuildError("planar mesh requires z == 0")
        current.setflags(write=False)
        return SurfaceMesh(self.initial, current, self.triangles, self.mode,
                           self.edges, self.edge_tris, self.tri_edges)

    def with_initial(self, initial):
        """Copy of this mesh with replaced initial positions."""
        initial = _as_points(initial, "initial")
        if initial.shape != self.initial.shape:
            raise MeshBuildError("replacement positions have wrong shape")
        if self.mode == MODE_PLANAR and np.any(initial[:, 2] != 0.0):
            raise MeshBuildError("planar mesh requires z == 0")
        initial.setflags(write=False)
        return SurfaceMesh(initial, self.current, self.triangles, self.mode,
                           self.edges, self.edge_tris, self.tri_edges)


def _as_points(arr, name):
    pts = np.ascontiguousarray(arr, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise MeshBuildError(f"{name} positions must be (N, 2) or (N, 3)")
    if pts.shape[1] == 2:
        pts = np.hstack([pts, np.zeros((pts.shape[0], 1))])
    if not np.all(np.isfinite(pts)):
        raise MeshBuildError(f"{name} positions contain non-finite values")
    return pts


def _edge_tables(tri, n_nodes):
    t = tri.shape[0]
    raw = np.stack(
        [tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]], axis=1
    ).reshape(-1, 2)
    undirected = np.sort(raw, axis=1)
    edges, inverse, counts = np.unique(
        undirected, axis=0, return_inverse=True, return_counts=True
    )
    if np.any(counts > 2):
        bad = int(np.nonzero(counts > 2)[0][0])
        raise NonManifoldError(
            f"edge ({edges[bad, 0]}, {edges[bad, 1]}) has {counts[bad]} "
            "incident triangles"
        )
    tri_edges = inverse.reshape(t, 3)

    edge_tris = np.full((edges.shape[0], 2), -1, dtype=np.int64)
    order = np.argsort(inverse, kind="stable")
    owner = order // 3  # triangle of each directed-edge slot, ascending per edge
    slot = np.zeros(edges.shape[0], dtype=np.int64)
    for pos_idx in range(owner.shape[0]):
        e = inverse[order[pos_idx]]
        edge_tris[e, slot[e]] = owner[pos_idx]
        slot[e] += 1

    # winding consistency: a directed edge may appear only once
    directed_keys = raw[:, 0].astype(np.int64) * n_nodes + raw[:, 1]
    uniq, cnt = np.unique(directed_keys, return_counts=True)
    if np.any(cnt > 1):
        key = uniq[np.nonzero(cnt > 1)[0][0]]
        offender = int(np.nonzero(directed_keys == key)[0][1]) // 3
        raise MeshBuildError(
            "inconsistent winding: two triangles traverse an edge in the "
            "same direction",
            triangle=offender,
        )
    return edges, edge_tris, tri_edges


def _cross(u1, u2):
    return np.cross(u1, u2)


def _check_degenerate(pts, tri, label):
    v0 = pts[tri[:, 0]]
    v1 = pts[tri[:, 1]]
    v2 = pts[tri[:, 2]]
    cr = _cross(v1 - v0, v2 - v0)
    area2 = np.sqrt((cr * cr).sum(axis=1))  # 2 * area
    e0 = ((v1 - v0) ** 2).sum(axis=1)
    e1 = ((v2 - v1) ** 2).sum(axis=1)
    e2 = ((v0 - v2) ** 2).sum(axis=1)
    longest_sq = np.maximum(e0, np.maximum(e1, e2))
    bad = 0.5 * area2 < DEGENERATE_AREA_FACTOR * longest_sq
    if np.any(bad):
        idx = int(np.nonzero(bad)[0][0])
        raise MeshBuildError(
            f"degenerate triangle in {label} configuration", triangle=idx
        )


def build_mesh(initial, current, triangles, mode="auto"):
    """Validate and assemble a :class:`SurfaceMesh`.

    Parameters
    ----------
    initial : (N, 2) or (N, 3) array_like
        Reference node positions.  2-column input is padded with z = 0.
    current : array_like
        Deformed node positions, same shape rules.
    triangles : (T, 3) array_like of int
        Vertex indices per element, consistent winding.
    mode : {'auto', 'planar', 'surface'}
        'planar' requires z == 0 in both configurations and counterclockwise
        winding (normals (0, 0, 1)); 'auto' picks planar when z is all zero.

    Raises
    ------
    MeshBuildError
        Bad indices, duplicate or degenerate triangles, inconsistent
        winding, z != 0 in planar mode.
    NonManifoldError
        An edge with more than two incident triangles.
    """
    ini = _as_points(initial, "initial")
    cur = _as_points(current, "current")
    if ini.shape != cur.shape:
        raise MeshBuildError("initial and current positions differ in shape")

    tri = np.ascontiguousarray(triangles, dtype=np.int64)
    if tri.ndim != 2 or tri.shape[1] != 3:
        raise MeshBuildError("triangles must be (T, 3)")
    if tri.shape[0] == 0:
        raise MeshBuildError("mesh has no triangles")
    n = ini.shape[0]
    if tri.min() < 0 or tri.max() >= n:
        bad = int(np.nonzero((tri < 0).any(axis=1) | (tri >= n).any(axis=1))[0][0])
        raise MeshBuildError("triangle index out of range", triangle=bad)
    same = (
        (tri[:, 0] == tri[:, 1]) | (tri[:, 1] == tri[:, 2]) | (tri[:, 0] == tri[:, 2])
    )
    if np.any(same):
        raise MeshBuildError(
            "triangle repeats a vertex", triangle=int(np.nonzero(same)[0][0])
        )
    key = np.sort(tri, axis=1)
    _, first, cnt = np.unique(key, axis=0, return_index=True, return_counts=True)
    if np.any(cnt > 1):
        dup_key = key[np.sort(first[cnt > 1])[0]]
        hits = np.nonzero((key == dup_key).all(axis=1))[0]
        raise MeshBuildError("duplicate triangle", triangle=int(hits[1]))

    if mode == "auto":
        planar = bool(np.all(ini[:, 2] == 0.0) and np.all(cur[:, 2] == 0.0))
        mode = MODE_PLANAR if planar else MODE_SURFACE
    if mode not in (MODE_PLANAR, MODE_SURFACE):
        raise MeshBuildError(f"unknown mode {mode!r}")

    if mode == MODE_PLANAR:
        if np.any(ini[:, 2] != 0.0) or np.any(cur[:, 2] != 0.0):
            raise MeshBuildError("planar mesh requires z == 0 in both configurations")
        for pts, label in ((ini, "initial"), (cur, "current")):
            v0 = pts[tri[:, 0], :2]
            d1 = pts[tri[:, 1], :2] - v0
            d2 = pts[tri[:, 2], :2] - v0
            z = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
            if np.any(z <= 0.0):
                raise MeshBuildError(
                    f"planar mesh requires counterclockwise winding in the "
                    f"{label} configuration",
                    triangle=int(np.nonzero(z <= 0.0)[0][0]),
                )

    _check_degenerate(ini, tri, "initial")
    _check_degenerate(cur, tri, "current")

    edges, edge_tris, tri_edges = _edge_tables(tri, n)

    for arr in (ini, cur, tri, edges, edge_tris, tri_edges):
        arr.setflags(write=False)
    return SurfaceMesh(ini, cur, tri, mode, edges, edge_tris, tri_edges)


def element_basis(mesh, element, config="current"):
    """Local frame of one element in the requested configuration.

    Raises
    ------
    DegenerateElementError
        If the element's vertices are (numerically) collinear there.
    """
    pts = mesh.positions(config)
    i0, i1, i2 = mesh.triangles[element]
    origin = pts[i0].copy()
    u1 = pts[i1] - pts[i0]
    u2 = pts[i2] - pts[i0]
    cr = np.cross(u1, u2)
    nrm = float(np.sqrt(cr @ cr))
    longest_sq = max(float(u1 @ u1), float(u2 @ u2), float((u2 - u1) @ (u2 - u1)))
    if 0.5 * nrm < DEGENERATE_AREA_FACTOR * longest_sq:
        raise DegenerateElementError(
            f"collinear vertices in {config} configuration", element=int(element)
        )
    return ElementBasis(origin=origin, u1=u1, u2=u2, normal=cr / nrm)


def element_centroid(mesh, element, config="current"):
    """Arithmetic mean of the element's three vertices."""
    pts = mesh.positions(config)
    i0, i1, i2 = mesh.triangles[element]
    return (pts[i0] + pts[i1] + pts[i2]) / 3.0


def element_centroids(mesh, config="current"):
    pts = mesh.positions(config)
    tri = mesh.triangles
    return (pts[tri[:, 0]] + pts[tri[:, 1]] + pts[tri[:, 2]]) / 3.0


def element_areas(mesh, config="current"):
    pts = mesh.positions(config)
    tri = mesh.triangles
    v0 = pts[tri[:, 0]]
    cr = np.cross(pts[tri[:, 1]] - v0, pts[tri[:, 2]] - v0)
    return 0.5 * np.sqrt((cr * cr).sum(axis=1))


def element_normals(mesh, config="current"):
    """Unit normals; requires no degenerate elements (enforced at build)."""
    pts = mesh.positions(config)
    tri = mesh.triangles
    v0 = pts[tri[:, 0]]
    cr = np.cross(pts[tri[:, 1]] - v0, pts[tri[:, 2]] - v0)
    nrm = np.sqrt((cr * cr).sum(axis=1))
    return cr / nrm[:, None]


def total_area(mesh, config="current"):
    return float(element_areas(mesh, config).sum())


def aspect_ratios(mesh, config="current"):
    """Twice inradius over circumradius for every element.

    Equals 1 for equilateral triangles and approaches 0 with degeneracy;
    exact zero area maps to 0 by convention rather than raising.
    """
    pts = mesh.positions(config)
    tri = mesh.triangles
    v0 = pts[tri[:, 0]]
    v1 = pts[tri[:, 1]]
    v2 = pts[tri[:, 2]]
    a = np.sqrt(((v2 - v1) ** 2).sum(axis=1))
    b = np.sqrt(((v0 - v2) ** 2).sum(axis=1))
    c = np.sqrt(((v1 - v0) ** 2).sum(axis=1))
    cr = np.cross(v1 - v0, v2 - v0)
    area = 0.5 * np.sqrt((cr * cr).sum(axis=1))
    s = 0.5 * (a + b + c)
    out = np.zeros(tri.shape[0], dtype=np.float64)
    ok = area > 0.0
    r_in = np.where(ok, area / s, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r_out = np.where(ok, a * b * c / (4.0 * area), np.inf)
    out[ok] = 2.0 * r_in[ok] / r_out[ok]
    return out


def aspect_ratio(mesh, element, config="current"):
    """Aspect ratio of a single element; see :func:`aspect_ratios`."""
    return float(aspect_ratios(mesh, config)[element])


def quantiles_sorted(values):
    """(q1, median, q3) with linear interpolation between order statistics.

    Kept separate so tests can check it against an independent oracle;
    the even-count median is the mean of the two central values.
    """
    v = np.sort(np.asarray(values, dtype=np.float64))
    q1, med, q3 = np.percentile(v, [25.0, 50.0, 75.0])
    return float(q1), float(med), float(q3)


def mesh_quality_summary(mesh, config="current"):
    """Median/IQR/min/max aspect ratio over all elements."""
    ar = aspect_ratios(mesh, config)
    q1, med, q3 = quantiles_sorted(ar)
    return QualitySummary(
        median=med,
        iqr=q3 - q1,
        min=float(ar.min()),
        max=float(ar.max()),
        q1=q1,
        q3=q3,
        n_elements=int(ar.shape[0]),
    )


def edge_lengths(mesh, config="current"):
    pts = mesh.positions(config)
    d = pts[mesh.edges[:, 0]] - pts[mesh.edges[:, 1]]
    return np.sqrt((d * d).sum(axis=1))


def median_edge_length(mesh, config="current"):
    return float(np.median(edge_lengths(mesh, config)))


def boundary_loops(mesh):
    """Ordered node loops of the boundary, one list per loop.

    Loops follow the winding induced by the incident triangles (each
    boundary edge is traversed the way its single triangle traverses it).
    """
    bmask = mesh.boundary_edge_mask
    if not bmask.any():
        return []
    nxt = {}
    for e in np.nonzero(bmask)[0]:
        a, b = mesh.edges[e]
        t = mesh.edge_tris[e, 0]
        tri = mesh.triangles[t]
        # directed orientation within the owning triangle
        for k in range(3):
            if tri[k] == a and tri[(k + 1) % 3] == b:
                nxt[int(a)] = int(b)
                break
            if tri[k] == b and tri[(k + 1) % 3] == a:
                nxt[int(b)] = int(a)
                break
    loops = []
    seen = set()
    for start in sorted(nxt):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        node = nxt[start]
        while node != start:
            loop.append(node)
            seen.add(node)
            node = nxt[node]
        loops.append(loop)
    return loops
