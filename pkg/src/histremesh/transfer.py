"""Carrying a reference configuration from an old mesh to a new one.

Each query point is expressed in the frame of its nearest old element in
the *current* (deformed) configuration: p = o + c1 u1 + c2 u2 + c3 n with o
the element's first vertex, u1/u2 its edge vectors and n its unit normal.
Swapping in the same element's *initial* frame with unchanged coefficients
yields the point's reference position.  The map is exact for points that
lie on the old surface and linear-precision off it.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateElementError, TransferError
from .mesh import ElementBasis, element_basis
from .search import CASE_NAMES, find_nearest_element, find_nearest_elements, search_index

__all__ = [
    "BasisCoefficients",
    "MapResult",
    "TransferReport",
    "basis_coefficients",
    "apply_basis",
    "map_to_initial",
    "transfer_initial_configuration",
]


@dataclass(frozen=True)
class BasisCoefficients:
    """Coefficients (c1, c2, c3) of a point in an element frame."""

    c1: float
    c2: float
    c3: float

    def as_array(self):
        return np.array([self.c1, self.c2, self.c3])


@dataclass(frozen=True)
class MapResult:
    """One mapped point with its provenance."""

    point: np.ndarray
    element: int
    case_used: str
    coefficients: BasisCoefficients


class TransferReport:
    """Per-node record of a whole-mesh transfer.

    Arrays are aligned with the new mesh's node ids: source element, search
    case code name, and the normal offset c3 (distance off the old surface,
    signed along the old element normal).
    """

    def __init__(self, elements, case_names, c3):
        self.elements = elements
        self.case_names = case_names
        self.c3 = c3

    @property
    def n_nodes(self):
        return self.elements.shape[0]

    def case_counts(self):
        counts = {name: 0 for name in CASE_NAMES.values()}
        for name in self.case_names:
            counts[name] += 1
        return counts

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["node", "element", "case", "c3"])
            for i in range(self.n_nodes):
                w.writerow(
                    [i, int(self.elements[i]), self.case_names[i],
                     f"{self.c3[i]:.17g}"]
                )


def basis_coefficients(basis: ElementBasis, point):
    """Solve p = origin + c1 u1 + c2 u2 + c3 n for (c1, c2, c3)."""
    mat = np.column_stack([basis.u1, basis.u2, basis.normal])
    try:
        c = np.linalg.solve(mat, np.asarray(point, dtype=np.float64) - basis.origin)
    except np.linalg.LinAlgError:
        raise DegenerateElementError("singular element frame") from None
    return BasisCoefficients(c1=float(c[0]), c2=float(c[1]), c3=float(c[2]))


def apply_basis(basis: ElementBasis, coefficients: BasisCoefficients):
    """Evaluate origin + c1 u1 + c2 u2 + c3 n."""
    return (
        basis.origin
        + coefficients.c1 * basis.u1
        + coefficients.c2 * basis.u2
        + coefficients.c3 * basis.normal
    )


def map_to_initial(mesh, point, tolerance=1e-9):
    """Map one current-configuration point to the initial configuration.

    Returns a :class:`MapResult`; the coefficients are from the current
    frame of the chosen element.
    """
    res = find_nearest_element(mesh, point, tolerance=tolerance, config="current")
    cur = element_basis(mesh, res.element, "current")
    coeffs = basis_coefficients(cur, point)
    ini = element_basis(mesh, res.element, "initial")
    mapped = apply_basis(ini, coeffs)
    if not np.all(np.isfinite(mapped)):
        raise TransferError("mapped point is non-finite")
    return MapResult(
        point=mapped, element=res.element, case_used=res.case_used,
        coefficients=coeffs,
    )


def _batch_map(old_mesh, points, elems):
    """Vectorized frame swap for known source elements."""
    tri = old_mesh.triangles[elems]
    cur = old_mesh.current
    ini = old_mesh.initial
    o = cur[tri[:, 0]]
    u1 = cur[tri[:, 1]] - o
    u2 = cur[tri[:, 2]] - o
    n = search_index(old_mesh, "current").normals[elems]
    d = points - o
    m11 = (u1 * u1).sum(axis=1)
    m12 = (u1 * u2).sum(axis=1)
    m22 = (u2 * u2).sum(axis=1)
    r1 = (u1 * d).sum(axis=1)
    r2 = (u2 * d).sum(axis=1)
    det = m11 * m22 - m12 * m12
    c1 = (r1 * m22 - r2 * m12) / det
    c2 = (m11 * r2 - m12 * r1) / det
    c3 = (n * d).sum(axis=1)
    o0 = ini[tri[:, 0]]
    u01 = ini[tri[:, 1]] - o0
    u02 = ini[tri[:, 2]] - o0
    cr = np.cross(u01, u02)
    n0 = cr / np.sqrt((cr * cr).sum(axis=1))[:, None]
    mapped = o0 + c1[:, None] * u01 + c2[:, None] * u02 + c3[:, None] * n0
    return mapped, c3


def transfer_initial_configuration(old_mesh, new_mesh, tolerance=1e-9):
    """Fill the new mesh's initial positions from the old mesh's history.

    Every current-configuration node of ``new_mesh`` is located in
    ``old_mesh`` and pulled back through its source element.  Returns
    ``(mesh, report)`` where ``mesh`` is ``new_mesh`` with replaced initial
    positions.

    Raises
    ------
    TransferError
        If any node maps to a non-finite point.
    """
    points = np.ascontiguousarray(new_mesh.current, dtype=np.float64)
    elems, cases = find_nearest_elements(
        old_mesh, points, tolerance=tolerance, config="current"
    )
    mapped, c3 = _batch_map(old_mesh, points, elems)
    bad = ~np.isfinite(mapped).all(axis=1)
    if np.any(bad):
        raise TransferError(
            "mapped point is non-finite", node=int(np.nonzero(bad)[0][0])
        )
    if new_mesh.mode == "planar":
        # planar normals are (0, 0, 1) in both frames, so the mapped z is
        # exactly the query's z offset; pin it to the plane
        mapped[:, 2] = 0.0
    result = new_mesh.with_initial(mapped)
    case_names = [CASE_NAMES[int(c)] for c in cases]
    report = TransferReport(elements=elems, case_names=case_names, c3=c3)
    return result, report
