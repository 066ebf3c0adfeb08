"""Mesh file I/O.

Two formats are supported:

- OFF: ``OFF`` header, ``nv nf ne`` counts, vertex lines, ``3 i j k`` faces
- OBJ: ``v x y z`` and ``f i j k`` records, 1-based indices, triangles only

A mesh with history is stored as a *pair* of OFF files, one per
configuration, with byte-identical connectivity; the pair loader verifies
that and refuses mismatches.
"""

import numpy as np

from .errors import FileFormatError
from .mesh import build_mesh


def _tokens(path):
    """Whitespace tokens of every non-comment line."""
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                yield line.split()


def read_off(path):
    """Read one OFF file; returns (positions (N, 3), triangles (T, 3))."""
    it = _tokens(path)
    try:
        head = next(it)
    except StopIteration:
        raise FileFormatError(f"{path}: empty file") from None
    if head != ["OFF"]:
        raise FileFormatError(f"{path}: missing OFF header")
    try:
        counts = next(it)
        nv, nf = int(counts[0]), int(counts[1])
    except (StopIteration, IndexError, ValueError):
        raise FileFormatError(f"{path}: malformed count line") from None
    pos = np.empty((nv, 3), dtype=np.float64)
    try:
        for i in range(nv):
            row = next(it)
            pos[i, 0] = float(row[0])
            pos[i, 1] = float(row[1])
            pos[i, 2] = float(row[2])
        tri = np.empty((nf, 3), dtype=np.int64)
        for i in range(nf):
            row = next(it)
            if row[0] != "3" or len(row) < 4:
                raise FileFormatError(f"{path}: face {i} is not a triangle")
            tri[i, 0] = int(row[1])
            tri[i, 1] = int(row[2])
            tri[i, 2] = int(row[3])
    except StopIteration:
        raise FileFormatError(f"{path}: truncated file") from None
    except (IndexError, ValueError):
        raise FileFormatError(f"{path}: malformed record") from None
    return pos, tri


def write_off(path, positions, triangles):
    positions = np.asarray(positions, dtype=np.float64)
    triangles = np.asarray(triangles, dtype=np.int64)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("OFF\n")
        fh.write(f"{positions.shape[0]} {triangles.shape[0]} 0\n")
        for p in positions:
            fh.write(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        for t in triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def read_obj(path):
    """Read an OBJ file; returns (positions (N, 3), triangles (T, 3))."""
    pos = []
    tri = []
    for row in _tokens(path):
        if row[0] == "v":
            try:
                pos.append((float(row[1]), float(row[2]), float(row[3])))
            except (IndexError, ValueError):
                raise FileFormatError(f"{path}: malformed vertex line") from None
        elif row[0] == "f":
            if len(row) != 4:
                raise FileFormatError(f"{path}: only triangle faces are supported")
            try:
                # 1-based; texture/normal suffixes like 3/1/2 are not supported
                idx = [int(tok.split("/")[0]) - 1 for tok in row[1:]]
            except ValueError:
                raise FileFormatError(f"{path}: malformed face line") from None
            tri.append(tuple(idx))
    if not pos or not tri:
        raise FileFormatError(f"{path}: no usable geometry")
    return (
        np.asarray(pos, dtype=np.float64),
        np.asarray(tri, dtype=np.int64),
    )


def write_obj(path, positions, triangles):
    positions = np.asarray(positions, dtype=np.float64)
    triangles = np.asarray(triangles, dtype=np.int64)
    with open(path, "w", encoding="utf-8") as fh:
        for p in positions:
            fh.write(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        for t in triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def read_positions(path):
    """Read either format by extension; returns (positions, triangles)."""
    lower = str(path).lower()
    if lower.endswith(".off"):
        return read_off(path)
    if lower.endswith(".obj"):
        return read_obj(path)
    raise FileFormatError(f"{path}: unknown mesh extension")


def load_mesh_pair(initial_path, current_path, mode="auto"):
    """Build a mesh from an (initial, current) OFF/OBJ file pair.

    The two files must carry identical connectivity; any difference in
    triangle count, ordering, or indices is an error, not a repair case.
    """
    ini_pos, ini_tri = read_positions(initial_path)
    cur_pos, cur_tri = read_positions(current_path)
    if ini_tri.shape != cur_tri.shape or not np.array_equal(ini_tri, cur_tri):
        raise FileFormatError(
            f"{initial_path} and {current_path} disagree on connectivity"
        )
    return build_mesh(ini_pos, cur_pos, ini_tri, mode=mode)


def _write_positions(path, positions, triangles):
    lower = str(path).lower()
    if lower.endswith(".off"):
        write_off(path, positions, triangles)
    elif lower.endswith(".obj"):
        write_obj(path, positions, triangles)
    else:
        raise FileFormatError(f"{path}: unknown mesh extension")


def save_mesh_pair(mesh, initial_path, current_path):
    _write_positions(initial_path, mesh.initial, mesh.triangles)
    _write_positions(current_path, mesh.current, mesh.triangles)
