"""OFF and OBJ round trips plus the paired-configuration loader."""

import numpy as np
import pytest

from histremesh import (
    FileFormatError,
    build_mesh,
    load_mesh_pair,
    read_obj,
    read_off,
    save_mesh_pair,
    square_mesh,
    write_obj,
    write_off,
)
from histremesh.fileio import read_positions


@pytest.fixture
def sample():
    mesh = square_mesh(size=1.0, target_edge_length=0.4, seed=1)
    return mesh.initial, mesh.triangles


def test_off_round_trip_is_bitwise(tmp_path, sample):
    positions, triangles = sample
    path = tmp_path / "mesh.off"
    write_off(path, positions, triangles)
    pts, tris = read_off(path)
    np.testing.assert_array_equal(pts, positions)
    np.testing.assert_array_equal(tris, triangles)


def test_obj_round_trip_is_bitwise(tmp_path, sample):
    positions, triangles = sample
    path = tmp_path / "mesh.obj"
    write_obj(path, positions, triangles)
    pts, tris = read_obj(path)
    np.testing.assert_array_equal(pts, positions)
    np.testing.assert_array_equal(tris, triangles)


def test_off_accepts_comments_and_blank_lines(tmp_path):
    path = tmp_path / "commented.off"
    path.write_text(
        "OFF\n"
        "# three vertices, one face\n"
        "3 1 0\n"
        "\n"
        "0 0 0  # origin\n"
        "1 0 0\n"
        "0 1 0\n"
        "3 0 1 2\n"
    )
    pts, tris = read_off(path)
    assert pts.shape == (3, 3)
    np.testing.assert_array_equal(tris, [[0, 1, 2]])


def test_obj_face_indices_are_one_based(tmp_path):
    path = tmp_path / "one.obj"
    path.write_text(
        "v 0 0 0\n"
        "v 1 0 0\n"
        "v 0 1 0\n"
        "f 1 2 3\n"
    )
    _, tris = read_obj(path)
    np.testing.assert_array_equal(tris, [[0, 1, 2]])


def test_obj_face_with_texture_normal_slots(tmp_path):
    path = tmp_path / "slots.obj"
    path.write_text(
        "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
        "vn 0 0 1\n"
        "f 1//1 2//1 3//1\n"
    )
    _, tris = read_obj(path)
    np.testing.assert_array_equal(tris, [[0, 1, 2]])


@pytest.mark.parametrize("text,message", [
    ("", "empty file"),
    ("COFF\n3 1 0\n", "missing OFF header"),
    ("OFF\nthree 1 0\n", "malformed count line"),
    ("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n4 0 1 2 3\n", "not a triangle"),
    ("OFF\n3 1 0\n0 0 0\n1 0 0\n", "truncated file"),
    ("OFF\n3 1 0\n0 0 zero\n1 0 0\n0 1 0\n3 0 1 2\n", "malformed record"),
])
def test_off_malformed_inputs(tmp_path, text, message):
    path = tmp_path / "bad.off"
    path.write_text(text)
    with pytest.raises(FileFormatError, match=message):
        read_off(path)


@pytest.mark.parametrize("text,message", [
    ("v 0 0\nf 1 2 3\n", "malformed vertex"),
    ("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 2 3 4\n", "only triangle faces"),
    ("v 0 0 0\nf 1 2\n", "only triangle faces"),
    ("# nothing here\n", "no usable geometry"),
])
def test_obj_malformed_inputs(tmp_path, text, message):
    path = tmp_path / "bad.obj"
    path.write_text(text)
    with pytest.raises(FileFormatError, match=message):
        read_obj(path)


def test_read_positions_dispatches_on_extension(tmp_path, sample):
    positions, triangles = sample
    off = tmp_path / "a.off"
    obj = tmp_path / "a.obj"
    write_off(off, positions, triangles)
    write_obj(obj, positions, triangles)
    for path in (off, obj):
        pts, tris = read_positions(path)
        np.testing.assert_array_equal(pts, positions)
        np.testing.assert_array_equal(tris, triangles)
    stl = tmp_path / "a.stl"
    stl.write_text("solid nope\n")
    with pytest.raises(FileFormatError, match="unknown mesh extension"):
        read_positions(stl)


def test_mesh_pair_round_trip(tmp_path):
    base = square_mesh(size=1.0, target_edge_length=0.4, seed=2)
    stretched = base.current.copy()
    stretched[:, :2] *= 1.5
    mesh = base.with_current(stretched)
    ini = tmp_path / "ref.off"
    cur = tmp_path / "def.off"
    save_mesh_pair(mesh, ini, cur)
    loaded = load_mesh_pair(ini, cur)
    np.testing.assert_array_equal(loaded.initial, mesh.initial)
    np.testing.assert_array_equal(loaded.current, mesh.current)
    np.testing.assert_array_equal(loaded.triangles, mesh.triangles)
    assert loaded.mode == mesh.mode


def test_mesh_pair_connectivity_must_match(tmp_path):
    mesh = square_mesh(size=1.0, target_edge_length=0.4, seed=2)
    other = np.asarray(mesh.triangles).copy()
    other[[0, 1]] = other[[1, 0]]
    ini = tmp_path / "ref.off"
    cur = tmp_path / "def.off"
    write_off(ini, mesh.initial, mesh.triangles)
    write_off(cur, mesh.current, other)
    with pytest.raises(FileFormatError, match="connectivity"):
        load_mesh_pair(ini, cur)


def test_mesh_pair_surface_mode(tmp_path):
    pts = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 1.0, 0.25],
    ])
    mesh = build_mesh(pts, pts + [0.0, 0.0, 0.5], [[0, 1, 2]])
    ini = tmp_path / "ref.obj"
    cur = tmp_path / "def.obj"
    save_mesh_pair(mesh, ini, cur)
    loaded = load_mesh_pair(ini, cur)
    assert loaded.mode == "surface"
    np.testing.assert_array_equal(loaded.current, mesh.current)
