"""Experiment drivers, error metrics, and the CSV/config plumbing."""

import numpy as np
import pytest

from histremesh import (
    ConfigurationError,
    IdentityDeformation,
    QuadraticStretch,
    SkalakParams,
    build_mesh,
    exact_invariants,
    run_cylinder_spatial_experiment,
    run_frequency_experiment,
    run_pressure_simulation,
    run_square_spatial_experiment,
    run_strain_experiment,
    skalak_energy_density,
    spatial_error,
    square_mesh,
    strain_error,
    torus_mesh,
    write_results,
)
from histremesh.harness import (
    RESULT_HEADER,
    SERIES_HEADER,
    SeriesSample,
    _result_row,
    _slim_torus_reference,
    load_config,
    write_series,
)

PARAMS = SkalakParams()


def test_spatial_error_zero_when_exact():
    f = QuadraticStretch()
    mesh = square_mesh(size=2.0, target_edge_length=0.4, seed=0)
    mesh = mesh.with_current(f.evaluate(mesh.initial))
    assert spatial_error(mesh, f).max() == 0.0


def test_spatial_error_is_squared_distance():
    f = QuadraticStretch()
    mesh = square_mesh(size=2.0, target_edge_length=0.4, seed=0)
    moved = f.evaluate(mesh.initial)
    moved[3] += [0.02, -0.01, 0.0]
    mesh = mesh.with_current(moved)
    err = spatial_error(mesh, f)
    assert err[3] == pytest.approx(0.02 ** 2 + 0.01 ** 2, rel=1e-12)
    mask = np.ones(mesh.n_nodes, dtype=bool)
    mask[3] = False
    assert err[mask].max() == 0.0


def test_strain_error_identity_baseline():
    mesh = square_mesh(size=2.0, target_edge_length=0.4, seed=0)
    values, excluded = strain_error(mesh, IdentityDeformation(), PARAMS)
    assert excluded == 0
    assert values.size == mesh.n_elements
    assert values.max() < 1e-15


def test_strain_error_excludes_singular_centroids():
    # first element straddles x = 0, where the quadratic map degenerates
    pts = np.array([
        [-1.0, 0.0], [1.0, 0.0], [0.0, 0.3],
        [2.0, 0.0], [3.0, 0.0], [2.0, 0.5],
    ])
    mesh = build_mesh(pts, pts, [[0, 1, 2], [3, 4, 5]])
    f = QuadraticStretch()
    values, excluded = strain_error(mesh, f, PARAMS)
    assert excluded == 1
    assert values.size == 1
    centroid = pts[3:6].mean(axis=0)
    expected = skalak_energy_density(
        *exact_invariants(f, [centroid[0], centroid[1], 0.0]), PARAMS
    )
    assert values[0] == pytest.approx(expected, rel=1e-12)


def test_result_row_order_statistics():
    row = _result_row(0.25, [5.0, 1.0, 3.0, 2.0, 4.0], achieved=0.24, seed=7)
    assert row.level == 0.25
    assert row.median == 3.0
    assert row.q1 == 2.0
    assert row.q3 == 4.0
    assert row.min == 1.0
    assert row.max == 5.0
    assert row.n_samples == 5
    assert row.achieved_edge_length == 0.24
    assert row.seed == 7


def test_write_results_round_trip(tmp_path):
    rows = [
        _result_row(0.5, [0.125, 2.0, 1.0], achieved=0.48, seed=0),
        _result_row(0.25, [1e-17, 3e-17], achieved=0.26, seed=0),
    ]
    path = tmp_path / "rows.csv"
    write_results(rows, path)
    text = path.read_text()
    lines = text.strip().splitlines()
    assert lines[0] == RESULT_HEADER
    assert len(lines) == 3
    parsed = [float(x) for x in lines[1].split(",")]
    assert parsed == [0.5, 1.0, 0.5625, 1.5, 0.125, 2.0, 3, 0.48, 0]
    # rewriting produces byte-identical output
    again = tmp_path / "rows2.csv"
    write_results(rows, again)
    assert again.read_text() == text


def test_write_series(tmp_path):
    samples = [
        SeriesSample(time=0.0, total_area=4.0, median_ar=0.95, q1=0.9, q3=0.99),
        SeriesSample(time=0.5, total_area=4.1, median_ar=0.94, q1=0.9, q3=0.98),
    ]
    path = tmp_path / "series.csv"
    write_series(samples, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == SERIES_HEADER
    assert len(lines) == 3
    parsed = [float(x) for x in lines[1].split(",")]
    assert parsed == [0.0, 4.0, 0.95, 0.9, 0.99]

    noted = tmp_path / "diverged.csv"
    write_series(samples, noted, status="diverged time=0.5 node=3")
    assert noted.read_text().strip().splitlines()[-1] == (
        "# status: diverged time=0.5 node=3"
    )


def test_load_config_defaults_and_overrides(tmp_path):
    defaults = {
        "dt": 0.005,
        "levels": (0.5, 0.25),
        "verbose": False,
        "count": 3,
        "label": "run",
    }
    assert load_config(None, defaults) == defaults

    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment line\n"
        "\n"
        "dt = 0.01   # trailing comment\n"
        "levels = 0.4, 0.2, 0.1\n"
        "verbose = yes\n"
        "count = 5\n"
        "label = tuned\n"
    )
    cfg = load_config(path, defaults)
    assert cfg == {
        "dt": 0.01,
        "levels": (0.4, 0.2, 0.1),
        "verbose": True,
        "count": 5,
        "label": "tuned",
    }
    assert isinstance(cfg["count"], int)


@pytest.mark.parametrize("text,message", [
    ("dx = 1.0\n", "unknown key"),
    ("dt 1.0\n", "expected key = value"),
    ("dt = fast\n", "line 1"),
    ("levels =\n", "line 1"),
])
def test_load_config_errors(tmp_path, text, message):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    defaults = {"dt": 0.005, "levels": (0.5, 0.25)}
    with pytest.raises(ConfigurationError, match=message):
        load_config(path, defaults)


def test_slim_torus_reference_lands_on_target_tube():
    mesh = torus_mesh(major_radius=1.0, minor_radius=0.4,
                      target_edge_length=0.2)
    mapped = _slim_torus_reference(mesh.current, 1.0, 0.25)
    rho = np.hypot(mapped[:, 0], mapped[:, 1])
    tube = np.sqrt((rho - 1.0) ** 2 + mapped[:, 2] ** 2)
    np.testing.assert_allclose(tube, 0.25, atol=1e-12)


def test_square_experiment_tiny_run():
    out = run_square_spatial_experiment(
        old_levels=(0.6,), fixed_new=0.6, new_levels=(0.6,), fixed_old=0.6,
        seed=0, size=2.0,
    )
    assert set(out) == {"old_sweep", "new_sweep"}
    for rows in out.values():
        assert len(rows) == 1
        row = rows[0]
        assert row.level == 0.6
        assert row.n_samples > 0
        assert 0.0 <= row.q1 <= row.median <= row.q3 <= row.max
        assert row.min >= 0.0
        assert row.achieved_edge_length == pytest.approx(0.6, rel=0.35)


def test_cylinder_experiment_tiny_run():
    out = run_cylinder_spatial_experiment(
        old_levels=(0.4,), fixed_new=0.4, new_levels=(0.4,), fixed_old=0.4,
        seed=0,
    )
    for rows in out.values():
        assert len(rows) == 1
        assert rows[0].n_samples > 0
        assert np.isfinite(rows[0].median)


def test_strain_experiment_tiny_run():
    out = run_strain_experiment(levels=(0.6,), seed=0, size=2.0)
    assert set(out) == {"fixed", "remeshed"}
    for rows in out.values():
        assert len(rows) == 1
        assert rows[0].median > 0.0


def test_frequency_experiment_tiny_run():
    out = run_frequency_experiment(counts=(0, 1), edge_length=0.5, t_end=6.0)
    # the unremeshed baseline has no transfer, so no spatial row
    assert [r.level for r in out["spatial"]] == [1.0]
    assert [r.level for r in out["strain"]] == [0.0, 1.0]
    assert out["spatial"][0].median > 0.0


def test_pressure_simulation_tiny_run():
    out = run_pressure_simulation(
        pressure=1.5e-2, dt=0.01, t_end=0.05, remesh_interval=0.02,
        target_edge_length=0.25, log_interval=0.02, seed=0,
    )
    assert set(out) == {"fixed", "remeshed"}
    for samples, status in out.values():
        assert status is None
        assert len(samples) >= 2
        times = [s.time for s in samples]
        assert times == sorted(times)
        for s in samples:
            assert s.total_area > 0.0
            assert 0.0 < s.q1 <= s.median_ar <= s.q3 <= 1.0 + 1e-12


def test_pressure_simulation_validation():
    with pytest.raises(ConfigurationError, match="0 < dt < t_end"):
        run_pressure_simulation(dt=0.1, t_end=0.1)
    with pytest.raises(ConfigurationError, match="reference_minor_radius"):
        run_pressure_simulation(reference_minor_radius=0.5, minor_radius=0.4)
