"""Error metrics, experiment pipelines, and CSV output.

Spatial error per node: E = ||X - F(x)||^2, the squared distance between
a node's current position X and the analytic image of its stored initial
position x.  Strain error per element: |W_exact - W_discrete| where the
exact energy density is evaluated at the centroid of the element's
initial triangle and the discrete one comes from the element invariants.

All pipelines are deterministic for a given seed and write CSV with the
fixed header ``level,median,q1,q3,min,max,n_samples,achieved_edge_length,
seed`` (one row per sweep level).
"""

from dataclasses import dataclass

import numpy as np

from .deformations import (
    QuadraticStretch,
    SinusoidalBend,
    TimeInterpolatedDeformation,
    exact_invariants,
)
from .errors import (
    ConfigurationError,
    DegenerateElementError,
    SimulationDivergedError,
)
from .membrane import (
    MembraneState,
    SkalakParams,
    element_invariants,
    membrane_state,
    skalak_energy_density,
    step_overdamped,
)
from .mesh import (
    SurfaceMesh,
    aspect_ratios,
    build_mesh,
    element_centroids,
    median_edge_length,
    quantiles_sorted,
    total_area,
)
from .remesh import remesh_planar, remesh_surface
from .shapes import cylinder_mesh, square_mesh, torus_mesh
from .transfer import transfer_initial_configuration

RESULT_HEADER = "level,median,q1,q3,min,max,n_samples,achieved_edge_length,seed"
SERIES_HEADER = "time,total_area,median_ar,q1,q3"


@dataclass(frozen=True)
class ResultRow:
    """One sweep level of an experiment: order statistics of its samples."""

    level: float
    median: float
    q1: float
    q3: float
    min: float
    max: float
    n_samples: int
    achieved_edge_length: float
    seed: int


@dataclass(frozen=True)
class SeriesSample:
    time: float
    total_area: float
    median_ar: float
    q1: float
    q3: float


def _result_row(level, values, achieved, seed):
    values = np.asarray(values, dtype=np.float64)
    q1, med, q3 = quantiles_sorted(values)
    return ResultRow(
        level=float(level), median=med, q1=q1, q3=q3,
        min=float(values.min()), max=float(values.max()),
        n_samples=int(values.size), achieved_edge_length=float(achieved),
        seed=int(seed),
    )


def spatial_error(mesh: SurfaceMesh, deformation, t=None):
    """Per-node squared distance to the analytic image of the initial
    positions; requires a completed transfer (or an original mesh)."""
    predicted = deformation.evaluate(mesh.initial, t=t)
    diff = mesh.current - predicted
    return np.einsum("ij,ij->i", diff, diff)


def strain_error(mesh: SurfaceMesh, deformation, params: SkalakParams,
                 t=None):
    """Per-element |W_exact - W_discrete|; returns (values, n_excluded).

    Elements whose initial centroid has a singular analytic Jacobian are
    excluded from the statistics and counted.
    """
    i1, i2 = element_invariants(mesh)
    discrete = np.asarray(skalak_energy_density(i1, i2, params))
    cents = element_centroids(mesh, config="initial")
    values = []
    excluded = 0
    for j in range(cents.shape[0]):
        try:
            e1, e2 = exact_invariants(deformation, cents[j], t=t)
        except DegenerateElementError:
            excluded += 1
            continue
        exact = skalak_energy_density(e1, e2, params)
        values.append(abs(exact - float(discrete[j])))
    return np.array(values), excluded


# ---------------------------------------------------------------------------
# experiment pipelines


def _square_level(old_edge, new_edge, seed, size):
    f = QuadraticStretch()
    base = square_mesh(size=size, target_edge_length=old_edge, seed=seed)
    old = base.with_current(f.evaluate(base.initial))
    new = remesh_planar(old, new_edge, seed=seed)
    transferred, _ = transfer_initial_configuration(old, new)
    return (spatial_error(transferred, f),
            median_edge_length(new, config="current"))


def run_square_spatial_experiment(old_levels=(0.5, 0.25, 0.1),
                                  fixed_new=0.1,
                                  new_levels=(0.5, 0.25, 0.1),
                                  fixed_old=0.1,
                                  seed=0, size=3.0):
    """Planar benchmark: remesh the square deformed by (x^2, y^2).

    Returns {"old_sweep": rows, "new_sweep": rows}; the old-mesh sweep
    varies the source resolution at a fixed new mesh (error should fall),
    the new-mesh sweep varies the generated mesh at a fixed source (error
    should stay flat).
    """
    old_rows = []
    for lvl in old_levels:
        err, achieved = _square_level(lvl, fixed_new, seed, size)
        old_rows.append(_result_row(lvl, err, achieved, seed))
    new_rows = []
    for lvl in new_levels:
        err, achieved = _square_level(fixed_old, lvl, seed, size)
        new_rows.append(_result_row(lvl, err, achieved, seed))
    return {"old_sweep": old_rows, "new_sweep": new_rows}


def _cylinder_level(old_edge, new_edge, seed):
    g = SinusoidalBend()
    base = cylinder_mesh(radius=1.0, height=2.0 * np.pi,
                         target_edge_length=old_edge)
    old = base.with_current(g.evaluate(base.initial))
    new = remesh_surface(old, new_edge, seed=seed)
    transferred, _ = transfer_initial_configuration(old, new)
    return (spatial_error(transferred, g),
            median_edge_length(new, config="current"))


def run_cylinder_spatial_experiment(old_levels=(0.4, 0.2, 0.1, 0.05),
                                    fixed_new=0.2,
                                    new_levels=(0.4, 0.2, 0.1),
                                    fixed_old=0.1,
                                    seed=0):
    """Surface benchmark: cylinder bent by the sinusoidal deformation."""
    old_rows = []
    for lvl in old_levels:
        err, achieved = _cylinder_level(lvl, fixed_new, seed)
        old_rows.append(_result_row(lvl, err, achieved, seed))
    new_rows = []
    for lvl in new_levels:
        err, achieved = _cylinder_level(fixed_old, lvl, seed)
        new_rows.append(_result_row(lvl, err, achieved, seed))
    return {"old_sweep": old_rows, "new_sweep": new_rows}


def run_strain_experiment(levels=(0.5, 0.25, 0.1, 0.05), seed=0, size=3.0,
                          params: SkalakParams | None = None):
    """Strain-energy error under refinement, fixed mesh vs one remesh.

    The fixed path deforms the generated mesh and evaluates the error
    directly; the remeshed path regenerates the deformed mesh at the same
    resolution, transfers the initial configuration, and evaluates the
    error on the new elements.
    """
    if params is None:
        params = SkalakParams()
    f = QuadraticStretch()
    fixed_rows, remeshed_rows = [], []
    for lvl in levels:
        base = square_mesh(size=size, target_edge_length=lvl, seed=seed)
        old = base.with_current(f.evaluate(base.initial))
        err, _ = strain_error(old, f, params)
        fixed_rows.append(_result_row(
            lvl, err, median_edge_length(old, config="initial"), seed))

        new = remesh_planar(old, lvl, seed=seed)
        transferred, _ = transfer_initial_configuration(old, new)
        err_r, _ = strain_error(transferred, f, params)
        remeshed_rows.append(_result_row(
            lvl, err_r, median_edge_length(new, config="current"), seed))
    return {"fixed": fixed_rows, "remeshed": remeshed_rows}


def run_frequency_experiment(counts=(0, 1, 2, 3, 5, 10, 20),
                             edge_length=0.1, t_end=60.0, seed=0, size=3.0,
                             params: SkalakParams | None = None):
    """Error at the end of a time-dependent deformation vs remesh count.

    For n remeshing events the mesh is rebuilt at times k * t_end / n,
    k = 1..n (the last event is at the end).  Node motion is prescribed:
    each node sits at the analytic field evaluated at its stored initial
    position, so after a remesh the trajectory is re-anchored to the
    mapped estimate and earlier transfer errors enter only through the
    quality of the mesh the next transfer reads from.  n = 0 is the
    fixed-mesh baseline; its spatial error is undefined (no transfer
    happened) and is omitted from the results.
    """
    if params is None:
        params = SkalakParams()
    field = TimeInterpolatedDeformation(QuadraticStretch(), t_end=t_end)
    spatial_rows, strain_rows = [], []
    for n in counts:
        base = square_mesh(size=size, target_edge_length=edge_length,
                           seed=seed)
        if n == 0:
            final = base.with_current(
                field.evaluate(base.initial, t=t_end))
            err, _ = strain_error(final, field, params, t=t_end)
            strain_rows.append(_result_row(
                0, err, median_edge_length(final, config="initial"), seed))
            continue
        mesh = base
        for k in range(1, n + 1):
            t_k = t_end * k / n
            old = mesh.with_current(field.evaluate(mesh.initial, t=t_k))
            new = remesh_planar(old, edge_length, seed=seed)
            mesh, _ = transfer_initial_configuration(old, new)
        err_sp = spatial_error(mesh, field, t=t_end)
        spatial_rows.append(_result_row(
            n, err_sp, median_edge_length(mesh, config="current"), seed))
        err_st, _ = strain_error(mesh, field, params, t=t_end)
        strain_rows.append(_result_row(
            n, err_st, median_edge_length(mesh, config="current"), seed))
    return {"spatial": spatial_rows, "strain": strain_rows}


# ---------------------------------------------------------------------------
# pressure-driven relaxation


def _log_sample(state: MembraneState):
    mesh_now = state.mesh.with_current(state.positions)
    ar = aspect_ratios(mesh_now, config="current")
    q1, med, q3 = quantiles_sorted(ar)
    return SeriesSample(
        time=state.time,
        total_area=total_area(mesh_now, config="current"),
        median_ar=med, q1=q1, q3=q3,
    )


def _slim_torus_reference(points, major_radius, reference_minor_radius):
    theta = np.arctan2(points[:, 1], points[:, 0])
    rho = np.hypot(points[:, 0], points[:, 1]) - major_radius
    phi = np.arctan2(points[:, 2], rho)
    ring = major_radius + reference_minor_radius * np.cos(phi)
    return np.column_stack([
        ring * np.cos(theta),
        ring * np.sin(theta),
        reference_minor_radius * np.sin(phi),
    ])


def run_pressure_simulation(pressure=1.5e-2, dt=0.005, t_end=60.0,
                            remesh_interval=0.6, target_edge_length=0.1,
                            major_radius=1.0, minor_radius=0.4,
                            reference_minor_radius=0.25,
                            mobility=1000.0, log_interval=0.6, seed=0,
                            params: SkalakParams | None = None):
    """Inflate a pre-strained closed torus, with and without remeshing.

    Returns {"fixed": (samples, status), "remeshed": (samples, status)}
    where status is None or a divergence note.  The remeshed run rebuilds
    the surface every ``remesh_interval`` seconds and transfers the
    stored initial configuration, so the elastic state carries over.

    The tube starts at ``minor_radius`` but its stress-free reference is
    a slimmer tube (``reference_minor_radius``), the way a vessel wall
    carries residual hoop stress.  A uniformly pressurized free surface
    would otherwise just scale itself and never shear its elements;
    equilibrating the hoop pre-stretch forces anisotropic element strain,
    which is what degrades the fixed mesh.  The starting mesh is itself
    produced by the surface remesher so both runs begin from
    near-equilateral elements.
    """
    if params is None:
        params = SkalakParams()
    if dt <= 0 or t_end <= dt:
        raise ConfigurationError("need 0 < dt < t_end")
    if not 0 < reference_minor_radius <= minor_radius:
        raise ConfigurationError(
            "need 0 < reference_minor_radius <= minor_radius")
    lattice = torus_mesh(major_radius=major_radius,
                         minor_radius=minor_radius,
                         target_edge_length=target_edge_length)
    fat = remesh_surface(lattice, target_edge_length, seed=seed)
    base = build_mesh(
        _slim_torus_reference(fat.current, major_radius,
                              reference_minor_radius),
        fat.current, fat.triangles, mode="surface")
    n_steps = int(round(t_end / dt))
    log_every = max(1, int(round(log_interval / dt)))
    remesh_every = max(1, int(round(remesh_interval / dt)))

    def _run(with_remesh: bool):
        state = membrane_state(base, params, pressure=pressure,
                               mobility=mobility)
        samples = [_log_sample(state)]
        status = None
        try:
            for i in range(1, n_steps + 1):
                state = step_overdamped(state, dt)
                if with_remesh and i % remesh_every == 0 and i < n_steps:
                    old = state.mesh.with_current(state.positions)
                    new = remesh_surface(old, target_edge_length, seed=seed)
                    transferred, _ = transfer_initial_configuration(old, new)
                    state = membrane_state(
                        transferred, params, pressure=pressure,
                        mobility=mobility, time=state.time)
                if i % log_every == 0 or i == n_steps:
                    samples.append(_log_sample(state))
        except SimulationDivergedError as exc:
            status = f"diverged time={exc.time:.6g} node={exc.node}"
        return samples, status

    return {"fixed": _run(False), "remeshed": _run(True)}


# ---------------------------------------------------------------------------
# CSV output and plain-text configs


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_results(rows, path):
    """Sweep rows to CSV with the fixed experiment header."""
    lines = [RESULT_HEADER]
    for r in rows:
        lines.append(",".join([
            format(r.level, "g"), _fmt(r.median), _fmt(r.q1), _fmt(r.q3),
            _fmt(r.min), _fmt(r.max), str(r.n_samples),
            _fmt(r.achieved_edge_length), str(r.seed),
        ]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_series(samples, path, status=None):
    """Time series to CSV; a divergence note becomes a trailing comment."""
    lines = [SERIES_HEADER]
    for s in samples:
        lines.append(",".join([
            _fmt(s.time), _fmt(s.total_area), _fmt(s.median_ar),
            _fmt(s.q1), _fmt(s.q3),
        ]))
    if status is not None:
        lines.append(f"# status: {status}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_config(path, defaults):
    """key = value configuration with '#' comments.

    Types are coerced from the defaults: numbers stay numbers and
    tuple-valued keys parse as comma-separated lists.  Unknown keys are
    rejected so typos fail loudly.
    """
    cfg = dict(defaults)
    if path is None:
        return cfg
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {ln}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in defaults:
            raise ConfigurationError(f"line {ln}: unknown key '{key}'")
        try:
            cfg[key] = _coerce(value, defaults[key])
        except ValueError as exc:
            raise ConfigurationError(
                f"line {ln}: bad value for '{key}': {value}") from exc
    return cfg


def _coerce(value, default):
    if isinstance(default, tuple):
        items = [v.strip() for v in value.split(",") if v.strip()]
        if not items:
            raise ValueError("empty list")
        elem = default[0] if default else 0.0
        cast = int if isinstance(elem, int) else float
        return tuple(cast(v) for v in items)
    if isinstance(default, bool):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(value)
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value
