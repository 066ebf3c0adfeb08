"""Timing comparison of the numba and numpy kernel lanes.

Runs the same workloads through both implementations in one process and
reports best-of-N wall times, so the numbers are unaffected by backend
selection at import time.  JIT compilation is paid before timing.

Usage: python3 benchmarks/bench_kernels.py [--repeats N] [--queries Q]
"""

import argparse
import time

import numpy as np

from histremesh import SinusoidalBend, cylinder_mesh, icosphere_mesh
from histremesh import _kernels_numpy as knp
from histremesh.membrane import _reference_tables
from histremesh.search import search_index

try:
    from histremesh import _kernels_numba as knb
except ImportError:
    knb = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def surface_queries(mesh, n, seed):
    rng = np.random.default_rng(seed)
    idx = search_index(mesh, "current")
    elems = rng.integers(0, mesh.n_elements, size=n)
    r1, r2 = rng.random(n), rng.random(n)
    flip = r1 + r2 > 1.0
    r1[flip], r2[flip] = 1.0 - r1[flip], 1.0 - r2[flip]
    tri = mesh.current[mesh.triangles[elems]]
    base = (tri[:, 0] + r1[:, None] * (tri[:, 1] - tri[:, 0])
            + r2[:, None] * (tri[:, 2] - tri[:, 0]))
    off = rng.uniform(-0.02, 0.02, size=n)
    return np.ascontiguousarray(base + off[:, None] * idx.normals[elems])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--queries", type=int, default=20_000)
    args = ap.parse_args()

    bend = SinusoidalBend()
    tube = cylinder_mesh(target_edge_length=0.1)
    tube = tube.with_current(bend.evaluate(tube.initial))
    idx = search_index(tube, "current")
    queries = surface_queries(tube, args.queries, seed=3)

    ball = icosphere_mesh(radius=1.0, subdivisions=4)
    ball = ball.with_current(ball.initial * np.array([1.3, 0.9, 1.1]))
    pos = np.ascontiguousarray(ball.current)
    tri = np.ascontiguousarray(ball.triangles)
    b11, b12, b22, inv_det0, area0 = _reference_tables(ball)

    grid_args = (idx.tri_pts, idx.centroids, idx.normals, idx.pa, idx.pb,
                 idx.edge_tris, idx.tri_edges, idx.origin, idx.inv_cell,
                 idx.dims, idx.cell_start, idx.cell_items)

    workloads = [
        ("cascade search, grid",
         lambda k: k.search_batch(queries, 1e-9, *grid_args)),
        ("surface projection, grid",
         lambda k: k.project_points(idx.tri_pts, queries, idx.origin,
                                    idx.inv_cell, idx.dims, idx.cell_start,
                                    idx.cell_items)),
        ("elastic forces",
         lambda k: k.elastic_forces(pos, tri, b11, b12, b22, inv_det0,
                                    area0, 0.01, 1e-6)),
        ("pressure forces",
         lambda k: k.pressure_forces(pos, tri, 1.5e-2)),
    ]

    print(f"cylinder: {tube.n_elements} elements, {len(queries)} queries; "
          f"sphere: {ball.n_elements} elements")
    print(f"best of {args.repeats} runs\n")
    header = f"{'workload':<28}{'numpy':>12}{'numba':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, run in workloads:
        t_np = best_of(lambda: run(knp), args.repeats)
        if knb is None:
            print(f"{name:<28}{t_np * 1e3:>10.2f}ms{'n/a':>12}{'':>10}")
            continue
        run(knb)  # compile before timing
        t_nb = best_of(lambda: run(knb), args.repeats)
        print(f"{name:<28}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms"
              f"{t_np / t_nb:>9.1f}x")
    if knb is None:
        print("\nnumba lane not importable; numpy lane only")


if __name__ == "__main__":
    main()
