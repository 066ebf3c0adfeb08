"""Closed-form deformation fields used by the experiments.

Each deformation maps initial positions to deformed ones and exposes the
analytic Jacobian where the error metrics need it.  Planar fields act on
(x, y) and leave z untouched; the bend acts on all three coordinates.
"""

import numpy as np

from .errors import ConfigurationError, DegenerateElementError


class QuadraticStretch:
    """(x, y) -> (x^2, y^2); anisotropic growth away from the unit lines."""

    planar = True

    def evaluate(self, points, t=None):
        pts = np.array(points, dtype=np.float64, copy=True)
        pts[..., 0] = points[..., 0] ** 2
        pts[..., 1] = points[..., 1] ** 2
        return pts

    def jacobian(self, point, t=None):
        x, y = float(point[0]), float(point[1])
        return np.array([[2.0 * x, 0.0], [0.0, 2.0 * y]])


class SinusoidalBend:
    """Cylinder bend: (r cos a + sin z, 1.5 r sin a, z) in polar x-y form."""

    planar = False

    def evaluate(self, points, t=None):
        pts = np.asarray(points, dtype=np.float64)
        r = np.sqrt(pts[..., 0] ** 2 + pts[..., 1] ** 2)
        ang = np.arctan2(pts[..., 1], pts[..., 0])
        out = np.empty_like(pts)
        out[..., 0] = r * np.cos(ang) + np.sin(pts[..., 2])
        out[..., 1] = 1.5 * r * np.sin(ang)
        out[..., 2] = pts[..., 2]
        return out

    def jacobian(self, point, t=None):
        # r cos a = x and r sin a = y, so the map is affine in x, y
        z = float(point[2])
        return np.array(
            [[1.0, 0.0, np.cos(z)], [0.0, 1.5, 0.0], [0.0, 0.0, 1.0]]
        )


class IdentityDeformation:
    """Leaves every point fixed; the degenerate baseline."""

    planar = True

    def evaluate(self, points, t=None):
        return np.array(points, dtype=np.float64, copy=True)

    def jacobian(self, point, t=None):
        return np.eye(2)


class TimeInterpolatedDeformation:
    """Linear schedule from identity to a base deformation.

    x(t) = x0 + (t / t_end) (base(x0) - x0); t = t_end reproduces the base
    field exactly, t = 0 the identity.
    """

    planar = True

    def __init__(self, base=None, t_end=60.0):
        if t_end <= 0:
            raise ConfigurationError("t_end must be positive")
        self.base = base if base is not None else QuadraticStretch()
        self.t_end = float(t_end)

    def _s(self, t):
        if t is None:
            raise ConfigurationError("time-dependent deformation needs t")
        return float(t) / self.t_end

    def evaluate(self, points, t=None):
        s = self._s(t)
        pts = np.asarray(points, dtype=np.float64)
        return pts + s * (self.base.evaluate(pts) - pts)

    def jacobian(self, point, t=None):
        s = self._s(t)
        jb = self.base.jacobian(point)
        return (1.0 - s) * np.eye(jb.shape[0]) + s * jb


def exact_invariants(deformation, point, t=None):
    """Strain invariants of the analytic field at one initial point.

    Uses the singular values s1 >= s2 of the Jacobian:
    I1 = s1^2 + s2^2 - 2 and I2 = (s1 s2)^2 - 1.

    Raises
    ------
    DegenerateElementError
        If the Jacobian is singular there (flagged, excluded upstream).
    """
    jac = deformation.jacobian(point, t=t)
    s = np.linalg.svd(jac, compute_uv=False)
    if s[-1] == 0.0:
        raise DegenerateElementError("singular Jacobian at sample point")
    s1, s2 = float(s[0]), float(s[1])
    return s1 * s1 + s2 * s2 - 2.0, (s1 * s2) ** 2 - 1.0


def closed_form_invariants_quadratic(point):
    """Cross-check for the quadratic stretch: stretches are (2x, 2y).

    I1 = (2x)^2 + (2y)^2 - 2, I2 = (2x)^2 (2y)^2 - 1; must agree with
    :func:`exact_invariants` on the same field.
    """
    x, y = float(point[0]), float(point[1])
    lx = 2.0 * x
    ly = 2.0 * y
    return lx * lx + ly * ly - 2.0, (lx * ly) ** 2 - 1.0
