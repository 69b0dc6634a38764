"""Closed-form charts: the b = d = 0 flat surfaces and the non-flat example."""
import math

import numpy as np

from .. import expr as ex
from ..charts import ExprChart, Grid
from ..errors import QuasiMinimalityViolated

ETA0 = np.array([1.0, 0.0, 0.0, 1.0])
ETA1 = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2.0)
ETA2 = np.array([0.0, -1.0, 1.0, 0.0]) / math.sqrt(2.0)

EXAMPLE_COMPONENTS = (
    "-4*sqrt(s)*cos(t) + s*sin(t) + cos(t)/2",
    "-4*sqrt(s)*sin(t) - s*cos(t) + sin(t)/2",
    "-4*sqrt(s)*sin(t) - s*cos(t) - sin(t)/2",
    "-4*sqrt(s)*cos(t) + s*sin(t) - cos(t)/2",
)
EXAMPLE_DOMAIN = ((1.0, 9.0), (0.0, 2.0 * math.pi))
UNIT_SQUARE = ((0.0, 1.0), (0.0, 1.0))

# vanishing of theta_uv below this level means H = 0 at that point
THETA_UV_TOL = 1e-12


def example_chart(domain=EXAMPLE_DOMAIN):
    """The closed-form non-flat surface with lambda1 = -3/2, lambda3 = 1.

    Coordinates are ``(s, t)`` with ``s > 0``; in them ``<z_s, z_s> = 0``,
    ``<z_s, z_t> = -1`` and ``<z_t, z_t> = -8 sqrt(s)``.
    """
    return ExprChart(EXAMPLE_COMPONENTS, domain, coords="st", label="example")


def theta_components(theta):
    """Position-vector components (theta, (u-v)/sqrt2, (u+v)/sqrt2, theta)."""
    theta = ex.as_expr(theta)
    r2 = ex.Call("sqrt", ex.Num(2.0))
    u, v = ex.Var("u"), ex.Var("v")
    return (theta, ex.BinOp("/", ex.BinOp("-", u, v), r2),
            ex.BinOp("/", ex.BinOp("+", u, v), r2), theta)


def bd_zero_surface(theta, domain=UNIT_SQUARE, check_grid=Grid(9, 9)):
    """Flat chart ``(theta, (u-v)/sqrt2, (u+v)/sqrt2, theta)`` in null coordinates.

    ``theta`` is an expression in ``u, v`` or a solved
    :class:`~quasiminimal.families.goursat.ThetaField`.  The chart has
    ``f = 1``, ``b = d = 0`` and mean curvature ``-theta_uv * eta0``, so it is
    rejected when ``theta_uv`` vanishes somewhere on ``check_grid``.
    """
    from .goursat import GridThetaChart, ThetaField

    if isinstance(theta, ThetaField):
        return GridThetaChart(theta)
    node = ex.as_expr(theta)
    chart = ExprChart(theta_components(node), domain, coords="uv",
                      label=f"theta={ex.to_source(node)}")
    u, v = check_grid.points(chart.domain)
    tuv = ex.eval_jet(node, (u, v), order=2).deriv(1, 1)
    tuv = np.broadcast_to(tuv, u.shape)
    k = int(np.argmin(np.abs(tuv)))
    if abs(tuv[k]) <= THETA_UV_TOL:
        raise QuasiMinimalityViolated(
            "theta_uv vanishes, so the mean curvature vector is zero",
            u=u[k], v=v[k], theta_uv=float(tuv[k]))
    return chart


def flat_family_C(c1, c2):
    """Constant bivector c1 eta0^eta2 - c2 eta0^eta1 - eta1^eta2 of the flat family."""
    from ..algebra import wedge

    return (c1 * wedge(ETA0, ETA2) - c2 * wedge(ETA0, ETA1) - wedge(ETA1, ETA2))
