"""Charts: immersions z(u, v) into E^4_2 that can be evaluated as jets.

Two coordinate conventions are supported:

``"uv"``
    null coordinates, induced metric ``-f^2 (du dv + dv du)``;
``"st"``
    the normalised coordinates of the non-flat family, in which
    ``<z_s, z_s> = 0`` and ``<z_s, z_t> = -1``.
"""
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .errors import ChartSpecError, OutOfDomain
from .jets import DEFAULT_ORDER, Jet

COORD_NAMES = {"uv": ("u", "v"), "st": ("s", "t")}


@dataclass(frozen=True)
class Grid:
    """A rectangular sample lattice of ``nu x nv`` points.

    ``margin`` is the fraction of each side trimmed off before sampling; a
    margin of 0 includes the rectangle's edges.
    """

    nu: int
    nv: int
    margin: float = 0.0

    def __post_init__(self):
        if self.nu < 1 or self.nv < 1:
            raise ChartSpecError("grid must have at least one point per side")
        if not 0.0 <= self.margin < 0.5:
            raise ChartSpecError("grid margin must lie in [0, 0.5)")

    def axes(self, domain):
        (a, b), (c, d) = domain
        mu, mv = self.margin * (b - a), self.margin * (d - c)
        return (np.linspace(a + mu, b - mu, self.nu),
                np.linspace(c + mv, d - mv, self.nv))

    def points(self, domain):
        """Flattened sample coordinates in u-major order."""
        us, vs = self.axes(domain)
        U, V = np.meshgrid(us, vs, indexing="ij")
        return U.ravel(), V.ravel()

    @classmethod
    def parse(cls, text, margin=0.0):
        try:
            nu, nv = (int(x) for x in text.lower().split("x"))
        except ValueError:
            raise ChartSpecError(f"grid must look like 20x20, got {text!r}") from None
        return cls(nu, nv, margin)


def _check_domain(domain):
    (a, b), (c, d) = domain
    if not (np.isfinite([a, b, c, d]).all() and b > a and d > c):
        raise ChartSpecError(f"degenerate domain rectangle {domain}")
    return ((float(a), float(b)), (float(c), float(d)))


class Chart:
    """Base class.  Subclasses implement :meth:`jet`."""

    coords = "uv"
    label = "chart"

    def __init__(self, domain, coords="uv", label=None):
        if coords not in COORD_NAMES:
            raise ChartSpecError(f"coords must be 'uv' or 'st', got {coords!r}")
        self.domain = _check_domain(domain)
        self.coords = coords
        if label is not None:
            self.label = label

    @property
    def names(self):
        return COORD_NAMES[self.coords]

    def jet(self, u, v, order=DEFAULT_ORDER):
        """List of four jets of the position vector at the points (u, v)."""
        raise NotImplementedError

    def evaluate(self, u, v):
        z = self.jet(u, v, order=0)
        return np.stack([c.value for c in z])

    def sample_points(self, grid):
        return grid.points(self.domain)

    def to_json(self):
        return {"label": self.label, "coords": self.coords,
                "domain": {self.names[0]: list(self.domain[0]),
                           self.names[1]: list(self.domain[1])}}


class ExprChart(Chart):
    """Chart whose four components are expression trees."""

    def __init__(self, components, domain, coords="uv", label="expr"):
        super().__init__(domain, coords, label)
        if len(components) != 4:
            raise ChartSpecError("a chart needs exactly four components")
        self.components = tuple(ex.as_expr(c) for c in components)
        allowed = set(self.names)
        for comp in self.components:
            extra = ex.variables(comp) - allowed
            if extra:
                raise ChartSpecError(
                    f"component uses {sorted(extra)} but chart coordinates are "
                    f"{self.names}")

    def jet(self, u, v, order=DEFAULT_ORDER):
        U, V = Jet.variables(u, v, order)
        env = {self.names[0]: U, self.names[1]: V}
        out = []
        for comp in self.components:
            val = ex.evaluate(comp, env)
            if not isinstance(val, Jet):
                val = Jet.constant(np.broadcast_to(val, U.shape), order)
            out.append(val)
        return out

    def to_json(self):
        out = super().to_json()
        out["components"] = [ex.to_source(c) for c in self.components]
        return out


def in_domain(chart, u, v, slack=1e-12):
    (a, b), (c, d) = chart.domain
    u, v = np.asarray(u), np.asarray(v)
    su, sv = slack * max(1.0, b - a), slack * max(1.0, d - c)
    return (u >= a - su) & (u <= b + su) & (v >= c - sv) & (v <= d + sv)


def require_in_domain(chart, u, v):
    ok = in_domain(chart, u, v)
    if not np.all(ok):
        bad = np.argmin(ok.ravel())
        raise OutOfDomain(f"point ({np.ravel(u)[bad]}, {np.ravel(v)[bad]}) lies "
                          f"outside the chart rectangle {chart.domain}")
