"""Gauss map G = x ^ y and its Laplacian.

The Laplacian is computed two ways.  The direct route differentiates the
bivector field G along the null frame,

    Delta G = D_x D_y G + D_y D_x G + gamma1 D_y G + gamma2 D_x G,

using order-3 jets of the chart.  The closed form expresses the same
quantity in the moving frame,

    Delta G = -2K x^y + 2 kappa n1^n2 + 2 beta2 x^n1 - 2 beta1 y^n1.

Agreement of the two is the main internal consistency check of the package.
"""
from dataclasses import dataclass

import numpy as np

from .algebra import inner6, wedge
from .frames import FrameData, LocalFrame
from .jets import DEFAULT_ORDER, vec_values

HARMONIC_TOL = 1e-7


@dataclass
class GaussSample:
    """Gauss map data at one point or a batch; bivectors have shape ``(6, *batch)``."""

    G: np.ndarray
    deltaG_closed: np.ndarray
    deltaG_direct: np.ndarray
    frame: FrameData

    @property
    def mismatch(self):
        """Scaled disagreement of the two Laplacians at each point."""
        diff = np.linalg.norm(self.deltaG_closed - self.deltaG_direct, axis=0)
        scale = np.maximum(1.0, np.linalg.norm(self.deltaG_closed, axis=0))
        return diff / scale


def laplacian_closed_form(frame):
    """Frame expression of the Laplacian of the Gauss map."""
    x, y, n1, n2 = frame.x, frame.y, frame.n1, frame.n2
    return (-2.0 * frame.K * wedge(x, y) + 2.0 * frame.kappa * wedge(n1, n2)
            + 2.0 * frame.beta2 * wedge(x, n1) - 2.0 * frame.beta1 * wedge(y, n1))


def _direct_from_frame(lf):
    G = wedge(lf.x, lf.y)
    DxG, DyG = lf.Dx_vec(G), lf.Dy_vec(G)
    lap = [lf.Dx(q) + lf.Dy(p) + lf.gamma1 * q + lf.gamma2 * p
           for p, q in zip(DxG, DyG)]
    return vec_values(lap)


def gauss_map_at(chart, u, v):
    """Gauss map bivector(s) at the given point(s)."""
    lf = LocalFrame(chart, u, v, 2)
    return vec_values(wedge(lf.x, lf.y))


def laplacian_direct(chart, u, v):
    """Laplacian of G by differentiating the bivector field along the frame."""
    return _direct_from_frame(LocalFrame(chart, u, v, DEFAULT_ORDER))


def gauss_samples(chart, u, v):
    """Frame, Gauss map and both Laplacians from a single jet evaluation."""
    lf = LocalFrame(chart, u, v, DEFAULT_ORDER)
    frame = lf.values()
    direct = np.broadcast_to(_direct_from_frame(lf), (6,) + frame.K.shape).copy()
    return GaussSample(G=wedge(frame.x, frame.y),
                       deltaG_closed=laplacian_closed_form(frame),
                       deltaG_direct=direct, frame=frame)


@dataclass
class HarmonicResult:
    harmonic: bool
    max_residual: float
    flat: bool
    parallel_H: bool

    @property
    def characterization(self):
        """Whether "harmonic" agrees with "flat and parallel H" on the grid."""
        return self.harmonic == (self.flat and self.parallel_H)

    def __bool__(self):
        return self.harmonic


def harmonic_test(chart, grid, tol=HARMONIC_TOL):
    """Decide harmonicity of the Gauss map on a sample grid.

    Flatness and parallel mean curvature are checked independently from the
    frame coefficients so that callers can compare both sides.
    """
    u, v = chart.sample_points(grid)
    gs = gauss_samples(chart, u, v)
    norms = np.linalg.norm(gs.deltaG_direct, axis=0)
    fr = gs.frame
    flat = bool(np.max(np.abs(fr.K)) <= tol)
    parallel = bool(max(np.max(np.abs(fr.beta1)), np.max(np.abs(fr.beta2))) <= tol)
    return HarmonicResult(harmonic=bool(np.max(norms) <= tol),
                          max_residual=float(np.max(norms)),
                          flat=flat, parallel_H=parallel)


def self_product(G):
    """Bivector self inner product (equals -1 for any Gauss map value)."""
    return inner6(G, G)
