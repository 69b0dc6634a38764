"""Null frames, second fundamental form and normal connection of a chart.

At every point of a quasi-minimal Lorentz chart we build a pseudo-orthonormal
tangent frame ``x, y`` (``<x,x> = <y,y> = 0``, ``<x,y> = -1``) and a null
normal frame ``n1 = -H``, ``n2`` (``<n1,n2> = -1``).  The ambient derivatives
of this frame are described by the scalars

    a, b, c, d        h(x,x) = a n1 + b n2,  h(y,y) = c n1 + d n2
    beta1, beta2      normal-connection coefficients of n1
    gamma1, gamma2    tangential connection coefficients

and the curvatures follow as ``K = ad + bc`` and ``kappa = ad - bc``.

All quantities are computed as jets, so derivatives of the frame scalars
(needed for the integrability residuals) are exact up to round-off.
"""
from dataclasses import dataclass, fields

import numpy as np

from .algebra import flip, inner4
from .errors import MinimalPoint, NotNullCoordinates, NotQuasiMinimal
from .jets import DEFAULT_ORDER, Jet, reciprocal, sqrt, vec_values

NULL_COORD_TOL = 1e-9
QUASI_MINIMAL_TOL = 1e-9
MINIMAL_TOL = 1e-10

FRAME_SCALARS = ("f", "ftilde", "gamma1", "gamma2", "a", "b", "c", "d",
                 "beta1", "beta2", "K", "kappa")
COEFFICIENTS = ("a", "b", "c", "d", "beta1", "beta2", "gamma1", "gamma2")


@dataclass
class FrameData:
    """Frame state at one point or a batch of points.

    Vector fields have shape ``(4, *batch)``, scalars ``batch``.  ``f`` is the
    conformal factor of null coordinates (1 for ``st`` charts) and ``ftilde``
    the ``dt^2`` metric coefficient of ``st`` charts (0 for ``uv`` charts).
    """

    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    y: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    H: np.ndarray
    f: np.ndarray
    ftilde: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    K: np.ndarray
    kappa: np.ndarray
    coords: str = "uv"

    def at(self, index):
        """Frame data of a single batch entry."""
        kw = {}
        for fld in fields(self):
            val = getattr(self, fld.name)
            if fld.name == "coords":
                kw[fld.name] = val
            elif fld.name in ("x", "y", "n1", "n2", "H"):
                kw[fld.name] = val[(slice(None),) + np.index_exp[index]]
            else:
                kw[fld.name] = val[index]
        return FrameData(**kw)


class LocalFrame:
    """Jet-valued frame quantities on a batch of points.

    ``Dx`` and ``Dy`` differentiate a scalar jet along the frame vectors.
    """

    def __init__(self, chart, u, v, order):
        self.chart = chart
        self.coords = chart.coords
        self.order = order
        self.u = np.asarray(u, dtype=float)
        self.v = np.asarray(v, dtype=float)
        self.z = chart.jet(u, v, order)
        z = self.z
        self.zu = [c.du() for c in z]
        self.zv = [c.dv() for c in z]
        self.g11 = inner4(self.zu, self.zu)
        self.g12 = inner4(self.zu, self.zv)
        self.g22 = inner4(self.zv, self.zv)
        self._check_coordinates()

        if self.coords == "uv":
            self.f = sqrt(-self.g12)
            self.finv = reciprocal(self.f)
            self.ftilde = None
            self.x = [self.finv * c for c in self.zu]
            self.y = [self.finv * c for c in self.zv]
        else:
            self.f = None
            self.ftilde = 0.5 * self.g22
            self.x = list(self.zu)
            self.y = [self.ftilde * a + b for a, b in zip(self.zu, self.zv)]

        x, y = self.x, self.y
        Dxx, Dxy = self.Dx_vec(x), self.Dx_vec(y)
        Dyy = self.Dy_vec(y)
        self.gamma1 = -inner4(Dxx, y)
        self.gamma2 = -inner4(Dyy, x)

        self.n1 = self.normal_part(Dxy)
        self.H = [-c for c in self.n1]
        self._check_mean_curvature()
        self.n2 = self._null_partner(self.n1)

        hxx, hyy = self.normal_part(Dxx), self.normal_part(Dyy)
        self.a = -inner4(hxx, self.n2)
        self.b = -inner4(hxx, self.n1)
        self.c = -inner4(hyy, self.n2)
        self.d = -inner4(hyy, self.n1)
        if order >= 3:
            self.beta1 = -inner4(self.Dx_vec(self.n1), self.n2)
            self.beta2 = -inner4(self.Dy_vec(self.n1), self.n2)
        self.K = self.a * self.d + self.b * self.c
        self.kappa = self.a * self.d - self.b * self.c

    # differential operators ---------------------------------------------
    def Dx(self, X):
        if self.coords == "uv":
            return self.finv * X.du()
        return X.du()

    def Dy(self, X):
        if self.coords == "uv":
            return self.finv * X.dv()
        return self.ftilde * X.du() + X.dv()

    def Dx_vec(self, vec):
        return [self.Dx(c) for c in vec]

    def Dy_vec(self, vec):
        return [self.Dy(c) for c in vec]

    def normal_part(self, w):
        wy, wx = inner4(w, self.y), inner4(w, self.x)
        return [wc + wy * xc + wx * yc for wc, xc, yc in zip(w, self.x, self.y)]

    def _null_partner(self, n1):
        w = self.normal_part(flip(n1))
        pair = inner4(n1, w)
        alpha = -reciprocal(pair)
        beta = -alpha * inner4(w, w) * reciprocal(2.0 * pair)
        return [alpha * wc + beta * nc for wc, nc in zip(w, n1)]

    # checks ---------------------------------------------------------------
    def _check_coordinates(self):
        zu, zv = vec_values(self.zu), vec_values(self.zv)
        nu2 = np.sum(zu * zu, axis=0)
        nv2 = np.sum(zv * zv, axis=0)
        g11, g12, g22 = (np.asarray(g.value) for g in (self.g11, self.g12, self.g22))
        tol = NULL_COORD_TOL
        _require(np.abs(g11) <= tol * np.maximum(1.0, nu2), g11,
                 "<z_1, z_1> must vanish in null coordinates", self)
        if self.coords == "uv":
            _require(np.abs(g22) <= tol * np.maximum(1.0, nv2), g22,
                     "<z_2, z_2> must vanish in null coordinates", self)
            _require(g12 < 0, g12, "<z_u, z_v> must be negative "
                     "(metric -f^2 (du dv + dv du))", self)
        else:
            scale = np.maximum(1.0, np.sqrt(nu2 * nv2))
            _require(np.abs(g12 + 1.0) <= tol * scale, g12 + 1.0,
                     "<z_s, z_t> must equal -1", self)

    def _check_mean_curvature(self):
        H = vec_values(self.H)
        h2 = np.sum(H * H, axis=0)
        bad = h2 <= MINIMAL_TOL ** 2
        if np.any(bad):
            k = int(np.argmax(bad.ravel()))
            raise MinimalPoint("mean curvature vector vanishes",
                               u=np.ravel(np.broadcast_to(self.u, bad.shape))[k],
                               v=np.ravel(np.broadcast_to(self.v, bad.shape))[k],
                               norm=np.sqrt(np.ravel(h2)[k]))
        hh = inner4(H, H)
        _require(np.abs(hh) <= QUASI_MINIMAL_TOL * np.maximum(1.0, h2), hh,
                 "mean curvature vector is not lightlike", self,
                 exc=NotQuasiMinimal)

    # export ---------------------------------------------------------------
    def values(self):
        shape = np.broadcast_shapes(self.u.shape, self.v.shape, np.shape(self.K.value))
        ones, zeros = np.ones(shape), np.zeros(shape)

        def val(j):
            return np.broadcast_to(j.value if isinstance(j, Jet) else j, shape).copy()

        def vec(vv):
            return np.stack([val(c) for c in vv])

        return FrameData(
            u=np.broadcast_to(self.u, shape).copy(),
            v=np.broadcast_to(self.v, shape).copy(),
            x=vec(self.x), y=vec(self.y), n1=vec(self.n1), n2=vec(self.n2),
            H=vec(self.H),
            f=val(self.f) if self.f is not None else ones,
            ftilde=val(self.ftilde) if self.ftilde is not None else zeros,
            gamma1=val(self.gamma1), gamma2=val(self.gamma2),
            a=val(self.a), b=val(self.b), c=val(self.c), d=val(self.d),
            beta1=val(self.beta1), beta2=val(self.beta2),
            K=val(self.K), kappa=val(self.kappa), coords=self.coords)


def _require(ok, value, message, frame, exc=NotNullCoordinates):
    ok = np.asarray(ok)
    if np.all(ok):
        return
    bad = ~ok
    k = int(np.argmax(bad.ravel()))
    shape = bad.shape
    u = np.ravel(np.broadcast_to(frame.u, shape))[k]
    v = np.ravel(np.broadcast_to(frame.v, shape))[k]
    mag = float(np.ravel(np.broadcast_to(value, shape))[k])
    raise exc(f"{message}: value {mag:.3e} at ({u:.6g}, {v:.6g})",
              u=u, v=v, magnitude=mag)


# public operations -----------------------------------------------------

def induced_metric(chart, u, v):
    """Metric coefficients (g11, g12, g22) in the chart coordinates."""
    z = chart.jet(u, v, order=1)
    zu = [c.du() for c in z]
    zv = [c.dv() for c in z]
    return tuple(np.asarray(g.value) for g in
                 (inner4(zu, zu), inner4(zu, zv), inner4(zv, zv)))


def frame_jets(chart, u, v, order=DEFAULT_ORDER):
    return LocalFrame(chart, u, v, order)


def build_frames(chart, u, v):
    """Pointwise frame data (works on scalars or arrays of points)."""
    return LocalFrame(chart, u, v, DEFAULT_ORDER).values()


def curvatures(chart, u, v):
    """Gauss and normal curvature, plus the metric-only Gauss curvature.

    Returns ``(K, kappa, K_metric)``; ``K_metric`` uses only the conformal
    factor, ``(2 f f_uv - 2 f_u f_v) / f^4`` in null coordinates and
    ``ftilde_ss`` in ``st`` coordinates.
    """
    lf = LocalFrame(chart, u, v, DEFAULT_ORDER)
    if lf.coords == "uv":
        f = lf.f
        fu, fv, fuv = f.deriv(1, 0), f.deriv(0, 1), f.deriv(1, 1)
        K_metric = (2 * f.value * fuv - 2 * fu * fv) / f.value ** 4
    else:
        K_metric = lf.ftilde.deriv(2, 0)
    return np.asarray(lf.K.value), np.asarray(lf.kappa.value), np.asarray(K_metric)


RESIDUAL_NAMES = ("r1", "r2", "r3", "r4", "r5", "r6")


def residuals_from_frame(lf, perturb=None):
    """Integrability residuals from an order >= 4 :class:`LocalFrame`.

    ``perturb`` maps coefficient names to constants added before evaluation,
    which fabricates inconsistent frame data for negative controls.
    """
    if lf.order < 4:
        raise ValueError("integrability residuals need an order-4 frame")
    co = {name: getattr(lf, name) for name in COEFFICIENTS}
    for name, delta in (perturb or {}).items():
        if name not in co:
            raise KeyError(f"unknown coefficient {name!r}")
        co[name] = co[name] + delta
    a, b, c, d = co["a"], co["b"], co["c"], co["d"]
    b1, b2, g1, g2 = co["beta1"], co["beta2"], co["gamma1"], co["gamma2"]
    Dx, Dy = lf.Dx, lf.Dy
    res = (
        Dx(c) + c * b1 + 2 * c * g1 - b2,
        Dx(d) - d * b1 + 2 * d * g1,
        Dy(a) + a * b2 + 2 * a * g2 - b1,
        Dy(b) - b * b2 + 2 * b * g2,
        Dx(g2) + Dy(g1) + 2 * g1 * g2 - (a * d + b * c),
        Dx(b2) - Dy(b1) - b1 * g2 + b2 * g1 - (a * d - b * c),
    )
    return np.stack([np.asarray(r.value if isinstance(r, Jet) else r) for r in res])


def integrability_residuals(chart, u, v, perturb=None):
    """Residuals r1..r6 of the Gauss-Codazzi-Ricci system, shape ``(6, *batch)``."""
    return residuals_from_frame(LocalFrame(chart, u, v, 4), perturb)


def beltrami_check(chart, u, v, perturb_H=None):
    """Euclidean norm of ``Laplacian(z) + 2H`` (vanishes identically)."""
    lf = LocalFrame(chart, u, v, DEFAULT_ORDER)
    z = lf.z
    Dxz, Dyz = lf.Dx_vec(z), lf.Dy_vec(z)
    lap = [lf.Dx(yc) + lf.Dy(xc) + lf.gamma1 * yc + lf.gamma2 * xc
           for xc, yc in zip(Dxz, Dyz)]
    lap = vec_values(lap)
    H = vec_values(lf.H)
    if perturb_H is not None:
        H = H + np.asarray(perturb_H, dtype=float).reshape((4,) + (1,) * (H.ndim - 1))
    return np.sqrt(np.sum((lap + 2.0 * H) ** 2, axis=0))


def frame_orthogonality(frame):
    """Largest violation of the defining inner products of a frame."""
    x, y, n1, n2 = frame.x, frame.y, frame.n1, frame.n2
    checks = [inner4(x, x), inner4(y, y), inner4(x, y) + 1.0,
              inner4(n1, n1), inner4(n2, n2), inner4(n1, n2) + 1.0,
              inner4(x, n1), inner4(x, n2), inner4(y, n1), inner4(y, n2)]
    return float(max(np.max(np.abs(c)) for c in checks))
