"""Characteristic (Goursat) problem theta_uv = F(theta + c1 u + c2 v).

The solution on ``[0, U] x [0, V]`` is obtained by trapezoidal marching along
anti-diagonals of a uniform grid, with Picard iteration for the implicit
corner value of every cell.  Each anti-diagonal is processed as one vector.
Grids are halved repeatedly and the node values are Richardson (Romberg)
extrapolated until two successive levels agree.

Besides theta itself the solver carries the pure derivatives
``P_k = d^k theta / du^k`` and ``Q_k = d^k theta / dv^k`` for ``k <= 4``,
obtained from ``d/dv P_k = d^(k-1)/du^(k-1) F(psi)`` and its mirror image.
Mixed derivatives follow from the equation itself, so a full order-4 jet of
theta is available at every node without numerical differentiation.
"""
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .. import expr as ex
from ..charts import Chart
from ..errors import (ChartSpecError, CornerMismatch, InvalidFamilySpec, OutOfDomain,
                      PicardDivergence, QuasiMinimalityViolated)
from ..jets import Jet
from .closed import THETA_UV_TOL, theta_components

MAX_DERIV = 4


@dataclass
class FlatThetaSpec:
    """Data of a characteristic problem for the flat pointwise 1-type family.

    ``F`` is an expression in ``w``; ``p`` and ``q`` give theta on the axes
    ``v = 0`` and ``u = 0``.  ``n`` is the number of cells per side on the
    coarsest grid.
    """

    F: object = "w"
    c1: float = 0.0
    c2: float = 0.0
    p: object = "exp(u)"
    q: object = "exp(v)"
    U: float = 1.0
    V: float = 1.0
    n: int = 16
    tol: float = 1e-9
    picard_tol: float = 1e-12
    max_levels: int = 8

    def __post_init__(self):
        self.F = ex.as_expr(self.F)
        self.p = ex.as_expr(self.p)
        self.q = ex.as_expr(self.q)
        for name, node, allowed in (("F", self.F, {"w"}), ("p", self.p, {"u"}),
                                    ("q", self.q, {"v"})):
            extra = ex.variables(node) - allowed
            if extra:
                raise InvalidFamilySpec(f"{name} may only use {sorted(allowed)}, "
                                        f"found {sorted(extra)}")
        self.n, self.max_levels = int(self.n), int(self.max_levels)
        if not (self.U > 0 and self.V > 0 and self.n >= 2):
            raise InvalidFamilySpec("need U > 0, V > 0 and at least 2 cells")
        self.c1, self.c2 = float(self.c1), float(self.c2)

    def to_json(self):
        return {"builtin": "flat_theta", "F": ex.to_source(self.F),
                "c1": self.c1, "c2": self.c2, "p": ex.to_source(self.p),
                "q": ex.to_source(self.q), "U": self.U, "V": self.V, "n": self.n,
                "tol": self.tol}


@dataclass
class ThetaField:
    """Solved theta with its pure u- and v-derivatives on a node lattice.

    ``P[k]`` holds ``d^k theta/du^k`` and ``Q[k]`` holds ``d^k theta/dv^k``
    (``P[0] = Q[0] = theta``), each of shape ``(len(u), len(v))``.
    """

    spec: FlatThetaSpec
    u: np.ndarray
    v: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    residual: float = 0.0
    levels: int = 0
    history: list = field(default_factory=list)

    @property
    def theta(self):
        return self.P[0]

    def psi(self):
        U, V = np.meshgrid(self.u, self.v, indexing="ij")
        return self.theta + self.spec.c1 * U + self.spec.c2 * V

    def theta_uv(self):
        return _eval_F(self.spec.F, self.psi())

    # persistence --------------------------------------------------------
    def to_csv(self, path):
        cols = (["u", "v", "theta"] + [f"theta_u{k}" for k in range(1, MAX_DERIV + 1)]
                + [f"theta_v{k}" for k in range(1, MAX_DERIV + 1)])
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for i, ui in enumerate(self.u):
                for j, vj in enumerate(self.v):
                    row = ([ui, vj] + [self.P[k, i, j] for k in range(MAX_DERIV + 1)]
                           + [self.Q[k, i, j] for k in range(1, MAX_DERIV + 1)])
                    w.writerow([f"{float(x):.17g}" for x in row])

    @classmethod
    def from_csv(cls, path, spec):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        u = np.unique(data[:, 0])
        v = np.unique(data[:, 1])
        if len(u) * len(v) != len(data):
            raise ChartSpecError(f"{path}: rows do not form a full u-v lattice")
        shape = (len(u), len(v))
        P = np.stack([data[:, 2 + k].reshape(shape) for k in range(MAX_DERIV + 1)])
        Q = np.concatenate([P[:1], np.stack(
            [data[:, 3 + MAX_DERIV + k].reshape(shape) for k in range(MAX_DERIV)])])
        return cls(spec=spec, u=u, v=v, P=P, Q=Q)


def _eval_F(F, w):
    out = ex.evaluate(F, {"w": w})
    if isinstance(out, Jet):
        return out
    return np.broadcast_to(np.asarray(out, dtype=float), np.shape(w)).astype(float)


def _series_derivs(node, x, name, n):
    """Values of the first ``n`` derivatives of a one-variable expression."""
    X = Jet.from_series([x, np.ones_like(x)], axis=0, order=n)
    out = ex.evaluate(node, {name: X})
    if not isinstance(out, Jet):
        out = Jet.constant(np.broadcast_to(out, x.shape), n)
    return np.stack([np.broadcast_to(out.deriv(k, 0), x.shape) for k in range(n + 1)])


def _F_u_derivs(F, psi0, pure, shift, n):
    """d^k/dx^k F(psi) for k < n along one axis, from pure derivatives of theta.

    ``psi0`` is the value of psi, ``pure[k]`` the k-th derivative of theta
    along the axis and ``shift`` the constant added to the first derivative
    of psi (c1 or c2).
    """
    order = max(n - 1, 0)
    coeffs = [psi0]
    for k in range(1, order + 1):
        d = pure[k] + (shift if k == 1 else 0.0)
        coeffs.append(d / math.factorial(k))
    psi = Jet.from_series(coeffs, axis=0, order=order)
    out = _eval_F(F, psi)
    if not isinstance(out, Jet):
        out = Jet.constant(np.broadcast_to(out, pure[0].shape), order)
    return [np.broadcast_to(out.deriv(k, 0), pure[0].shape) for k in range(order + 1)]


def _cumtrapz(y, h, axis):
    y = np.moveaxis(y, axis, 0)
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * h * (y[1:] + y[:-1]), axis=0)
    return np.moveaxis(out, 0, axis)


def _march(spec, N):
    """Trapezoidal marching with Picard iteration on an N x N cell grid."""
    u = np.linspace(0.0, spec.U, N + 1)
    v = np.linspace(0.0, spec.V, N + 1)
    h, k = u[1] - u[0], v[1] - v[0]
    th = np.empty((N + 1, N + 1))
    th[:, 0] = _series_derivs(spec.p, u, "u", 0)[0]
    th[0, :] = _series_derivs(spec.q, v, "v", 0)[0]
    R = np.empty_like(th)
    R[:, 0] = _eval_F(spec.F, th[:, 0] + spec.c1 * u + spec.c2 * v[0])
    R[0, :] = _eval_F(spec.F, th[0, :] + spec.c1 * u[0] + spec.c2 * v)
    w = 0.25 * h * k
    for m in range(2, 2 * N + 1):
        i = np.arange(max(1, m - N), min(m - 1, N) + 1)
        j = m - i
        known = th[i - 1, j] + th[i, j - 1] - th[i - 1, j - 1]
        rsum = R[i - 1, j] + R[i, j - 1] + R[i - 1, j - 1]
        shift = spec.c1 * u[i] + spec.c2 * v[j]
        guess_R = R[i - 1, j] + R[i, j - 1] - R[i - 1, j - 1]
        cur = known + w * (rsum + guess_R)
        for it in range(200):
            Rn = _eval_F(spec.F, cur + shift)
            new = known + w * (rsum + Rn)
            delta = np.max(np.abs(new - cur))
            cur = new
            if not np.all(np.isfinite(cur)):
                break
            if delta <= spec.picard_tol * max(1.0, np.max(np.abs(cur))):
                break
        else:
            it = -1
        if it < 0 or not np.all(np.isfinite(cur)):
            raise PicardDivergence(
                f"Picard iteration failed on anti-diagonal {m} of a {N}x{N} grid; "
                "the Lipschitz constant of F times the cell area is too large, "
                "use a smaller cell (larger n) or a smaller rectangle",
                diagonal=m, cells=N, cell_area=h * k)
        th[i, j] = cur
        R[i, j] = _eval_F(spec.F, cur + shift)
    return u, v, th, R


def _derivative_fields(spec, u, v, th):
    """Pure derivative fields P_k, Q_k (k <= 4) on one grid."""
    h, k = u[1] - u[0], v[1] - v[0]
    pd = _series_derivs(spec.p, u, "u", MAX_DERIV)
    qd = _series_derivs(spec.q, v, "v", MAX_DERIV)
    Um, Vm = np.meshgrid(u, v, indexing="ij")
    psi = th + spec.c1 * Um + spec.c2 * Vm
    P = [th]
    for n in range(1, MAX_DERIV + 1):
        G = _F_u_derivs(spec.F, psi, P, spec.c1, n)[n - 1]
        P.append(pd[n][:, None] + _cumtrapz(np.broadcast_to(G, th.shape), k, axis=1))
    Q = [th]
    for n in range(1, MAX_DERIV + 1):
        Qt = [q.T for q in Q]
        G = _F_u_derivs(spec.F, psi.T, Qt, spec.c2, n)[n - 1]
        G = np.broadcast_to(G, th.T.shape)
        Q.append((qd[n][:, None] + _cumtrapz(G, h, axis=1)).T)
    return np.stack(P), np.stack(Q)


def goursat_solve(spec):
    """Solve the characteristic problem and return a :class:`ThetaField`.

    Raises :class:`CornerMismatch` when ``p(0) != q(0)``,
    :class:`QuasiMinimalityViolated` when ``theta_uv`` vanishes at a node and
    :class:`PicardDivergence` when the implicit cell equation does not
    converge.
    """
    p0 = float(_series_derivs(spec.p, np.zeros(1), "u", 0)[0, 0])
    q0 = float(_series_derivs(spec.q, np.zeros(1), "v", 0)[0, 0])
    if abs(p0 - q0) > 1e-12:
        raise CornerMismatch(f"p(0) = {p0!r} but q(0) = {q0!r}", p0=p0, q0=q0)

    tables = []
    history = []
    base = spec.n
    coarse = None
    for level in range(spec.max_levels):
        N = base * 2 ** level
        u, v, th, R = _march(spec, N)
        if level == 0:
            kk = np.unravel_index(np.argmin(np.abs(R)), R.shape)
            if abs(R[kk]) <= THETA_UV_TOL:
                raise QuasiMinimalityViolated(
                    "theta_uv = F(psi) vanishes, so the mean curvature vector is zero",
                    u=u[kk[0]], v=v[kk[1]], theta_uv=float(R[kk]))
            coarse = (u, v)
        P, Q = _derivative_fields(spec, u, v, th)
        stride = 2 ** level
        fields = np.concatenate([P, Q[1:]])[:, ::stride, ::stride]
        row = [fields]
        for j, prev in enumerate(tables[-1] if tables else []):
            row.append(row[j] + (row[j] - prev) / (4.0 ** (j + 1) - 1.0))
        tables.append(row)
        if level >= 1:
            diff = np.abs(row[-1] - tables[-2][-1])
            scale = np.maximum(1.0, np.max(np.abs(row[-1]), axis=(1, 2)))[:, None, None]
            change = float(np.max(diff / scale))
            history.append(change)
            if change <= spec.tol:
                best = row[-1]
                return ThetaField(spec=spec, u=coarse[0], v=coarse[1],
                                  P=best[:MAX_DERIV + 1],
                                  Q=np.concatenate([best[:1], best[MAX_DERIV + 1:]]),
                                  residual=change, levels=level + 1, history=history)
    raise PicardDivergence(
        f"grid refinement did not reach {spec.tol:g} after {spec.max_levels} levels "
        f"(last change {history[-1]:.3e})", history=history)


def theta_jet(field, i, j, order):
    """Jet of theta at lattice nodes (index arrays ``i``, ``j``), order <= 4."""
    if order > MAX_DERIV:
        raise ValueError(f"theta jets are available up to order {MAX_DERIV}")
    spec = field.spec
    i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
    c = np.zeros((order + 1, order + 1) + i.shape)
    for k in range(order + 1):
        c[k, 0] = field.P[k][i, j] / math.factorial(k)
        c[0, k] = field.Q[k][i, j] / math.factorial(k)
    if order >= 2:
        inner = theta_jet(field, i, j, order - 2)
        U, V = Jet.variables(field.u[i], field.v[j], order - 2)
        psi = inner + spec.c1 * U + spec.c2 * V
        Fj = _eval_F(spec.F, psi)
        if not isinstance(Fj, Jet):
            Fj = Jet.constant(np.broadcast_to(Fj, i.shape), order - 2)
        for a in range(1, order + 1):
            for b in range(1, order + 1 - a):
                c[a, b] = Fj.c[a - 1, b - 1] / (a * b)
    return Jet(c, order)


class GridThetaChart(Chart):
    """Flat chart built from a solved :class:`ThetaField`.

    Jets exist only at lattice nodes, so the chart snaps sample grids to the
    nearest nodes and rejects other evaluation points.
    """

    def __init__(self, field, label=None):
        super().__init__(((field.u[0], field.u[-1]), (field.v[0], field.v[-1])),
                         coords="uv", label=label or "flat_theta")
        self.field = field
        tuv = np.asarray(field.theta_uv())
        kk = np.unravel_index(np.argmin(np.abs(tuv)), tuv.shape)
        if abs(tuv[kk]) <= THETA_UV_TOL:
            raise QuasiMinimalityViolated(
                "theta_uv vanishes, so the mean curvature vector is zero",
                u=field.u[kk[0]], v=field.v[kk[1]], theta_uv=float(tuv[kk]))
        self._comps = theta_components(ex.Var("w"))

    def _index(self, x, axis_vals):
        x = np.asarray(x, dtype=float)
        h = axis_vals[1] - axis_vals[0]
        idx = np.rint((x - axis_vals[0]) / h).astype(int)
        if np.any(idx < 0) or np.any(idx >= len(axis_vals)) or \
                np.any(np.abs(axis_vals[np.clip(idx, 0, len(axis_vals) - 1)] - x) > 1e-9 * h):
            raise OutOfDomain("a solved theta field can only be evaluated at its "
                              "lattice nodes")
        return idx

    def jet(self, u, v, order=3):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        i, j = self._index(u, self.field.u), self._index(v, self.field.v)
        th = theta_jet(self.field, i, j, order)
        U, V = Jet.variables(u, v, order)
        env = {"w": th, "u": U, "v": V}
        return [ex.evaluate(c, env) for c in self._comps]

    def sample_points(self, grid):
        us, vs = grid.axes(self.domain)
        snap = lambda x, a: a[np.clip(np.rint((x - a[0]) / (a[1] - a[0])).astype(int),  # noqa: E731
                                      0, len(a) - 1)]
        us, vs = snap(us, self.field.u), snap(vs, self.field.v)
        U, V = np.meshgrid(us, vs, indexing="ij")
        return U.ravel(), V.ravel()

    def to_json(self):
        out = super().to_json()
        out.update(self.field.spec.to_json())
        out["nodes"] = [len(self.field.u), len(self.field.v)]
        out["refinement_change"] = self.field.residual
        return out


def field_difference(a, b):
    """Largest scaled difference between two theta fields on the same lattice."""
    if a.P.shape != b.P.shape:
        return float("inf")
    fa = np.concatenate([a.P, a.Q[1:]])
    fb = np.concatenate([b.P, b.Q[1:]])
    scale = np.maximum(1.0, np.max(np.abs(fa), axis=(1, 2)))[:, None, None]
    return float(np.max(np.abs(fa - fb) / scale))
