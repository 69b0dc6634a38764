"""Non-flat quasi-minimal surfaces with flat normal connection.

Such a surface is determined by two functions ``lambda1(t)``, ``lambda3(t)``
and the curves ``n1(t)``, ``xi(t)`` in E^4_2 through

    z(s, t) = -s lambda3 n1' - 3 sqrt(6) lambda3 sqrt(-s lambda1) / lambda1^2 n1 + xi.

The curves solve the linear system

    n1''  = A n1' - n1 / lambda3,
    xi''' = alpha n1 + beta n1' - Q xi' - P xi'',

with coefficients built from ``lambda1``, ``lambda3`` and their first two
derivatives (see :func:`system_coefficients`).  The state
``Y = (n1, n1', xi, xi', xi'')`` is integrated with classical RK4 and
step-halving error control; the chart evaluates anywhere in ``t`` by a
Taylor expansion of the linear system around the nearest node.
"""
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .. import expr as ex
from ..algebra import flip, inner4, null_frame_completion
from ..charts import Chart
from ..errors import ChartSpecError, ConstraintDrift, DomainViolation, InvalidFamilySpec
from ..jets import Jet, power, reciprocal, sqrt

STATE_ROWS = ("n1", "n1p", "xi", "xip", "xipp")
CONSTRAINT_NAMES = ("<n1,n1>", "<n1',n1'>", "<n1,xi'>", "<xi',xi'>",
                    "<n1',xi'> - 1/lambda3")
LAMBDA_MIN = 1e-8
TAYLOR_EXTRA = 10


def _as_t_expr(obj, name):
    node = ex.as_expr(obj)
    extra = ex.variables(node) - {"t"}
    if extra:
        raise InvalidFamilySpec(f"{name} may only depend on t, found {sorted(extra)}")
    return node


def lambda_jet(node, t, order):
    """Jet in t (second jet variable) of a one-variable expression."""
    if isinstance(t, Jet):
        T = t
    else:
        _, T = Jet.variables(np.zeros_like(np.asarray(t, float)), t, order)
    out = ex.evaluate(node, {"t": T})
    if not isinstance(out, Jet):
        out = Jet.constant(np.broadcast_to(out, T.shape), T.order)
    return out


def system_coefficients(l1, l3):
    """Coefficients (A, P, Q, alpha, beta) from jets of lambda1 and lambda3.

    The result has two orders less than the inputs (second derivatives of
    the lambdas enter).
    """
    l1p, l3p = l1.dv(), l3.dv()
    l1pp, l3pp = l1p.dv(), l3p.dv()
    n = l1pp.order
    l1, l3, l1p, l3p = (j.truncate(n) for j in (l1, l3, l1p, l3p))
    i1, i3 = reciprocal(l1), reciprocal(l3)
    A = l3p * i3 - 3.0 * l1p * i1
    P = 3.0 * l3p * i3 - 3.0 * l1p * i1
    Q = ((-3.0 * l1 * (l1p * l3p + l3 * l1pp) + 3.0 * l3 * l1p * l1p
          + l1 * l1 * (2.0 * l3pp + 1.0)) * i1 * i1 * i3)
    alpha = 81.0 * (8.0 * l1p * l1p * l3 * l3 - 2.0 * l1 * l1pp * l3 * l3
                    + l1 * l1 * l3 * l3pp - 7.0 * l1 * l1p * l3 * l3p
                    + l1 * l1 * l3p * l3p) * power(i1, 5) * i3
    beta = 162.0 * (l1 * l3p - 2.0 * l3 * l1p) * power(i1, 4)
    return A, P, Q, alpha, beta, i3


def _matrix_series(A, P, Q, alpha, beta, i3):
    """Taylor coefficients in t of the 5x5 system matrix, shape (K+1, *batch, 5, 5)."""
    K = A.order
    shape = A.shape
    M = np.zeros((K + 1,) + shape + (5, 5))
    ser = lambda j: np.moveaxis(np.broadcast_to(j.c[0, :K + 1], (K + 1,) + shape), 0, 0)  # noqa: E731
    M[0, ..., 0, 1] = 1.0
    M[0, ..., 2, 3] = 1.0
    M[0, ..., 3, 4] = 1.0
    M[..., 1, 0] = -ser(i3)
    M[..., 1, 1] = ser(A)
    M[..., 4, 0] = ser(alpha)
    M[..., 4, 1] = ser(beta)
    M[..., 4, 3] = -ser(Q)
    M[..., 4, 4] = -ser(P)
    return M


@dataclass
class NonFlatSpec:
    """Input of the non-flat construction (lambda2 is normalised to 0).

    ``n1``, ``n1p``, ``xi`` are the values at ``t0``; ``xip`` and ``xipp`` are
    completed by :func:`nonflat_initial_data` when left as ``None``.
    """

    lambda1: object = "-3/2"
    lambda3: object = "1"
    s_range: tuple = (1.0, 9.0)
    t_range: tuple = (0.0, 2.0 * math.pi)
    t0: float = None
    n1: tuple = (1.0, 0.0, 0.0, 1.0)
    n1p: tuple = (0.0, 1.0, 1.0, 0.0)
    xi: tuple = (0.0, 0.0, 0.0, 0.0)
    xip: tuple = None
    xipp: tuple = None
    step: float = 1e-3
    local_tol: float = 1e-10
    drift_tol: float = 1e-6
    project: bool = False

    def __post_init__(self):
        self.lambda1 = _as_t_expr(self.lambda1, "lambda1")
        self.lambda3 = _as_t_expr(self.lambda3, "lambda3")
        self.s_range = tuple(float(x) for x in self.s_range)
        self.t_range = tuple(float(x) for x in self.t_range)
        if self.t0 is None:
            self.t0 = self.t_range[0]
        self.t0 = float(self.t0)
        if not (self.s_range[1] > self.s_range[0] and self.t_range[1] > self.t_range[0]):
            raise InvalidFamilySpec("s and t ranges must be non-empty intervals")
        if not self.t_range[0] <= self.t0 <= self.t_range[1]:
            raise InvalidFamilySpec("t0 must lie in the t range")
        if not 0 < self.step <= 1e-3:
            raise InvalidFamilySpec("step must lie in (0, 1e-3]")

    def lambdas(self, t):
        """Values of lambda1 and lambda3 at t."""
        t = np.asarray(t, dtype=float)
        return (lambda_jet(self.lambda1, t, 0).value,
                lambda_jet(self.lambda3, t, 0).value)

    def to_json(self):
        vec = lambda x: None if x is None else [float(c) for c in x]  # noqa: E731
        return {"builtin": "nonflat", "lambda1": ex.to_source(self.lambda1),
                "lambda3": ex.to_source(self.lambda3),
                "s": list(self.s_range), "t": list(self.t_range), "t0": self.t0,
                "n1": vec(self.n1), "n1p": vec(self.n1p), "xi": vec(self.xi),
                "xip": vec(self.xip), "xipp": vec(self.xipp), "step": self.step,
                "project": self.project}


def nonflat_initial_data(lambda1, lambda3, t0, n1=(1.0, 0.0, 0.0, 1.0),
                         n1p=(0.0, 1.0, 1.0, 0.0)):
    """Initial block ``(n1, n1', xi', xi'')`` at ``t0``.

    ``xi'`` is lightlike, orthogonal to ``n1`` and paired with ``n1'`` to
    ``1/lambda3``.  ``xi''`` is chosen so that the first derivatives of the
    five constraints also vanish at ``t0`` and, in addition, the pairings of
    ``xi''`` with itself and with ``xi'`` match what the system propagates;
    with these conditions the constraints hold for all t.
    """
    l1n, l3n = _as_t_expr(lambda1, "lambda1"), _as_t_expr(lambda3, "lambda3")
    l1 = lambda_jet(l1n, t0, 2)
    l3 = lambda_jet(l3n, t0, 2)
    if abs(float(l1.value)) < LAMBDA_MIN or abs(float(l3.value)) < LAMBDA_MIN:
        raise InvalidFamilySpec("lambda1 and lambda3 must not vanish at t0",
                                lambda1=float(l1.value), lambda3=float(l3.value))
    A, _, _, _, beta, _ = system_coefficients(l1, l3)
    lam3 = float(l3.value)
    dl3 = float(l3.deriv(0, 1))
    k, m = null_frame_completion(n1, n1p, 1.0)
    n1 = np.asarray(n1, dtype=float)
    n1p = np.asarray(n1p, dtype=float)
    e = -dl3 / lam3 ** 2 - float(A.value) / lam3
    xip = k / lam3
    xipp = 0.5 * float(beta.value) * n1 + e * k - m / lam3
    return n1, n1p, xip, xipp


def constraint_residuals(Y, lam3):
    """The five constraint values (should vanish) for states ``Y`` (..., 5, 4)."""
    Y = np.asarray(Y)
    n1, n1p, xip = Y[..., 0, :], Y[..., 1, :], Y[..., 3, :]
    ip = lambda a, b: inner4(np.moveaxis(a, -1, 0), np.moveaxis(b, -1, 0))  # noqa: E731
    return np.stack([ip(n1, n1), ip(n1p, n1p), ip(n1, xip), ip(xip, xip),
                     ip(n1p, xip) - 1.0 / lam3])


def _project(Y, lam3):
    """One Gauss-Newton step of Y onto the constraint set (min-norm update)."""
    r = constraint_residuals(Y, lam3)
    J = np.zeros((5, 5, 4))
    pairs = ((0, 0), (1, 1), (0, 3), (3, 3), (1, 3))
    for row, (a, b) in enumerate(pairs):
        J[row, a] += flip(Y[b])
        J[row, b] += flip(Y[a])
    delta, *_ = np.linalg.lstsq(J.reshape(5, 20), -r, rcond=None)
    return Y + delta.reshape(5, 4)


def _rk4(M0, Mh, M1, Y, h):
    k1 = M0 @ Y
    k2 = Mh @ (Y + 0.5 * h * k1)
    k3 = Mh @ (Y + 0.5 * h * k2)
    k4 = M1 @ (Y + h * k3)
    return Y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


class NonflatChart(Chart):
    """Chart in ``(s, t)`` coordinates from an integrated trajectory."""

    def __init__(self, spec, t_nodes, Y_nodes, stats=None):
        super().__init__((spec.s_range, spec.t_range), coords="st", label="nonflat")
        self.spec = spec
        self.t_nodes = np.asarray(t_nodes, dtype=float)
        self.Y_nodes = np.asarray(Y_nodes, dtype=float)
        self.stats = dict(stats or {})
        _, lam3 = spec.lambdas(self.t_nodes)
        res = np.abs(constraint_residuals(self.Y_nodes, np.broadcast_to(lam3, self.t_nodes.shape)))
        k = np.unravel_index(np.argmax(res), res.shape)
        self.drift = float(res[k])
        self.drift_at = {"t": float(self.t_nodes[k[1]]), "constraint": CONSTRAINT_NAMES[k[0]]}

    # dense evaluation -----------------------------------------------------
    def state_series(self, t, order):
        """Normalised Taylor coefficients of Y at the points t, shape (order+1, *t.shape, 5, 4)."""
        t = np.asarray(t, dtype=float)
        nodes = self.t_nodes
        right = np.clip(np.searchsorted(nodes, t), 1, len(nodes) - 1)
        idx = np.where(np.abs(t - nodes[right - 1]) <= np.abs(nodes[right] - t),
                       right - 1, right)
        tn = self.t_nodes[idx]
        delta = t - tn
        K = order + TAYLOR_EXTRA
        l1 = lambda_jet(self.spec.lambda1, tn, K + 2)
        l3 = lambda_jet(self.spec.lambda3, tn, K + 2)
        M = _matrix_series(*system_coefficients(l1, l3))
        Y = np.zeros((K + 1,) + t.shape + (5, 4))
        Y[0] = self.Y_nodes[idx]
        for k in range(K):
            acc = np.zeros(t.shape + (5, 4))
            for i in range(k + 1):
                acc += M[i] @ Y[k - i]
            Y[k + 1] = acc / (k + 1)
        out = np.zeros((order + 1,) + t.shape + (5, 4))
        for mm in range(order + 1):
            for k in range(K, mm - 1, -1):
                out[mm] = out[mm] * delta[..., None, None] + math.comb(k, mm) * Y[k]
        return out

    def state_at(self, t):
        return self.state_series(t, 0)[0]

    def jet(self, s, t, order=3):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        S, T = Jet.variables(s, t, order)
        l1 = lambda_jet(self.spec.lambda1, T, order)
        l3 = lambda_jet(self.spec.lambda3, T, order)
        rad = -(np.asarray(s) * l1.value)
        if np.any(rad <= 0):
            k = int(np.argmin(np.ravel(rad)))
            raise DomainViolation("-lambda1(t) s must be positive",
                                  s=float(np.ravel(s)[k]), t=float(np.ravel(t)[k]),
                                  radicand=float(np.ravel(rad)[k]))
        ser = self.state_series(t, order)
        comp = lambda row, c: Jet.from_series(ser[:, ..., row, c], axis=1, order=order)  # noqa: E731
        coef = 3.0 * math.sqrt(6.0) * l3 * sqrt(-(S * l1)) * power(reciprocal(l1), 2)
        z = []
        for c in range(4):
            z.append(-(S * l3 * comp(1, c)) - coef * comp(0, c) + comp(2, c))
        return z

    # persistence ----------------------------------------------------------
    def to_csv(self, path):
        cols = ["t"] + [f"{r}_{c}" for r in STATE_ROWS for c in range(4)]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for t, Y in zip(self.t_nodes, self.Y_nodes):
                w.writerow([f"{float(x):.17g}" for x in [t, *Y.ravel()]])

    @classmethod
    def from_csv(cls, path, spec):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 21 or len(data) < 2:
            raise ChartSpecError(f"{path}: expected a t column and 20 state columns")
        return cls(spec, data[:, 0], data[:, 1:].reshape(-1, 5, 4),
                   stats={"source": str(path)})

    def to_json(self):
        out = super().to_json()
        out.update(self.spec.to_json())
        out["integration"] = dict(self.stats, max_constraint_drift=self.drift,
                                  drift_location=self.drift_at)
        return out


def _M_values(spec, t):
    l1 = lambda_jet(spec.lambda1, t, 2)
    l3 = lambda_jet(spec.lambda3, t, 2)
    return _matrix_series(*system_coefficients(l1, l3))[0]


def _integrate_direction(spec, Y0, t0, t1, stats):
    """RK4 from t0 to t1 (either direction) with step halving; returns nodes."""
    span = t1 - t0
    if span == 0:
        return np.array([t0]), Y0[None]
    n = max(1, int(math.ceil(abs(span) / spec.step - 1e-9)))
    h = span / n
    tq = t0 + h * np.arange(4 * n + 1) / 4.0
    Mq = _M_values(spec, tq)
    ts = t0 + h * np.arange(n + 1)
    _, lam3 = spec.lambdas(ts)
    lam3 = np.broadcast_to(lam3, ts.shape)
    Ys = np.empty((n + 1, 5, 4))
    Ys[0] = Y0

    def adaptive(t, Y, hh, Ms, depth):
        # Ms holds the system matrix at t + hh * (0, 1/4, 1/2, 3/4, 1)
        full = _rk4(Ms[0], Ms[2], Ms[4], Y, hh)
        half = _rk4(Ms[0], Ms[1], Ms[2], Y, hh / 2)
        half = _rk4(Ms[2], Ms[3], Ms[4], half, hh / 2)
        err = np.max(np.abs(full - half)) / max(1.0, np.max(np.abs(half)))
        if err <= spec.local_tol or depth >= 20:
            stats["max_local_error"] = max(stats["max_local_error"], err)
            return half
        stats["halvings"] += 1
        left = _M_values(spec, t + hh * np.array([0, 1, 2, 3, 4]) / 8.0)
        right = _M_values(spec, t + hh * np.array([4, 5, 6, 7, 8]) / 8.0)
        mid = adaptive(t, Y, hh / 2, left, depth + 1)
        return adaptive(t + hh / 2, mid, hh / 2, right, depth + 1)

    for i in range(n):
        Y = adaptive(ts[i], Ys[i], h, Mq[4 * i:4 * i + 5], 0)
        if spec.project:
            Y = _project(Y, lam3[i + 1])
        Ys[i + 1] = Y
    return ts, Ys


def nonflat_integrate(spec):
    """Integrate the curve system and return a :class:`NonflatChart`.

    Raises :class:`DomainViolation` if ``-lambda1(t) s`` is not positive on
    the whole rectangle, :class:`InvalidFamilySpec` if a lambda gets close to
    zero, and :class:`ConstraintDrift` if the constraints drift beyond
    ``spec.drift_tol`` along the trajectory.
    """
    probe = np.linspace(spec.t_range[0], spec.t_range[1],
                        int(math.ceil((spec.t_range[1] - spec.t_range[0]) / spec.step)) + 1)
    l1, l3 = (np.broadcast_to(x, probe.shape) for x in spec.lambdas(probe))
    for name, val in (("lambda1", l1), ("lambda3", l3)):
        k = int(np.argmin(np.abs(val)))
        if not np.isfinite(val[k]) or abs(val[k]) < LAMBDA_MIN:
            raise InvalidFamilySpec(f"{name} vanishes near t = {probe[k]:.6g}",
                                    t=float(probe[k]), value=float(val[k]))
    for s in spec.s_range:
        rad = -l1 * s
        k = int(np.argmin(rad))
        if rad[k] <= 0:
            raise DomainViolation("-lambda1(t) s must be positive on the whole "
                                  "rectangle", s=s, t=float(probe[k]),
                                  radicand=float(rad[k]))

    n1, n1p, xip, xipp = nonflat_initial_data(spec.lambda1, spec.lambda3, spec.t0,
                                              spec.n1, spec.n1p)
    if spec.xip is not None:
        xip = np.asarray(spec.xip, dtype=float)
    if spec.xipp is not None:
        xipp = np.asarray(spec.xipp, dtype=float)
    Y0 = np.stack([n1, n1p, np.asarray(spec.xi, dtype=float), xip, xipp])

    stats = {"halvings": 0, "max_local_error": 0.0, "projected": bool(spec.project)}
    tb, Yb = _integrate_direction(spec, Y0, spec.t0, spec.t_range[0], stats)
    tf, Yf = _integrate_direction(spec, Y0, spec.t0, spec.t_range[1], stats)
    t_nodes = np.concatenate([tb[::-1], tf[1:]])
    Y_nodes = np.concatenate([Yb[::-1], Yf[1:]])
    stats["steps"] = len(t_nodes) - 1
    stats["step"] = float(np.max(np.diff(t_nodes)))
    chart = NonflatChart(spec, t_nodes, Y_nodes, stats)
    if chart.drift > spec.drift_tol:
        raise ConstraintDrift(f"constraint {chart.drift_at['constraint']} drifted to "
                              f"{chart.drift:.3e} at t = {chart.drift_at['t']:.6g}",
                              magnitude=chart.drift, **chart.drift_at)
    return chart


def coefficient_functions(lambda1, lambda3, s, t, lambda2=0.0, order=None):
    """Closed-form frame coefficients of the non-flat family.

    Returns a dict with ``a``, ``c``, ``d``, ``beta2``, ``ftilde`` and ``K``.
    Values are returned for plain ``s, t``; with ``order`` given, jets of that
    order in ``(s, t)`` are returned instead, which lets callers check the
    coefficient relations by differentiation.
    """
    nodes = [_as_t_expr(x, n) for x, n in ((lambda1, "lambda1"), (lambda3, "lambda3"),
                                           (lambda2, "lambda2"))]
    n = 0 if order is None else order
    S, T = Jet.variables(s, t, n + 1)
    l1, l3, l2 = (lambda_jet(node, T, n + 1) for node in nodes)
    l1p, l3p, l2p = l1.dv(), l3.dv(), l2.dv()
    l1, l3, l2, S = (j.truncate(n) for j in (l1, l3, l2, S))
    if np.any(np.abs(l1.value) < LAMBDA_MIN) or np.any(np.abs(l3.value) < LAMBDA_MIN):
        raise InvalidFamilySpec("lambda1 and lambda3 must be non-zero")
    R = -(2.0 / 3.0) * l1 * S - (2.0 / 3.0) * l2
    if np.any(np.asarray(R.value) <= 0):
        raise DomainViolation("-(2/3) lambda1 s - (2/3) lambda2 must be positive",
                              radicand=float(np.min(R.value)))
    i1, i3 = reciprocal(l1), reciprocal(l3)
    rR = sqrt(R)
    K = power(R, -1.5)
    out = {
        "a": l3 * K,
        "d": i3 + 0.0 * S,
        "c": -9.0 * i1 * i1 * rR,
        "beta2": 3.0 * i1 * reciprocal(rR),
        "ftilde": (-9.0 * i1 * i1 * rR - (2.0 * l3p * i3 - 3.0 * l1p * i1) * S
                   - l2p * i1 - 2.0 * l2 * i1 * l3p * i3 + 4.0 * l2 * i1 * l1p * i1),
        "K": K,
    }
    if order is None:
        return {k: np.asarray(v.value) for k, v in out.items()}
    return out


def st_integrability(lambda1, lambda3, s, t):
    """Residuals of c_s = beta2, d_s = 0, (beta2)_s = K and ftilde_ss = K."""
    co = coefficient_functions(lambda1, lambda3, s, t, order=3)
    K = np.asarray(co["K"].value)
    return {"c_s - beta2": co["c"].deriv(1, 0) - co["beta2"].value,
            "d_s": co["d"].deriv(1, 0),
            "beta2_s - K": co["beta2"].deriv(1, 0) - K,
            "ftilde_ss - K": co["ftilde"].deriv(2, 0) - K}
