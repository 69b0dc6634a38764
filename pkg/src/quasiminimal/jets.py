"""Truncated bivariate Taylor arithmetic (forward-mode jets).

A :class:`Jet` of order ``n`` stores the normalised Taylor coefficients
``c[i, j] = d^(i+j) f / du^i dv^j / (i! j!)`` for ``i + j <= n`` of a function
of two parameters at an expansion point.  Coefficient arrays may carry extra
trailing batch axes, so one jet object can describe a whole grid of points
at once.  Order 3 (ten coefficients) is the working order for Gauss-map
Laplacians; order 4 is used where a derivative of a second-order frame
quantity is needed.

The module also exposes scalar functions (``exp``, ``sin`` ...) that accept
either jets or plain numbers/arrays, and a finite-difference oracle used to
cross-check jets in tests.
"""
import math

import numpy as np

from .errors import DivisionBySingularJet, DomainError, OutOfDomain

DEFAULT_ORDER = 3

_MASKS = {}


def _mask(n):
    m = _MASKS.get(n)
    if m is None:
        i, j = np.indices((n + 1, n + 1))
        m = (i + j <= n).astype(float)
        _MASKS[n] = m
    return m


def _expand(mask, ndim):
    return mask.reshape(mask.shape + (1,) * (ndim - 2))


class Jet:
    """Truncated Taylor expansion in two parameters, possibly batched."""

    __slots__ = ("c", "order")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, coeffs, order=None):
        coeffs = np.asarray(coeffs, dtype=float)
        if order is None:
            order = coeffs.shape[0] - 1
        if coeffs.shape[0] != order + 1 or coeffs.shape[1] != order + 1:
            raise ValueError("coefficient array must be (order+1, order+1, ...)")
        self.c = coeffs
        self.order = order

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, order=DEFAULT_ORDER):
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1, order + 1) + value.shape)
        c[0, 0] = value
        return cls(c, order)

    @classmethod
    def variables(cls, u0, v0, order=DEFAULT_ORDER):
        """Seeded jets of the two coordinates at (u0, v0)."""
        u0, v0 = np.broadcast_arrays(np.asarray(u0, float), np.asarray(v0, float))
        U = cls.constant(u0, order)
        V = cls.constant(v0, order)
        if order >= 1:
            U.c[1, 0] = 1.0
            V.c[0, 1] = 1.0
        return U, V

    @classmethod
    def from_series(cls, coeffs, axis=1, order=DEFAULT_ORDER):
        """Jet of a function of one parameter given its Taylor coefficients.

        ``coeffs[k]`` is the k-th normalised coefficient (derivative / k!);
        ``axis`` 0 means the function depends on u, 1 means on v.
        """
        coeffs = [np.asarray(a, dtype=float) for a in coeffs]
        shape = np.broadcast_shapes(*[a.shape for a in coeffs])
        c = np.zeros((order + 1, order + 1) + shape)
        for k, a in enumerate(coeffs[:order + 1]):
            if axis == 0:
                c[k, 0] = a
            else:
                c[0, k] = a
        return cls(c, order)

    # accessors ----------------------------------------------------------
    @property
    def value(self):
        return self.c[0, 0]

    @property
    def shape(self):
        return self.c.shape[2:]

    def deriv(self, i, j):
        """Partial derivative d^(i+j)/du^i dv^j at the expansion point."""
        if i + j > self.order:
            raise ValueError(f"derivative ({i},{j}) exceeds jet order {self.order}")
        return self.c[i, j] * math.factorial(i) * math.factorial(j)

    def du(self):
        """Jet of the u-derivative (one order lower)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        n = self.order - 1
        k = np.arange(1, n + 2, dtype=float)
        c = self.c[1:, :n + 1] * _expand(k[:, None], self.c.ndim)
        return Jet(c * _expand(_mask(n), c.ndim), n)

    def dv(self):
        """Jet of the v-derivative (one order lower)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        n = self.order - 1
        k = np.arange(1, n + 2, dtype=float)
        c = self.c[:n + 1, 1:] * _expand(k[None, :], self.c.ndim)
        return Jet(c * _expand(_mask(n), c.ndim), n)

    def truncate(self, order):
        if order >= self.order:
            return self
        c = self.c[:order + 1, :order + 1]
        return Jet(c * _expand(_mask(order), c.ndim), order)

    def __getitem__(self, index):
        """Select batch entries (index applies to the batch axes)."""
        if not isinstance(index, tuple):
            index = (index,)
        return Jet(self.c[(slice(None), slice(None)) + index], self.order)

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.value!r})"

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __pos__(self):
        return self

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            if np.broadcast_shapes(other.shape, self.shape) == self.shape:
                c = self.c.copy()
                c[0, 0] = c[0, 0] + other
                return Jet(c, self.order)
            other = Jet.constant(other, self.order)
        a, b = _common(self, other)
        return Jet(a + b, a.shape[0] - 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            return Jet(self.c * other, self.order)
        a, b = _common(self, other)
        return Jet(_mul(a, b, a.shape[0] - 1), a.shape[0] - 1)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            if np.any(np.abs(other) <= 1e-300):
                raise DivisionBySingularJet("division by a zero constant")
            return Jet(self.c / other, self.order)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, r):
        return power(self, r)


def _common(a, b):
    n = min(a.order, b.order)
    ac = a.c[:n + 1, :n + 1]
    bc = b.c[:n + 1, :n + 1]
    nd = max(ac.ndim, bc.ndim)
    ac = ac.reshape(ac.shape[:2] + (1,) * (nd - ac.ndim) + ac.shape[2:]) \
        if ac.ndim < nd else ac
    bc = bc.reshape(bc.shape[:2] + (1,) * (nd - bc.ndim) + bc.shape[2:]) \
        if bc.ndim < nd else bc
    return ac, bc


def _mul(a, b, n):
    shape = (n + 1, n + 1) + np.broadcast_shapes(a.shape[2:], b.shape[2:])
    out = np.zeros(shape)
    for k in range(n + 1):
        for l in range(n + 1 - k):
            out[k:, l:] += a[k, l] * b[:n + 1 - k, :n + 1 - l]
    return out * _expand(_mask(n), out.ndim)


def _compose(a, derivs):
    """f(a) from the derivatives f^(k)(a0), k = 0..order (Horner in a - a0)."""
    n = a.order
    delta = Jet(a.c.copy(), n)
    delta.c[0, 0] = 0.0
    out = Jet.constant(derivs[n] / math.factorial(n), n)
    for k in range(n - 1, -1, -1):
        out = out * delta
        out.c[0, 0] = out.c[0, 0] + derivs[k] / math.factorial(k)
    return out


# scalar functions: accept jets or numbers/arrays -----------------------

def reciprocal(a):
    if isinstance(a, Jet):
        x = a.value
        if np.any(np.abs(x) <= 1e-300):
            raise DivisionBySingularJet("jet value part is zero")
        derivs = [(-1) ** k * math.factorial(k) / x ** (k + 1)
                  for k in range(a.order + 1)]
        return _compose(a, derivs)
    a = np.asarray(a, dtype=float)
    if np.any(np.abs(a) <= 1e-300):
        raise DivisionBySingularJet("division by zero")
    return 1.0 / a


def exp(a):
    if isinstance(a, Jet):
        e = np.exp(a.value)
        return _compose(a, [e] * (a.order + 1))
    return np.exp(a)


def sin(a):
    if isinstance(a, Jet):
        s, c = np.sin(a.value), np.cos(a.value)
        cycle = [s, c, -s, -c]
        return _compose(a, [cycle[k % 4] for k in range(a.order + 1)])
    return np.sin(a)


def cos(a):
    if isinstance(a, Jet):
        s, c = np.sin(a.value), np.cos(a.value)
        cycle = [c, -s, -c, s]
        return _compose(a, [cycle[k % 4] for k in range(a.order + 1)])
    return np.cos(a)


def log(a):
    x = a.value if isinstance(a, Jet) else np.asarray(a, dtype=float)
    if np.any(x <= 0):
        raise DomainError("log of a non-positive value", value=np.min(x))
    if isinstance(a, Jet):
        derivs = [np.log(x)] + [(-1) ** (k - 1) * math.factorial(k - 1) / x ** k
                                for k in range(1, a.order + 1)]
        return _compose(a, derivs)
    return np.log(x)


def _is_integer(r):
    return float(r).is_integer() and abs(r) < 2 ** 31


def power(a, r):
    """a ** r for a constant real exponent r.

    Integer exponents use repeated multiplication (negative ones a reciprocal
    afterwards); other exponents require a strictly positive base.
    """
    r = float(r)
    if _is_integer(r):
        k = int(r)
        if k < 0:
            return reciprocal(power(a, -k))
        result = Jet.constant(1.0, a.order) if isinstance(a, Jet) else 1.0
        base = a
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        if not isinstance(a, Jet):
            return np.asarray(result, dtype=float) * np.ones_like(np.asarray(a, float))
        return result
    x = a.value if isinstance(a, Jet) else np.asarray(a, dtype=float)
    if np.any(x <= 0):
        raise DomainError(f"non-integer power {r} of a non-positive value",
                          value=np.min(x))
    if isinstance(a, Jet):
        derivs = []
        coef = 1.0
        for k in range(a.order + 1):
            derivs.append(coef * x ** (r - k))
            coef *= (r - k)
        return _compose(a, derivs)
    return x ** r


def sqrt(a):
    x = a.value if isinstance(a, Jet) else np.asarray(a, dtype=float)
    if np.any(x <= 0):
        raise DomainError("sqrt of a non-positive value", value=np.min(x))
    return power(a, 0.5)


def value_of(a):
    return a.value if isinstance(a, Jet) else np.asarray(a, dtype=float)


# vector helpers ---------------------------------------------------------

def vec_scale(s, vec):
    return [s * c for c in vec]


def vec_add(*vecs):
    return [sum(comps[1:], comps[0]) for comps in zip(*vecs)]


def vec_sub(a, b):
    return [x - y for x, y in zip(a, b)]


def vec_values(vec):
    return np.stack([np.asarray(value_of(c), dtype=float) for c in vec])


def vec_deriv(vec, i, j):
    return np.stack([c.deriv(i, j) for c in vec])


# finite-difference oracle ----------------------------------------------

_CENTRAL = {
    0: ((0, 1.0),),
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
}


def _central_estimate(evaluate, u0, v0, i, j, hu, hv):
    total = 0.0
    for a, wa in _CENTRAL[i]:
        for b, wb in _CENTRAL[j]:
            total = total + wa * wb * evaluate(u0 + a * hu, v0 + b * hv)
    return total / (hu ** i * hv ** j)


def finite_difference_oracle(chart, p, order, step=None):
    """Central-difference estimate of a chart derivative with one Richardson level.

    ``order = (i, j)`` selects d^(i+j) z / du^i dv^j with ``i + j <= 3``.
    ``p = (u0, v0)`` may hold scalars or equally shaped arrays of points; the
    result has shape ``(4,) + shape``.  The step is
    ``h = eps**(1/(i+j+4)) * max(1, |u0|, |v0|)`` per point, which balances
    the O(h^4) truncation error left after Richardson extrapolation against
    round-off amplified by ``h**-(i+j)``.
    """
    i, j = order
    if i < 0 or j < 0 or i + j > 3:
        raise ValueError(f"derivative order {order} not supported (i+j <= 3)")
    u0, v0 = np.broadcast_arrays(np.asarray(p[0], dtype=float),
                                 np.asarray(p[1], dtype=float))
    if step is None:
        eps = np.finfo(float).eps
        step = eps ** (1.0 / (i + j + 4)) * np.maximum(1.0, np.maximum(np.abs(u0),
                                                                        np.abs(v0)))

    def evaluate(u, v):
        try:
            return chart.evaluate(u, v)
        except DomainError as exc:
            raise OutOfDomain("finite-difference stencil left the chart domain",
                              u=np.ravel(u).tolist(), v=np.ravel(v).tolist()) from exc

    if i + j == 0:
        return np.asarray(evaluate(u0, v0), dtype=float)
    coarse = _central_estimate(evaluate, u0, v0, i, j, step, step)
    fine = _central_estimate(evaluate, u0, v0, i, j, step / 2, step / 2)
    return (4.0 * fine - coarse) / 3.0
