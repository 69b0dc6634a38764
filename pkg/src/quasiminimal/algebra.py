"""Linear algebra of the neutral space E^4_2 and its bivector space.

Vectors carry their components on the leading axis, so a ``(4,)`` array is a
single vector and a ``(4, n)`` array is a batch of ``n`` vectors.  The same
functions accept plain Python sequences of :class:`~quasiminimal.jets.Jet`
objects, which is how jet-valued vector fields are represented elsewhere.

Bivectors use the fixed basis order
``e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4``.
"""
import numpy as np

from .errors import DegenerateSpan

SIGNATURE = np.array([1.0, 1.0, -1.0, -1.0])
BIVECTOR_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
BIVECTOR_SIGNATURE = np.array(
    [SIGNATURE[i] * SIGNATURE[j] for i, j in BIVECTOR_PAIRS])

LIGHTLIKE_TOL = 1e-10

SPACELIKE = "spacelike"
TIMELIKE = "timelike"
LIGHTLIKE = "lightlike"
ZERO = "zero"


def _pack(items):
    if all(isinstance(c, (np.ndarray, float, int, np.floating)) for c in items):
        return np.stack([np.asarray(c, dtype=float) for c in items])
    return list(items)


def inner4(u, v):
    """Neutral inner product u1 v1 + u2 v2 - u3 v3 - u4 v4."""
    return u[0] * v[0] + u[1] * v[1] - u[2] * v[2] - u[3] * v[3]


def wedge(u, v):
    """Exterior product of two vectors as a 6-component bivector (2x2 minors)."""
    return _pack([u[i] * v[j] - u[j] * v[i] for i, j in BIVECTOR_PAIRS])


def inner6(P, Q):
    """Induced inner product on bivectors, diagonal signature (+,-,-,-,-,+)."""
    out = P[0] * Q[0]
    for k in range(1, 6):
        if BIVECTOR_SIGNATURE[k] > 0:
            out = out + P[k] * Q[k]
        else:
            out = out - P[k] * Q[k]
    return out


def flip(v):
    """Apply the signature matrix, so that inner4(u, flip(v)) == u . v."""
    return _pack([v[0], v[1], -v[2], -v[3]])


def euclidean_norm(v):
    v = np.asarray(v, dtype=float)
    return np.sqrt(np.sum(v * v, axis=0))


def causal_class(v, tol=LIGHTLIKE_TOL):
    """Classify a single vector as spacelike, timelike, lightlike or zero.

    A vector counts as lightlike when
    ``|<v,v>| <= tol * max(1, |v|^2)`` with the Euclidean norm on the right.
    """
    v = np.asarray(v, dtype=float)
    n2 = float(np.dot(v, v))
    if n2 == 0.0:
        return ZERO
    q = float(inner4(v, v))
    if abs(q) <= tol * max(1.0, n2):
        return LIGHTLIKE
    return SPACELIKE if q > 0 else TIMELIKE


def gram4(vectors):
    """Gram matrix of a list of 4-vectors under the neutral metric."""
    m = len(vectors)
    out = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            out[i, j] = inner4(vectors[i], vectors[j])
    return out


def _min_norm_solution(rows, rhs):
    A = np.array([np.asarray(flip(r), dtype=float) for r in rows])
    sol, *_ = np.linalg.lstsq(A, np.asarray(rhs, dtype=float), rcond=None)
    return sol


def null_frame_completion(n1, n1p, target, tol=1e-10):
    """Complete two orthogonal null vectors to a null basis.

    Given lightlike, mutually orthogonal, independent ``n1`` and ``n1p``,
    return ``(xi, aux)`` where ``xi`` is lightlike with ``<n1, xi> = 0`` and
    ``<n1p, xi> = target``, and ``aux`` is lightlike with ``<n1, aux> = 1``
    and ``aux`` orthogonal to ``n1p`` and ``xi``.  ``(n1, n1p, xi/target,
    aux)`` is then a Witt basis of E^4_2.

    Among all admissible solutions the one built from the minimum Euclidean
    norm particular solution is returned, so the result is deterministic.
    """
    n1 = np.asarray(n1, dtype=float)
    n1p = np.asarray(n1p, dtype=float)
    if target == 0:
        raise DegenerateSpan("target pairing must be non-zero", target=target)
    scale = max(1.0, float(np.dot(n1, n1)), float(np.dot(n1p, n1p)))
    for name, val in (("<n1,n1>", inner4(n1, n1)),
                      ("<n1p,n1p>", inner4(n1p, n1p)),
                      ("<n1,n1p>", inner4(n1, n1p))):
        if abs(val) > tol * scale:
            raise DegenerateSpan(f"{name} = {val:.3e} violates the null "
                                 "preconditions", value=val)
    sv = np.linalg.svd(np.vstack([n1, n1p]), compute_uv=False)
    if sv[-1] <= 1e-8 * sv[0]:
        raise DegenerateSpan("n1 and n1p are linearly dependent",
                             singular_value=sv[-1])

    k = _min_norm_solution([n1, n1p], [0.0, 1.0])
    k = k - 0.5 * inner4(k, k) * n1p
    m = _min_norm_solution([n1, n1p, k], [1.0, 0.0, 0.0])
    m = m - 0.5 * inner4(m, m) * n1
    return target * k, m
