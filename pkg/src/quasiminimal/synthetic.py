"""Fabricated frame data for testing the fitter on cases with no known chart.

A random element of the isometry group of E^4_2 is produced by the Cayley
transform of a random element of its Lie algebra and applied to a standard
null frame.  Curvature and connection coefficients are supplied by the
caller, and the Gauss map Laplacian follows from the closed form.
"""
import math

import numpy as np

from .algebra import SIGNATURE, wedge
from .frames import FrameData
from .gauss import laplacian_closed_form

_R2 = math.sqrt(2.0)
STANDARD_FRAME = (
    np.array([1.0, 0.0, 1.0, 0.0]) / _R2,    # x
    -np.array([1.0, 0.0, -1.0, 0.0]) / _R2,  # y
    np.array([0.0, 1.0, 0.0, 1.0]) / _R2,    # n1
    -np.array([0.0, 1.0, 0.0, -1.0]) / _R2,  # n2
)


def random_isometry(rng, scale=0.5):
    """Random matrix L with L^T S L = S for S = diag(1, 1, -1, -1)."""
    W = rng.normal(scale=scale, size=(4, 4))
    W = W - W.T
    A = np.diag(SIGNATURE) @ W
    I = np.eye(4)
    return np.linalg.solve(I - A, I + A)


def synthetic_frames(K, kappa, beta1, beta2, rng=None):
    """FrameData for prescribed coefficient arrays, one random frame per entry."""
    rng = np.random.default_rng(rng)
    K, kappa, beta1, beta2 = np.broadcast_arrays(*(np.asarray(x, float) for x in
                                                   (K, kappa, beta1, beta2)))
    n = K.size
    vecs = [np.empty((4, n)) for _ in range(4)]
    for k in range(n):
        L = random_isometry(rng)
        for out, e in zip(vecs, STANDARD_FRAME):
            out[:, k] = L @ e
    x, y, n1, n2 = (v.reshape((4,) + K.shape) for v in vecs)
    zeros = np.zeros(K.shape)
    return FrameData(u=zeros, v=zeros, x=x, y=y, n1=n1, n2=n2, H=-n1,
                     f=np.ones(K.shape), ftilde=zeros, gamma1=zeros, gamma2=zeros,
                     a=zeros, b=zeros, c=zeros, d=zeros, beta1=beta1, beta2=beta2,
                     K=K, kappa=kappa)


def synthetic_gauss_data(frame):
    """Gauss map and its closed-form Laplacian for fabricated frames."""
    return wedge(frame.x, frame.y), laplacian_closed_form(frame)
