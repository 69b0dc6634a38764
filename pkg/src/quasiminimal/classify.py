"""Pointwise 1-type classification of the Gauss map.

A chart has pointwise 1-type Gauss map when ``Delta G = phi (G + C)`` for a
nowhere-vanishing function ``phi`` and a constant bivector ``C``.  Given the
Gauss map and its Laplacian on a sample grid, :func:`fit_phi_and_C` recovers
``phi`` pointwise and ``C`` as a grid average, and :func:`classify` turns the
fit into a verdict with supporting diagnostics.
"""
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import inner6, wedge
from .errors import IllConditionedFit, InsufficientSamples, MinimalPoint, NotQuasiMinimal
from .gauss import gauss_samples

NOT_QUASI_MINIMAL = "not_quasi_minimal"
HARMONIC = "harmonic"
FIRST_KIND = "pw1_first_kind"
SECOND_KIND = "pw1_second_kind"
NOT_PW1 = "not_pw1"
VERDICTS = (NOT_QUASI_MINIMAL, HARMONIC, FIRST_KIND, SECOND_KIND, NOT_PW1)

COMPONENT_NAMES = ("x^y", "n1^n2", "x^n1", "y^n1", "x^n2", "y^n2")


@dataclass
class Tolerances:
    """Numerical thresholds used by the fit and the verdict."""

    harmonic: float = 1e-7         # max |Delta G| for a harmonic verdict
    zero_laplacian: float = 1e-10  # |Delta G| below this counts as vanishing
    first_kind_ratio: float = 1e-7  # relative residual of Delta G = phi G
    first_kind_C: float = 1e-8     # |C| below this means first kind
    proper_spread: float = 1e-6    # relative spread of phi for "proper"
    drift: float = 1e-6            # spread of pointwise C, relative to max(1,|C|)
    lstsq: float = 1e-6            # pair least-squares residual
    condition: float = 1e12        # pair matrix condition number cap
    reproduce: float = 1e-6        # |Delta G - phi (G + C)| relative bound
    components: float = 1e-6       # frame component conditions
    min_phi: float = 1e-9          # phi must stay away from zero
    flat_normal: float = 1e-7      # |kappa| bound for flat normal connection
    parallel: float = 1e-6         # |beta| bound for parallel H
    parallel_strict: float = 1e-9  # |beta| bound in the flat-normal implication
    nonzero_K: float = 1e-7        # |K| must exceed this for nonflat checks

    @classmethod
    def names(cls):
        return tuple(cls.__dataclass_fields__)

    def updated(self, **kw):
        unknown = set(kw) - set(self.names())
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        data = asdict(self)
        data.update({k: float(v) for k, v in kw.items()})
        return Tolerances(**data)


@dataclass
class FitResult:
    phi: np.ndarray
    C: np.ndarray
    drift: float
    method: str
    lstsq_residual: float = 0.0
    skipped_pairs: int = 0

    @property
    def C_norm(self):
        return float(np.linalg.norm(self.C))


def _as_columns(G, dG):
    if dG is None:
        pairs = list(G)
        G = np.stack([np.asarray(p[0], dtype=float) for p in pairs], axis=1)
        dG = np.stack([np.asarray(p[1], dtype=float) for p in pairs], axis=1)
    G = np.asarray(G, dtype=float).reshape(6, -1)
    dG = np.asarray(dG, dtype=float).reshape(6, -1)
    return G, dG


def _constant_phi_fit(G, dG, tol):
    """Fit ``Delta G_p = phi0 G_p + D`` with constant phi0; then C = D / phi0."""
    n = G.shape[1]
    A = np.zeros((6 * n, 7))
    A[:, 0] = G.T.ravel()
    A[:, 1:] = np.tile(np.eye(6), (n, 1))
    rhs = dG.T.ravel()
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > tol.condition:
        raise IllConditionedFit(
            "Laplacian samples are collinear and a constant-phi fit is "
            f"ill-conditioned (condition number {cond:.3e})", condition_number=cond)
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    phi0, D = sol[0], sol[1:]
    if abs(phi0) <= tol.min_phi:
        raise IllConditionedFit("constant-phi fit returned phi = 0", phi=phi0)
    C = D / phi0
    resid = np.linalg.norm(A @ sol - rhs) / max(1.0, np.linalg.norm(rhs))
    return FitResult(phi=np.full(n, phi0), C=C, drift=0.0, method="constant_phi",
                     lstsq_residual=float(resid), skipped_pairs=n - 1)


def fit_phi_and_C(G, dG=None, tol=None):
    """Recover ``phi`` at each sample and the constant bivector ``C``.

    ``G`` and ``dG`` are ``(6, n)`` arrays, or ``G`` is a sequence of
    ``(G, Delta G)`` pairs and ``dG`` is omitted.

    First the first-kind relation ``Delta G = phi G`` is tested sample by
    sample.  Otherwise the sample with the largest Laplacian is paired with
    every other sample and the 6x2 system
    ``mu_r Delta G_r - mu_q Delta G_q = G_r - G_q`` (``mu = 1/phi``) is solved
    by least squares; ``C`` is the mean of ``mu Delta G - G``.  Pairs whose
    matrix is ill-conditioned are skipped and their ``phi`` is recovered from
    the mean ``C``.  If every pair is skipped (all Laplacians collinear) a
    constant ``phi`` is fitted instead, which is the only way to pin down
    ``C`` in that situation.
    """
    tol = tol or Tolerances()
    G, dG = _as_columns(G, dG)
    n = G.shape[1]
    if n < 3:
        raise InsufficientSamples(f"need at least 3 samples, got {n}", samples=n)
    norms = np.linalg.norm(dG, axis=0)
    if np.any(norms <= tol.zero_laplacian):
        k = int(np.argmin(norms))
        raise IllConditionedFit("Laplacian of G vanishes at a sample, so phi "
                                "cannot be nonzero there", sample=k,
                                norm=float(norms[k]))

    # first kind: Delta G parallel to G everywhere
    phi1 = np.sum(dG * G, axis=0) / np.sum(G * G, axis=0)
    rel = np.linalg.norm(dG - phi1 * G, axis=0) / norms
    if np.max(rel) <= tol.first_kind_ratio:
        return FitResult(phi=phi1, C=np.zeros(6), drift=0.0, method="first_kind",
                         lstsq_residual=float(np.max(rel)))

    r = int(np.argmax(norms))
    mu = np.full(n, np.nan)
    mu_r, Cs, resid, skipped = [], [], 0.0, []
    for q in range(n):
        if q == r:
            continue
        A = np.column_stack([dG[:, r], -dG[:, q]])
        b = G[:, r] - G[:, q]
        if np.linalg.cond(A) > tol.condition:
            skipped.append(q)
            continue
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        resid = max(resid, np.linalg.norm(A @ sol - b) / max(1.0, np.linalg.norm(b)))
        mu_r.append(sol[0])
        mu[q] = sol[1]
        Cs.append(sol[1] * dG[:, q] - G[:, q])
        Cs.append(sol[0] * dG[:, r] - G[:, r])
    if not Cs:
        return _constant_phi_fit(G, dG, tol)

    Cs = np.array(Cs)
    Cbar = Cs.mean(axis=0)
    mu[r] = np.mean(mu_r)
    for q in skipped:
        mu[q] = dG[:, q] @ (G[:, q] + Cbar) / norms[q] ** 2
    # pointwise C for every sample, including recovered ones
    Cp = mu * dG - G
    drift = float(np.max(np.linalg.norm(Cp - Cbar[:, None], axis=0)))
    with np.errstate(divide="ignore"):
        phi = 1.0 / mu
    return FitResult(phi=phi, C=Cbar, drift=drift, method="pairwise",
                     lstsq_residual=float(resid), skipped_pairs=len(skipped))


def kind_and_properness(C, phi, tol=None):
    """Return ``(first_kind, proper)`` labels for a pointwise 1-type fit."""
    tol = tol or Tolerances()
    phi = np.asarray(phi, dtype=float)
    first = bool(np.linalg.norm(C) <= tol.first_kind_C)
    scale = max(np.max(np.abs(phi)), 1e-300)
    spread = (np.max(phi) - np.min(phi)) / scale
    return first, bool(spread > tol.proper_spread)


def component_residuals(frame, phi, C):
    """Pointwise violations of the frame components of ``Delta G = phi (G + C)``.

    Rows follow :data:`COMPONENT_NAMES`; each row has one entry per sample.
    """
    x, y, n1, n2 = frame.x, frame.y, frame.n1, frame.n2
    Cb = np.asarray(C, dtype=float).reshape((6,) + (1,) * (x.ndim - 1))
    K, kappa, b1, b2 = frame.K, frame.kappa, frame.beta1, frame.beta2
    pr = lambda a, b: inner6(Cb, wedge(a, b))  # noqa: E731
    return np.abs(np.stack([
        pr(x, y) - (1.0 + 2.0 * K / phi),
        pr(n1, n2) + 2.0 * kappa / phi,
        pr(x, n1),
        pr(y, n1),
        pr(x, n2) + 2.0 * b1 / phi,
        pr(y, n2) - 2.0 * b2 / phi,
    ]))


@dataclass
class ClassificationReport:
    verdict: str
    proper: bool = None
    phi_samples: np.ndarray = None
    C: np.ndarray = None
    drift: float = None
    component_residuals: np.ndarray = None
    u: np.ndarray = None
    v: np.ndarray = None
    grid_shape: tuple = None
    coords: str = "uv"
    method: str = None
    reproduction_residual: float = None
    lstsq_residual: float = None
    max_laplacian: float = None
    laplacian_mismatch: float = None
    candidates: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def is_pw1(self):
        return self.verdict in (FIRST_KIND, SECOND_KIND)

    def to_json(self):
        def arr(a):
            return None if a is None else [float(x) for x in np.ravel(a)]

        out = {"verdict": self.verdict, "reason": self.reason,
               "coords": self.coords,
               "grid": None if self.grid_shape is None else list(self.grid_shape),
               "max_laplacian": self.max_laplacian,
               "laplacian_mismatch": self.laplacian_mismatch,
               "checks": self.checks}
        if self.verdict in (HARMONIC, NOT_QUASI_MINIMAL):
            return out
        out.update({
            "proper": self.proper, "method": self.method,
            "C": arr(self.C), "drift": self.drift,
            "lstsq_residual": self.lstsq_residual,
            "reproduction_residual": self.reproduction_residual,
            "component_residuals": None if self.component_residuals is None else
            dict(zip(COMPONENT_NAMES,
                     [float(np.max(r)) for r in self.component_residuals])),
            "phi_range": None if self.phi_samples is None else
            [float(np.min(self.phi_samples)), float(np.max(self.phi_samples))],
            "phi_candidates": self.candidates,
        })
        return out


def _relative_gap(phi, cand):
    return float(np.max(np.abs(phi - cand) / np.maximum(np.abs(phi), 1e-300)))


def classify(chart, grid, tol=None):
    """Classify the Gauss map of ``chart`` on the sample ``grid``."""
    tol = tol or Tolerances()
    if grid.nu < 4 or grid.nv < 4:
        raise InsufficientSamples("classification needs at least a 4x4 grid",
                                  grid=[grid.nu, grid.nv])
    u, v = chart.sample_points(grid)
    shape = (grid.nu, grid.nv)
    base = dict(u=u, v=v, grid_shape=shape, coords=chart.coords)
    try:
        gs = gauss_samples(chart, u, v)
    except (MinimalPoint, NotQuasiMinimal) as exc:
        return ClassificationReport(NOT_QUASI_MINIMAL, reason=f"{exc.condition}: {exc}",
                                    checks={"error": exc.to_json()}, **base)
    fr = gs.frame
    norms = np.linalg.norm(gs.deltaG_direct, axis=0)
    max_lap = float(np.max(norms))
    base["max_laplacian"] = max_lap
    base["laplacian_mismatch"] = float(np.max(gs.mismatch))

    max_beta = float(max(np.max(np.abs(fr.beta1)), np.max(np.abs(fr.beta2))))
    max_kappa = float(np.max(np.abs(fr.kappa)))
    checks = {
        "flat": bool(np.max(np.abs(fr.K)) <= tol.harmonic),
        "parallel_H": bool(max_beta <= tol.harmonic),
        "max_abs_beta": max_beta,
        "max_abs_kappa": max_kappa,
    }
    parallel_case = max_beta <= tol.parallel_strict
    checks["parallel_implies_flat_normal"] = {
        "applicable": parallel_case,
        "holds": (max_kappa <= tol.flat_normal) if parallel_case else None}
    base["checks"] = checks

    if max_lap <= tol.harmonic:
        checks["harmonic_characterization"] = checks["flat"] and checks["parallel_H"]
        return ClassificationReport(HARMONIC, reason="Delta G vanishes on the grid",
                                    **base)
    try:
        fit = fit_phi_and_C(gs.G, gs.deltaG_direct, tol)
    except IllConditionedFit as exc:
        return ClassificationReport(NOT_PW1, reason=f"{exc.condition}: {exc}", **base)

    phi = fit.phi
    Cbar = fit.C
    recon = phi * (gs.G + Cbar[:, None])
    reproduction = float(np.max(np.linalg.norm(gs.deltaG_direct - recon, axis=0)
                                / np.maximum(1.0, norms)))
    comps = component_residuals(fr, phi, Cbar)
    first, proper = kind_and_properness(Cbar, phi, tol)
    candidates = {"-2K": _relative_gap(phi, -2.0 * fr.K),
                  "-4K": _relative_gap(phi, -4.0 * fr.K)}

    failures = []
    if fit.drift > tol.drift * max(1.0, fit.C_norm):
        failures.append(f"C drifts by {fit.drift:.3e} across the grid")
    if fit.lstsq_residual > tol.lstsq:
        failures.append(f"least-squares residual {fit.lstsq_residual:.3e}")
    if reproduction > tol.reproduce:
        failures.append(f"phi (G + C) misses Delta G by {reproduction:.3e}")
    if np.min(np.abs(phi)) < tol.min_phi:
        failures.append("phi vanishes at some sample")
    verdict = NOT_PW1 if failures else (FIRST_KIND if first else SECOND_KIND)

    if verdict != NOT_PW1:
        checks["components_hold"] = bool(np.max(comps) <= tol.components)
        applies = (max_kappa <= tol.flat_normal
                   and np.min(np.abs(fr.K)) > tol.nonzero_K)
        checks["flat_normal_pw1_implies_parallel"] = {
            "applicable": bool(applies),
            "holds": (max_beta <= tol.parallel) if applies else None}

    return ClassificationReport(
        verdict, proper=proper, phi_samples=phi.reshape(shape), C=Cbar,
        drift=fit.drift, component_residuals=comps.reshape((6,) + shape),
        method=fit.method, reproduction_residual=reproduction,
        lstsq_residual=fit.lstsq_residual, candidates=candidates,
        reason="; ".join(failures), **base)
