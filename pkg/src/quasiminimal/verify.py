"""Invariant suites run by ``quasiminimal verify`` and the test-suite.

Each suite samples a chart on a grid and returns a :class:`SuiteResult` with
the largest residual it saw.  Suites that do not apply to a chart (for
example constraint drift on a closed-form chart) report ``skipped``.
"""
from dataclasses import asdict, dataclass

import numpy as np

from .frames import (LocalFrame, curvatures, frame_orthogonality, residuals_from_frame,
                     beltrami_check)
from .gauss import gauss_samples
from .families.closed import EXAMPLE_COMPONENTS
from .families.goursat import GridThetaChart, field_difference, goursat_solve
from .families.nonflat import NonflatChart, coefficient_functions

SUITES = ("frames", "integrability", "beltrami", "laplacian", "coefficients",
          "constraints", "field")


@dataclass
class SuiteTolerances:
    frame_products: float = 1e-9
    metric_K: float = 1e-7
    integrability: float = 1e-7
    beltrami: float = 1e-7
    laplacian_agreement: float = 1e-6
    coefficients: float = 1e-6
    constraint_drift: float = 1e-6
    field_refinement: float = 1e-9

    @classmethod
    def names(cls):
        return tuple(cls.__dataclass_fields__)

    def updated(self, **kw):
        unknown = set(kw) - set(self.names())
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        data = asdict(self)
        data.update({k: float(v) for k, v in kw.items()})
        return SuiteTolerances(**data)


@dataclass
class SuiteResult:
    name: str
    status: str
    max_residual: float = None
    tolerance: float = None
    detail: str = ""

    @property
    def passed(self):
        return self.status != "fail"

    def to_json(self):
        return {"suite": self.name, "status": self.status,
                "max_residual": self.max_residual, "tolerance": self.tolerance,
                "detail": self.detail}


def _result(name, value, tol, detail=""):
    value = float(value)
    ok = np.isfinite(value) and value <= tol
    return SuiteResult(name, "pass" if ok else "fail", value, tol, detail)


def suite_frames(chart, u, v, tol):
    lf = LocalFrame(chart, u, v, 3)
    fr = lf.values()
    prod = frame_orthogonality(fr)
    K, kappa, Km = curvatures(chart, u, v)
    rel = float(np.max(np.abs(K - Km) / np.maximum(1.0, np.abs(K))))
    ok = prod <= tol.frame_products and rel <= tol.metric_K
    return SuiteResult("frames", "pass" if ok else "fail", max(prod, rel), tol.metric_K,
                       f"frame inner products {prod:.3e}; K vs metric formula {rel:.3e}")


def suite_integrability(chart, u, v, tol):
    res = residuals_from_frame(LocalFrame(chart, u, v, 4))
    worst = np.max(np.abs(res), axis=1)
    detail = ", ".join(f"r{i + 1}={w:.2e}" for i, w in enumerate(worst))
    return _result("integrability", np.max(worst), tol.integrability, detail)


def suite_beltrami(chart, u, v, tol):
    return _result("beltrami", np.max(beltrami_check(chart, u, v)), tol.beltrami,
                   "|Laplacian(z) + 2H|")


def suite_laplacian(chart, u, v, tol):
    gs = gauss_samples(chart, u, v)
    return _result("laplacian", np.max(gs.mismatch), tol.laplacian_agreement,
                   "closed form vs direct differentiation, relative to max(1, |Delta G|)")


def _is_example(chart):
    comps = getattr(chart, "components", None)
    if comps is None or chart.coords != "st":
        return False
    from . import expr as ex

    return tuple(ex.to_source(c) for c in comps) == tuple(
        ex.to_source(ex.parse(c)) for c in EXAMPLE_COMPONENTS)


def suite_coefficients(chart, u, v, tol):
    lf = LocalFrame(chart, u, v, 3)
    fr = lf.values()
    if isinstance(chart, NonflatChart) or _is_example(chart):
        if isinstance(chart, NonflatChart):
            l1, l3 = chart.spec.lambda1, chart.spec.lambda3
        else:
            l1, l3 = "-3/2", "1"
        co = coefficient_functions(l1, l3, u, v)
        pairs = {"a": fr.a, "c": fr.c, "d": fr.d, "beta2": fr.beta2,
                 "ftilde": fr.ftilde, "K": fr.K}
        gaps = {k: float(np.max(np.abs(pairs[k] - co[k]))) for k in pairs}
        gaps["b"] = float(np.max(np.abs(fr.b)))
        gaps["beta1"] = float(np.max(np.abs(fr.beta1)))
        gaps["kappa-K"] = float(np.max(np.abs(fr.kappa - fr.K)))
    elif chart.coords == "uv" and _is_flat_theta(chart):
        gaps = {"b": float(np.max(np.abs(fr.b))), "d": float(np.max(np.abs(fr.d))),
                "K": float(np.max(np.abs(fr.K))), "f-1": float(np.max(np.abs(fr.f - 1)))}
    else:
        return SuiteResult("coefficients", "skipped",
                           detail="no closed-form coefficients for this chart")
    worst = max(gaps.values())
    return _result("coefficients", worst, tol.coefficients,
                   ", ".join(f"{k}={g:.2e}" for k, g in gaps.items()))


def _is_flat_theta(chart):
    if isinstance(chart, GridThetaChart):
        return True
    return str(getattr(chart, "label", "")).startswith("theta=")


def suite_constraints(chart, u, v, tol):
    if not isinstance(chart, NonflatChart):
        return SuiteResult("constraints", "skipped", detail="not an integrated chart")
    return _result("constraints", chart.drift, tol.constraint_drift,
                   f"worst {chart.drift_at['constraint']} at t = {chart.drift_at['t']:.6g}")


def suite_field(chart, u, v, tol):
    if not isinstance(chart, GridThetaChart):
        return SuiteResult("field", "skipped", detail="not a solved theta field")
    fresh = goursat_solve(chart.field.spec)
    gap = field_difference(chart.field, fresh)
    return _result("field", gap, tol.field_refinement,
                   f"stored field vs fresh solve; refinement change {fresh.residual:.2e}")


_RUNNERS = {"frames": suite_frames, "integrability": suite_integrability,
            "beltrami": suite_beltrami, "laplacian": suite_laplacian,
            "coefficients": suite_coefficients, "constraints": suite_constraints,
            "field": suite_field}


def run_suites(chart, grid, names=("all",), tol=None):
    """Run the named suites (``"all"`` selects every suite) on a sample grid."""
    tol = tol or SuiteTolerances()
    if "all" in names:
        names = SUITES
    unknown = [n for n in names if n not in _RUNNERS]
    if unknown:
        raise KeyError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    u, v = chart.sample_points(grid)
    return [_RUNNERS[n](chart, u, v, tol) for n in names]
