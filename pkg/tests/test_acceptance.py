"""Acceptance criteria, one test per criterion, each printing a pass/fail line."""
import math
import time

import numpy as np

from quasiminimal.algebra import wedge
from quasiminimal.charts import Grid
from quasiminimal.classify import FIRST_KIND, HARMONIC, SECOND_KIND, classify, fit_phi_and_C
from quasiminimal.families import (ETA1, ETA2, FlatThetaSpec, NonFlatSpec, bd_zero_surface,
                                   example_chart, goursat_solve, nonflat_integrate)
from quasiminimal.frames import (COEFFICIENTS, LocalFrame, beltrami_check,
                                 integrability_residuals)
from quasiminimal.gauss import gauss_samples
from quasiminimal.jets import finite_difference_oracle
from quasiminimal.synthetic import synthetic_frames, synthetic_gauss_data

from conftest import example_n1

GRID20 = Grid(20, 20)


def test_criterion_1_example_golden_values(record):
    start = time.perf_counter()
    chart = example_chart()
    s, t = chart.sample_points(GRID20)
    fr = LocalFrame(chart, s, t, 3).values()
    errs = {
        "K": np.max(np.abs(fr.K - s ** -1.5)),
        "kappa": np.max(np.abs(fr.kappa - s ** -1.5)),
        "beta2": np.max(np.abs(fr.beta2 + 2 * s ** -0.5)),
    }
    n1_err = max(np.max(np.abs(fr.n1 - example_n1(t))), np.max(np.abs(fr.H + fr.n1)))
    elapsed = time.perf_counter() - start
    ok = max(errs.values()) <= 1e-7 and n1_err <= 1e-9 and elapsed < 5.0
    record("1 example golden values", ok,
           ", ".join(f"{k} {e:.1e}" for k, e in errs.items())
           + f", n1 {n1_err:.1e}, {elapsed:.2f}s")


def test_criterion_2_laplacian_oracle(record):
    start = time.perf_counter()
    charts = {"example": example_chart(), "theta=uv": bd_zero_surface("u*v"),
              "theta=exp(u+v)": bd_zero_surface("exp(u+v)"),
              "nonflat": nonflat_integrate(NonFlatSpec(lambda1="-3/2", lambda3="1"))}
    worst = {}
    for name, chart in charts.items():
        gs = gauss_samples(chart, *chart.sample_points(GRID20))
        worst[name] = float(np.max(gs.mismatch))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1e-6 and elapsed < 30.0
    record("2 Laplacian closed form vs direct", ok,
           ", ".join(f"{k} {e:.1e}" for k, e in worst.items()) + f", {elapsed:.2f}s")


def _example_C_expression(fr):
    x, y, n1, n2 = fr.x, fr.y, fr.n1, fr.n2
    return -0.5 * (wedge(x, y) + wedge(n1, n2) + (fr.beta2 / fr.K) * wedge(x, n1))


def test_criterion_3_classification_verdicts(record):
    chart = example_chart()
    rep = classify(chart, GRID20)
    s = rep.u
    phi = rep.phi_samples.ravel()
    phi_err = float(np.max(np.abs(phi + 4 * s ** -1.5) / (4 * s ** -1.5)))
    fr = LocalFrame(chart, rep.u, rep.v, 3).values()
    C_expr = _example_C_expression(fr)
    C_gap = float(np.max(np.abs(C_expr - rep.C[:, None])))
    ok_example = (rep.verdict == SECOND_KIND and rep.proper and phi_err <= 1e-6
                  and rep.drift <= 1e-6 and C_gap <= 1e-6)

    rep_uv = classify(bd_zero_surface("u*v"), GRID20)
    rep_exp = classify(bd_zero_surface("exp(u+v)"), GRID20)
    C_target = -wedge(ETA1, ETA2)
    exp_gap = float(np.max(np.abs(rep_exp.C - C_target))) if rep_exp.C is not None else math.inf
    ok_exp = rep_exp.verdict == SECOND_KIND and rep_exp.proper is False and exp_gap <= 1e-6
    record("3 classification verdicts", ok_example and rep_uv.verdict == HARMONIC and ok_exp,
           f"example {rep.verdict} proper={rep.proper} phi {phi_err:.1e} "
           f"drift {rep.drift:.1e} C {C_gap:.1e}; theta=uv {rep_uv.verdict}; "
           f"theta=exp(u+v) {rep_exp.verdict} proper={rep_exp.proper} C {exp_gap:.1e}")


def _metric_products(chart, s, t):
    z = chart.jet(s, t, 1)
    zs = np.stack([c.deriv(1, 0) for c in z])
    zt = np.stack([c.deriv(0, 1) for c in z])
    ip = lambda a, b: a[0] * b[0] + a[1] * b[1] - a[2] * b[2] - a[3] * b[3]  # noqa: E731
    return np.stack([ip(zs, zs), ip(zs, zt), ip(zt, zt)])


def test_criterion_4_ode_round_trip(record):
    spec = NonFlatSpec(lambda1="-3/2", lambda3="1", step=1e-3)
    chart = nonflat_integrate(spec)
    ref = example_chart()
    s, t = ref.sample_points(GRID20)
    a = LocalFrame(chart, s, t, 3).values()
    b = LocalFrame(ref, s, t, 3).values()
    gaps = {k: float(np.max(np.abs(getattr(a, k) - getattr(b, k))))
            for k in ("K", "kappa", "beta2")}
    gaps["metric"] = float(np.max(np.abs(_metric_products(chart, s, t)
                                         - _metric_products(ref, s, t))))
    span = (chart.t_nodes[0], chart.t_nodes[-1])
    step = float(np.max(np.diff(chart.t_nodes)))
    ok = (max(gaps.values()) <= 1e-6 and chart.drift <= 1e-6 and step <= 1e-3 + 1e-15
          and span[0] <= 0.0 and span[1] >= 2 * math.pi)
    record("4 ODE round trip", ok,
           ", ".join(f"{k} {e:.1e}" for k, e in gaps.items())
           + f", drift {chart.drift:.1e}, max step {step:.1e}")


def test_criterion_5_integrability_and_perturbations(record):
    charts = {"example": example_chart(), "theta=uv": bd_zero_surface("u*v"),
              "theta=exp(u+v)": bd_zero_surface("exp(u+v)"),
              "nonflat": nonflat_integrate(NonFlatSpec())}
    worst_r, worst_b = {}, {}
    for name, chart in charts.items():
        u, v = chart.sample_points(GRID20)
        worst_r[name] = float(np.max(np.abs(integrability_residuals(chart, u, v))))
        worst_b[name] = float(np.max(beltrami_check(chart, u, v)))
    chart = charts["theta=exp(u+v)"]
    u, v = chart.sample_points(GRID20)
    detected = {}
    for name in COEFFICIENTS:
        res = integrability_residuals(chart, u, v, perturb={name: 0.1})
        detected[name] = float(np.min(np.max(np.abs(res), axis=0)))
    ok = (max(worst_r.values()) <= 1e-7 and max(worst_b.values()) <= 1e-7
          and min(detected.values()) >= 1e-3)
    record("5 integrability suite", ok,
           f"residuals {max(worst_r.values()):.1e}, Beltrami {max(worst_b.values()):.1e}, "
           f"weakest perturbation signal {min(detected.values()):.2e}")


def test_criterion_6_goursat_solver(record):
    one = goursat_solve(FlatThetaSpec(F="1", p="0", q="0"))
    U, V = np.meshgrid(one.u, one.v, indexing="ij")
    err_uv = float(np.max(np.abs(one.theta - U * V)))
    ex = goursat_solve(FlatThetaSpec(F="w", p="exp(u)", q="exp(v)"))
    U, V = np.meshgrid(ex.u, ex.v, indexing="ij")
    err_exp = float(np.max(np.abs(ex.theta - np.exp(U + V))))
    ok = err_uv <= 1e-12 and err_exp <= 1e-9 and ex.residual <= 1e-9
    record("6 Goursat solver", ok,
           f"F=1 {err_uv:.1e}, F=w {err_exp:.1e}, refinement change {ex.residual:.1e}")


ORDERS = [(i, j) for i in range(4) for j in range(4 - i)]


def _jet_vs_fd(chart, rng, n=100):
    (a, b), (c, d) = chart.domain
    mu, mv = 0.05 * (b - a), 0.05 * (d - c)
    us = rng.uniform(a + mu, b - mu, n)
    vs = rng.uniform(c + mv, d - mv, n)
    z = chart.jet(us, vs, 3)
    worst = 0.0
    for order in ORDERS:
        jet_val = np.stack([comp.deriv(*order) for comp in z])
        fd = finite_difference_oracle(chart, (us, vs), order)
        rel = np.abs(jet_val - fd) / np.maximum(1.0, np.abs(jet_val))
        worst = max(worst, float(np.max(rel)))
    return worst


def test_criterion_7_jets_vs_finite_differences(record):
    rng = np.random.default_rng(7)
    charts = {"example": example_chart(), "theta=uv": bd_zero_surface("u*v"),
              "theta=exp(u+v)": bd_zero_surface("exp(u+v)"),
              "nonflat": nonflat_integrate(NonFlatSpec())}
    worst = {name: _jet_vs_fd(chart, rng) for name, chart in charts.items()}
    record("7 jets vs finite differences", max(worst.values()) <= 1e-6,
           ", ".join(f"{k} {e:.1e}" for k, e in worst.items()))


def test_criterion_8_parallel_and_flat_normal_implications(record):
    charts = {"example": example_chart(), "theta=uv": bd_zero_surface("u*v"),
              "theta=3uv": bd_zero_surface("3*u*v"),
              "theta=exp(u+v)": bd_zero_surface("exp(u+v)"),
              "nonflat": nonflat_integrate(NonFlatSpec())}
    applicable, flat_normal_ok = [], True
    for name, chart in charts.items():
        fr = LocalFrame(chart, *chart.sample_points(GRID20), 3).values()
        if max(np.max(np.abs(fr.beta1)), np.max(np.abs(fr.beta2))) <= 1e-9:
            applicable.append(name)
            flat_normal_ok &= bool(np.max(np.abs(fr.kappa)) <= 1e-7)
    rng = np.random.default_rng(8)
    K = rng.uniform(0.2, 3.0, 200) * rng.choice([-1.0, 1.0], 200)
    frame = synthetic_frames(K, 0.0, 0.0, 0.0, rng)
    fit = fit_phi_and_C(*synthetic_gauss_data(frame))
    phi_err = float(np.max(np.abs(fit.phi + 2 * K)))
    first = fit.C_norm <= 1e-8
    ok = flat_normal_ok and len(applicable) > 0 and first and phi_err <= 1e-7
    record("8 parallel/flat-normal implications", ok,
           f"parallel charts {applicable} have flat normal: {flat_normal_ok}; "
           f"synthetic fit first kind={first}, |phi+2K| {phi_err:.1e}")


def test_criterion_9_phi_factor(record):
    rep = classify(bd_zero_surface("exp(u+v)"), GRID20)
    phi = rep.phi_samples.ravel()
    F_prime = 1.0  # F(w) = w
    spread = float(np.max(phi) - np.min(phi))
    twice = float(np.max(np.abs(phi - 2 * F_prime)))
    once = float(np.max(np.abs(phi - F_prime)))
    ok = spread <= 1e-9 and twice <= 1e-9 and once >= 0.5
    record("9 phi factor", ok,
           f"phi in [{np.min(phi):.12f}, {np.max(phi):.12f}]: |phi - 2F'| {twice:.1e}, "
           f"|phi - F'| {once:.2f}; phi = 2F'(psi)")
