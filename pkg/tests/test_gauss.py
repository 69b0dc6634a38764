import numpy as np
import pytest

from quasiminimal.algebra import wedge
from quasiminimal.charts import Grid
from quasiminimal.families import ETA0, ETA1, ETA2, bd_zero_surface
from quasiminimal.gauss import (gauss_map_at, gauss_samples, harmonic_test,
                                laplacian_closed_form, laplacian_direct, self_product)

from conftest import grid_points


def test_gauss_map_of_flat_theta(theta_exp):
    u, v = grid_points(theta_exp)
    G = gauss_map_at(theta_exp, u, v)
    z = theta_exp.jet(u, v, 1)
    zu = np.stack([c.deriv(1, 0) for c in z])
    zv = np.stack([c.deriv(0, 1) for c in z])
    # f = 1 on these charts, so x = z_u and y = z_v
    assert np.allclose(G, wedge(zu, zv), atol=1e-13)
    assert np.allclose(self_product(G), -1)
    assert np.allclose(G, gauss_samples(theta_exp, u, v).G)


def test_laplacian_of_exponential_theta(theta_exp):
    u, v = grid_points(theta_exp)
    dG = laplacian_direct(theta_exp, u, v)
    expected = 2 * wedge(ETA0, ETA2 - ETA1)[:, None] * np.exp(u + v)
    assert np.allclose(dG, expected, atol=1e-11)


def test_gauss_map_lies_on_hyperbolic_space(builtin_charts):
    for chart in builtin_charts.values():
        gs = gauss_samples(chart, *grid_points(chart))
        assert np.allclose(self_product(gs.G), -1, atol=1e-11)


def test_self_product_relation(builtin_charts):
    from quasiminimal.algebra import inner6

    for chart in builtin_charts.values():
        gs = gauss_samples(chart, *grid_points(chart))
        assert np.allclose(inner6(gs.G, gs.deltaG_closed), 2 * gs.frame.K, atol=1e-10)


def test_closed_form_matches_direct(builtin_charts):
    for chart in builtin_charts.values():
        gs = gauss_samples(chart, *grid_points(chart, 6))
        assert np.max(gs.mismatch) < 1e-9


def test_closed_form_is_linear_in_coefficients(example):
    fr = gauss_samples(example, *grid_points(example)).frame
    base = laplacian_closed_form(fr)
    fr2 = fr.__class__(**{**fr.__dict__, "K": 2 * fr.K, "kappa": 2 * fr.kappa,
                          "beta1": 2 * fr.beta1, "beta2": 2 * fr.beta2})
    assert np.allclose(laplacian_closed_form(fr2), 2 * base)


@pytest.mark.parametrize("theta, harmonic", [("u*v", True), ("2*u*v + 1", True),
                                             ("exp(u+v)", False), ("u*v + u^2*v^2", False)])
def test_harmonic_test(theta, harmonic):
    res = harmonic_test(bd_zero_surface(theta), Grid(6, 6))
    assert bool(res) is harmonic
    assert res.characterization
    assert res.harmonic == (res.flat and res.parallel_H)


def test_harmonic_test_on_example(example):
    res = harmonic_test(example, Grid(6, 6))
    assert not res and not res.flat and res.characterization


def test_eta_basis():
    from quasiminimal.algebra import gram4

    expected = np.array([[0, 0, 0], [0, 0, -1], [0, -1, 0]])
    assert np.allclose(gram4([ETA0, ETA1, ETA2]), expected)
