import json

import numpy as np
import pytest

from quasiminimal.algebra import wedge
from quasiminimal.charts import Grid
from quasiminimal.classify import (HARMONIC, NOT_PW1, NOT_QUASI_MINIMAL,
                                   SECOND_KIND, Tolerances, classify, component_residuals,
                                   fit_phi_and_C, kind_and_properness)
from quasiminimal.errors import IllConditionedFit, InsufficientSamples, NotNullCoordinates
from quasiminimal.families import ETA1, ETA2, bd_zero_surface, flat_family_C
from quasiminimal.frames import build_frames
from quasiminimal.synthetic import synthetic_frames, synthetic_gauss_data

GRID = Grid(10, 10)


@pytest.mark.parametrize("theta, F_prime", [("exp(u+v)", 1.0), ("exp(2*u+v)", 2.0),
                                            ("exp(u+v)/3", 1.0)])
def test_phi_factor_is_twice_F_prime(theta, F_prime):
    """theta_uv = F(psi) with F linear; the fitted constant phi is 2 F'."""
    rep = classify(bd_zero_surface(theta), GRID)
    assert rep.verdict == SECOND_KIND and rep.proper is False
    assert np.allclose(rep.phi_samples, 2 * F_prime, rtol=1e-10)
    assert not np.allclose(rep.phi_samples, F_prime, rtol=1e-3)


def test_example_verdict(example):
    rep = classify(example, GRID)
    assert rep.verdict == SECOND_KIND and rep.proper
    assert rep.candidates["-4K"] < 1e-10
    assert rep.candidates["-2K"] > 0.1
    # C in the bivector basis e12, e13, e14, e23, e24, e34
    assert np.allclose(rep.C, [-8, -8, -0.5, -0.5, 8, 8], atol=1e-9)
    assert rep.checks["components_hold"]


def test_flat_family_constant_vector():
    rep = classify(bd_zero_surface("exp(u+v)+u+v"), GRID)
    assert rep.verdict == SECOND_KIND
    assert np.allclose(rep.C, flat_family_C(-1.0, -1.0), atol=1e-9)
    rep = classify(bd_zero_surface("exp(u+v)"), GRID)
    assert np.allclose(rep.C, -wedge(ETA1, ETA2), atol=1e-9)


def test_harmonic_verdicts(theta_uv):
    rep = classify(theta_uv, GRID)
    assert rep.verdict == HARMONIC
    assert rep.checks["harmonic_characterization"]
    assert rep.checks["parallel_implies_flat_normal"] == {"applicable": True, "holds": True}


@pytest.mark.parametrize("theta", ["u*v^2+u*v", "u*v+u^3*v", "sin(u+v)+2*u*v"])
def test_not_pointwise_one_type(theta):
    assert classify(bd_zero_surface(theta), GRID).verdict == NOT_PW1


def test_not_quasi_minimal(anti_de_sitter):
    rep = classify(anti_de_sitter, GRID)
    assert rep.verdict == NOT_QUASI_MINIMAL
    assert rep.checks["error"]["error"] == "NotQuasiMinimal"


def test_non_null_coordinates_propagate(spacelike_graph):
    with pytest.raises(NotNullCoordinates):
        classify(spacelike_graph, GRID)


def test_insufficient_samples(example):
    with pytest.raises(InsufficientSamples):
        classify(example, Grid(3, 10))


def test_synthetic_first_kind():
    rng = np.random.default_rng(3)
    K = rng.uniform(0.5, 2.0, 50)
    fr = synthetic_frames(K, 0.0, 0.0, 0.0, rng)
    fit = fit_phi_and_C(*synthetic_gauss_data(fr))
    assert np.allclose(fit.phi, -2 * K, atol=1e-10)
    first, proper = kind_and_properness(fit.C, fit.phi)
    assert first and proper


def test_synthetic_without_pointwise_structure_is_rejected():
    rng = np.random.default_rng(4)
    n = 40
    fr = synthetic_frames(rng.uniform(0.5, 2, n), rng.uniform(-1, 1, n),
                          rng.uniform(-1, 1, n), rng.uniform(-1, 1, n), rng)
    G, dG = synthetic_gauss_data(fr)
    try:
        fit = fit_phi_and_C(G, dG)
    except IllConditionedFit:
        return
    assert fit.drift > 1e-3 or fit.lstsq_residual > 1e-3


def test_fit_accepts_pairs():
    rng = np.random.default_rng(5)
    K = rng.uniform(0.5, 2.0, 10)
    G, dG = synthetic_gauss_data(synthetic_frames(K, 0.0, 0.0, 0.0, rng))
    a = fit_phi_and_C(G, dG)
    b = fit_phi_and_C(list(zip(G.T, dG.T)))
    assert np.allclose(a.phi, b.phi)


def test_kind_and_properness():
    assert kind_and_properness(np.zeros(6), np.array([2.0, 2.0])) == (True, False)
    assert kind_and_properness(np.ones(6), np.array([1.0, 3.0])) == (False, True)


def test_component_residuals_on_example(example):
    s, t = example.sample_points(Grid(5, 5))
    fr = build_frames(example, s, t)
    C = np.array([-8, -8, -0.5, -0.5, 8, 8.0])
    assert np.max(component_residuals(fr, -4 * fr.K, C)) < 1e-10
    assert np.max(component_residuals(fr, -2 * fr.K, C)) > 1e-2


def test_report_json_round_trip(example):
    rep = classify(example, Grid(5, 5))
    data = json.loads(json.dumps(rep.to_json()))
    assert data["verdict"] == SECOND_KIND and len(data["C"]) == 6


def test_tolerance_overrides():
    tol = Tolerances().updated(drift=1e-3)
    assert tol.drift == 1e-3
    with pytest.raises(KeyError):
        Tolerances().updated(bogus=1)

