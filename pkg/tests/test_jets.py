import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiminimal import expr as ex
from quasiminimal import jets
from quasiminimal.charts import ExprChart
from quasiminimal.errors import DivisionBySingularJet, DomainError
from quasiminimal.jets import Jet, finite_difference_oracle

U, V = sp.symbols("u v")
ORDERS = [(i, j) for i in range(5) for j in range(5 - i)]


def sympy_derivs(f, p):
    return {(i, j): float(sp.diff(f, U, i, V, j).subs({U: p[0], V: p[1]})) if i + j else
            float(f.subs({U: p[0], V: p[1]})) for i, j in ORDERS}


def check_against(jet, f, p, rel=1e-11):
    ref = sympy_derivs(f, p)
    for (i, j), val in ref.items():
        assert float(jet.deriv(i, j)) == pytest.approx(val, rel=rel, abs=rel), (i, j)


@pytest.mark.parametrize("src", [
    "u*v", "exp(u+v)", "sin(u)*cos(v)", "u^3*v^2 - 2*u*v", "1/(2+u*v)",
    "sqrt(1+u^2+v^2)", "log(2+u) * v", "(1+u)^(5/2)", "u^v", "exp(sin(u*v))/(3+cos(u))",
])
def test_jet_matches_sympy(src):
    p = (0.3, 0.7)
    J = ex.eval_jet(ex.parse(src), p, order=4)
    f = sp.sympify(src.replace("^", "**"))
    check_against(J, f, p)


atoms = st.sampled_from(["u", "v", "0.5", "2"])


exprs = st.recursive(
    atoms,
    lambda kids: st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*"]), kids, kids).map(
            lambda t: f"({t[1]} {t[0]} {t[2]})"),
        st.tuples(st.sampled_from(["exp", "sin", "cos"]), kids).map(
            lambda t: f"{t[0]}({t[1]} / 4)"),
        kids.map(lambda k: f"({k})^2"),
    ),
    max_leaves=6,
)


@settings(max_examples=60, deadline=None)
@given(exprs, st.floats(-1, 1), st.floats(-1, 1))
def test_random_expressions_match_sympy(src, u0, v0):
    J = ex.eval_jet(ex.parse(src), (u0, v0), order=4)
    f = sp.sympify(src.replace("^", "**"))
    check_against(J, f, (u0, v0), rel=1e-9)


def test_chain_rule_and_products_are_consistent():
    Uj, Vj = Jet.variables(0.2, -0.4, 4)
    a = jets.exp(Uj * Vj)
    b = jets.sin(Uj) + Vj * Vj
    prod = a * b
    d_prod = prod.du()
    rule = a.du() * b.truncate(3) + a.truncate(3) * b.du()
    assert np.allclose(d_prod.c, rule.c)
    assert np.allclose((a / a).c, Jet.constant(1.0, 4).c)


def test_batched_jets():
    u = np.linspace(0.1, 1, 5)
    v = np.linspace(-1, 1, 5)
    J = ex.eval_jet(ex.parse("exp(u)*v^2"), (u, v), order=3)
    assert J.shape == (5,)
    assert np.allclose(J.deriv(1, 2), 2 * np.exp(u))
    assert np.allclose(J[2].deriv(0, 0), np.exp(u[2]) * v[2] ** 2)


def test_domain_errors():
    Uj, Vj = Jet.variables(0.0, 1.0, 3)
    with pytest.raises(DivisionBySingularJet):
        Jet.constant(1.0) / Uj
    with pytest.raises(DomainError):
        jets.log(Uj - 1)
    with pytest.raises(DomainError):
        jets.sqrt(Uj)
    with pytest.raises(ValueError):
        Uj.deriv(2, 2)


def test_finite_difference_oracle_on_polynomial():
    chart = ExprChart(["u^3*v", "u*v^2", "exp(u)", "sin(v)"], ((0, 2), (0, 2)))
    p = (1.2, 0.8)
    z = chart.jet(*p, 3)
    for i in range(4):
        for j in range(4 - i):
            fd = finite_difference_oracle(chart, p, (i, j))
            jv = np.array([c.deriv(i, j) for c in z])
            assert np.allclose(fd, jv, rtol=1e-7, atol=1e-7)
    with pytest.raises(ValueError):
        finite_difference_oracle(chart, p, (2, 2))


def test_power_rules():
    Uj, _ = Jet.variables(2.0, 0.0, 4)
    assert float(jets.power(Uj, 3).deriv(3, 0)) == pytest.approx(6.0)
    assert float(jets.power(Uj, -1).deriv(1, 0)) == pytest.approx(-0.25)
    assert float(jets.power(Uj, 0.5).deriv(2, 0)) == pytest.approx(-0.25 * 2 ** -1.5)
    assert float(jets.power(Uj, 0).value) == 1.0
    assert math.isclose(float(jets.sqrt(Uj).value), math.sqrt(2))
