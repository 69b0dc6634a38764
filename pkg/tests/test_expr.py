import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiminimal import expr as ex
from quasiminimal.errors import ExprSyntaxError, GeometryError, UnknownIdentifier

ENV = {"u": 0.7, "v": -1.3, "s": 2.0, "t": 0.4, "w": 1.5}


@pytest.mark.parametrize("src, value", [
    ("2^3^2", 512.0), ("-u^2", -0.49), ("u-v-w", 0.7 + 1.3 - 1.5), ("8/4/2", 1.0),
    ("2*pi", 2 * math.pi), ("e", math.e), ("-(u+v)*2", 1.2), ("3/2*s", 3.0),
    ("sqrt(s)^3", 2 ** 1.5), ("cos(t)^2 + sin(t)^2", 1.0), ("1e-3*s", 2e-3),
])
def test_precedence_and_values(src, value):
    assert ex.evaluate(ex.parse(src), ENV) == pytest.approx(value, rel=1e-14, abs=1e-15)


@pytest.mark.parametrize("src, offset", [("(u", 2), ("u+*v", 2), ("u v", 2), ("", 0),
                                         ("sin u", 4), ("2**u", 2)])
def test_syntax_errors_report_offsets(src, offset):
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse(src)
    assert info.value.offset == offset


@pytest.mark.parametrize("src", ["a+1", "foo(u)", "u + x"])
def test_unknown_identifiers(src):
    with pytest.raises(UnknownIdentifier):
        ex.parse(src)


def test_unbound_coordinate():
    with pytest.raises(UnknownIdentifier):
        ex.evaluate(ex.parse("s*u"), {"u": 1.0})


def test_variables():
    assert ex.variables(ex.parse("exp(u)*t + pi")) == {"u", "t"}


leaves = st.one_of(st.sampled_from(["u", "v", "w", "pi"]),
                   st.floats(0, 100, allow_nan=False).map(repr))
trees = st.recursive(
    leaves,
    lambda kids: st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*", "/", "^"]), kids, kids).map(
            lambda t: f"({t[1]}){t[0]}({t[2]})"),
        st.tuples(st.sampled_from(ex.FUNCTIONS), kids).map(lambda t: f"{t[0]}({t[1]})"),
        kids.map(lambda k: f"-({k})"),
    ),
    max_leaves=8,
)


@settings(max_examples=200)
@given(trees)
def test_round_trip_is_stable(src):
    node = ex.parse(src)
    text = ex.to_source(node)
    again = ex.parse(text)
    assert ex.to_source(again) == text
    with np.errstate(all="ignore"):
        try:
            a = ex.evaluate(node, ENV)
        except GeometryError:
            return
        b = ex.evaluate(again, ENV)
    assert (a == b) or (np.isnan(a) and np.isnan(b))


@settings(max_examples=300)
@given(st.text(alphabet="uvw0123456789.+-*/^()episnxqrtlog ", max_size=25))
def test_fuzzed_input_raises_only_parse_errors(src):
    try:
        ex.parse(src)
    except (ExprSyntaxError, UnknownIdentifier):
        pass
