"""Surface families and the registry of built-in charts.

A chart specification is a JSON-like mapping, either

* ``{"builtin": name, ...parameters}`` for one of :data:`BUILTINS`, or
* ``{"components": [4 expressions], "coords": "uv" | "st",
  "domain": {"u": [a, b], "v": [c, d]}}`` for an explicit chart.
"""
import json
import math
import os

from ..charts import COORD_NAMES, ExprChart
from ..errors import ChartSpecError
from .closed import (ETA0, ETA1, ETA2, EXAMPLE_DOMAIN, UNIT_SQUARE, bd_zero_surface,
                     example_chart, flat_family_C)
from .goursat import FlatThetaSpec, GridThetaChart, ThetaField, goursat_solve
from .nonflat import (NonFlatSpec, NonflatChart, coefficient_functions,
                      nonflat_initial_data, nonflat_integrate, st_integrability)

__all__ = ["ETA0", "ETA1", "ETA2", "bd_zero_surface", "example_chart", "flat_family_C",
           "FlatThetaSpec", "ThetaField", "GridThetaChart", "goursat_solve",
           "NonFlatSpec", "NonflatChart", "nonflat_initial_data", "nonflat_integrate",
           "coefficient_functions", "st_integrability", "build_chart", "load_chart_file",
           "BUILTINS", "reference_charts"]


def _pop_domain(params, names, default):
    a, b = names
    dom = params.pop("domain", None)
    if isinstance(dom, dict):
        params.setdefault(a, dom.get(a))
        params.setdefault(b, dom.get(b))
    elif dom is not None:
        params.setdefault(a, dom[0])
        params.setdefault(b, dom[1])
    ra = params.pop(a, None) or default[0]
    rb = params.pop(b, None) or default[1]
    return (tuple(float(x) for x in ra), tuple(float(x) for x in rb))


def _check_empty(name, params):
    if params:
        raise ChartSpecError(f"unknown parameter(s) for builtin {name!r}: "
                             f"{sorted(params)}")


def _example(params, cache=None):
    domain = _pop_domain(params, ("s", "t"), EXAMPLE_DOMAIN)
    _check_empty("example", params)
    return example_chart(domain)


def _theta(params, cache=None):
    theta = params.pop("theta", "u*v")
    domain = _pop_domain(params, ("u", "v"), UNIT_SQUARE)
    _check_empty("theta", params)
    return bd_zero_surface(theta, domain)


def _flat_theta(params, cache=None):
    (u0, u1), (v0, v1) = _pop_domain(params, ("u", "v"), UNIT_SQUARE)
    if u0 != 0 or v0 != 0:
        raise ChartSpecError("the characteristic problem lives on [0, U] x [0, V]")
    params.setdefault("U", u1)
    params.setdefault("V", v1)
    try:
        spec = FlatThetaSpec(**params)
    except TypeError as exc:
        raise ChartSpecError(f"bad flat_theta parameters: {exc}") from None
    if cache and os.path.exists(cache):
        field = ThetaField.from_csv(cache, spec)
    else:
        field = goursat_solve(spec)
        if cache:
            field.to_csv(cache)
    return GridThetaChart(field)


def _nonflat(params, cache=None):
    s_range, t_range = _pop_domain(params, ("s", "t"), ((1.0, 9.0), (0.0, 2 * math.pi)))
    params["s_range"], params["t_range"] = s_range, t_range
    if "project" in params:
        params["project"] = params["project"] in (True, "true", "1", 1, 1.0)
    try:
        spec = NonFlatSpec(**params)
    except TypeError as exc:
        raise ChartSpecError(f"bad nonflat parameters: {exc}") from None
    if cache and os.path.exists(cache):
        return NonflatChart.from_csv(cache, spec)
    chart = nonflat_integrate(spec)
    if cache:
        chart.to_csv(cache)
    return chart


BUILTINS = {"example": _example, "theta": _theta, "flat_theta": _flat_theta,
            "nonflat": _nonflat}


def build_chart(spec, cache=None):
    """Construct a chart from a specification mapping (see module docstring).

    ``cache`` names a CSV file holding a solved theta field or an integrated
    trajectory; it is read when present and written otherwise.
    """
    spec = dict(spec)
    if "builtin" in spec:
        name = spec.pop("builtin")
        spec.pop("label", None)
        spec.pop("coords", None)
        if name not in BUILTINS:
            raise ChartSpecError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
        return BUILTINS[name](spec, cache)
    try:
        comps = spec["components"]
        coords = spec.get("coords", "uv")
        dom = spec["domain"]
    except KeyError as exc:
        raise ChartSpecError(f"chart specification lacks {exc.args[0]!r}") from None
    if coords not in COORD_NAMES:
        raise ChartSpecError(f"coords must be 'uv' or 'st', got {coords!r}")
    if isinstance(dom, dict):
        a, b = COORD_NAMES[coords]
        if a not in dom or b not in dom:
            raise ChartSpecError(f"domain must give ranges for {a!r} and {b!r}")
        dom = (dom[a], dom[b])
    return ExprChart(comps, dom, coords=coords, label=spec.get("label", "chart"))


def load_chart_file(path, cache=None):
    """Read a JSON chart specification and build the chart."""
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ChartSpecError(f"cannot read chart file {path}: {exc}") from None
    return build_chart(spec, cache)


def reference_charts():
    """The four built-in charts used by the verification suites."""
    return {
        "example": example_chart(),
        "theta_uv": bd_zero_surface("u*v"),
        "theta_exp": bd_zero_surface("exp(u+v)"),
        "nonflat": nonflat_integrate(NonFlatSpec()),
    }
