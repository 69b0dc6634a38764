"""
A tour of the classifier
========================

Each chart below lands in a different branch of the classification.
"""
from quasiminimal.charts import ExprChart, Grid
from quasiminimal.classify import classify
from quasiminimal.families import bd_zero_surface, example_chart

charts = {
    "example": example_chart(),
    "theta = uv": bd_zero_surface("u*v"),
    "theta = exp(u+v)": bd_zero_surface("exp(u+v)"),
    "theta = sin(u+v) + 2uv": bd_zero_surface("sin(u+v)+2*u*v"),
    # totally umbilic with timelike mean curvature vector
    "anti de Sitter plane": ExprChart(
        ["sin((u-v)/2)/cos((u-v)/2)", "0", "cos((u+v)/2)/cos((u-v)/2)",
         "sin((u+v)/2)/cos((u-v)/2)"], ((0, 1), (0, 1))),
}

for name, chart in charts.items():
    rep = classify(chart, Grid(8, 8))
    extra = f" proper={rep.proper}" if rep.is_pw1 else ""
    print(f"{name:28s} {rep.verdict}{extra}")
