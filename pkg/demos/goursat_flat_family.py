"""
Flat surfaces from a characteristic problem
===========================================

A flat member of the family is fixed by a function theta(u, v) with
theta_uv = F(theta + c1 u + c2 v).  Here the equation is solved on the unit
square from data on the two axes and the result is classified.
"""
import numpy as np

from quasiminimal.charts import Grid
from quasiminimal.classify import classify
from quasiminimal.families import FlatThetaSpec, GridThetaChart, flat_family_C, goursat_solve

# F(w) = w with exponential axis data has the exact solution exp(u + v).
field = goursat_solve(FlatThetaSpec(F="w", p="exp(u)", q="exp(v)"))
U, V = np.meshgrid(field.u, field.v, indexing="ij")
print("levels used:", field.levels, " refinement history:", field.history)
print("max |theta - exp(u+v)| =", np.max(np.abs(field.theta - np.exp(U + V))))

# With linear shifts the constant vector C moves linearly in (c1, c2).
spec = FlatThetaSpec(F="w", c1=0.5, c2=-0.25)
report = classify(GridThetaChart(goursat_solve(spec)), Grid(9, 9))
print("verdict:", report.verdict, " proper:", report.proper)
print("fitted C  :", np.round(report.C, 10))
print("expected C:", np.round(flat_family_C(0.5, -0.25), 10))
