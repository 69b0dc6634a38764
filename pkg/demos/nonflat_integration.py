"""
Integrating the non-flat family
===============================

Non-flat members come from a linear system of ODEs along t driven by two
functions lambda1(t), lambda3(t).  Integrating with lambda1 = -3/2 and
lambda3 = 1 recovers the closed-form example; varying lambdas give new
surfaces that classify the same way.
"""
import numpy as np

from quasiminimal.charts import Grid
from quasiminimal.classify import classify
from quasiminimal.families import NonFlatSpec, example_chart, nonflat_integrate
from quasiminimal.frames import build_frames

chart = nonflat_integrate(NonFlatSpec(lambda1="-3/2", lambda3="1"))
print("steps:", chart.stats["steps"], " constraint drift:", chart.drift)

grid = Grid(6, 6)
s, t = chart.sample_points(grid)
a = build_frames(chart, s, t)
b = build_frames(example_chart(), s, t)
print("max |K - K_example| =", np.max(np.abs(a.K - b.K)))

varying = NonFlatSpec(lambda1="-3/2 + 0.1*sin(t)", lambda3="1 + 0.2*cos(t)")
report = classify(nonflat_integrate(varying), grid)
print("varying lambdas:", report.verdict, " phi/(-4K) gap:", report.candidates["-4K"])
