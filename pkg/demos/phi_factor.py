"""
Which multiple of F' is phi?
============================

For flat members with theta_uv = F(psi), the fitted function phi can be
compared with F'(psi).  With F linear, F' is constant and the fit returns
exactly twice that constant.
"""
import numpy as np

from quasiminimal.charts import Grid
from quasiminimal.classify import classify
from quasiminimal.families import bd_zero_surface

for theta, F_prime in (("exp(u+v)", 1.0), ("exp(2*u+v)", 2.0)):
    rep = classify(bd_zero_surface(theta), Grid(10, 10))
    phi = rep.phi_samples
    print(f"theta = {theta:11s} F' = {F_prime}  phi in [{phi.min():.12f}, "
          f"{phi.max():.12f}]  phi / F' = {np.mean(phi) / F_prime:.12f}")
