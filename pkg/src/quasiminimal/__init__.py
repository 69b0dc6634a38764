"""Quasi-minimal Lorentz surfaces in the neutral space E^4_2.

The package computes null frames and curvature data of surfaces given by
explicit or numerically constructed charts, evaluates the Laplacian of their
Gauss map and classifies them as having pointwise 1-type Gauss map.
"""
from .algebra import causal_class, inner4, inner6, null_frame_completion, wedge
from .charts import ExprChart, Grid
from .errors import GeometryError
from .jets import Jet

__version__ = "0.1.0"

__all__ = ["Jet", "ExprChart", "Grid", "GeometryError", "inner4", "inner6",
           "wedge", "causal_class", "null_frame_completion"]
