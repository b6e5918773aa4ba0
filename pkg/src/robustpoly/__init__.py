"""Robust polynomial regression in the Chebyshev basis.

Modules: ``cheb`` (basis arithmetic and norms), ``partition`` (Chebyshev
partition and goodness checks), ``lp`` (dense simplex), ``regression``
(L1 fit, median refinement, ``approx``), ``simulator`` (seeded instances)
and ``lowerbounds`` (impossibility gadgets).
"""

from .cheb import ChebPoly, GridSpec, norm_1_grid, norm_inf_grid
from .lp import LPProblem, LPSolution, Status, lp_solve
from .partition import Partition, SampleSet, build_partition, goodness
from .regression import FitConfig, FitReport, approx, l1_fit, refine
from .simulator import NoiseModel, make_instance

__all__ = [
    "ChebPoly", "GridSpec", "norm_1_grid", "norm_inf_grid",
    "LPProblem", "LPSolution", "Status", "lp_solve",
    "Partition", "SampleSet", "build_partition", "goodness",
    "FitConfig", "FitReport", "approx", "l1_fit", "refine",
    "NoiseModel", "make_instance",
]
