# Nombre de archivo: __init__.py
# Ubicación de archivo: core/kacrice/__init__.py
# Descripción: Punto de entrada de los solvers Kac-Rice (exports públicos)
"""Complejidades, leyes de etiquetas, espectros y test BBP del paisaje Kac-Rice."""

from .bbp import BBPResult, analyze, bbp_threshold, edge_functionals, minima_law_family, outlier_location
from .bisection import threshold_bisect
from .critical import CriticalOuter, TCOptions, complexity_tc, continuation_tc, detect_branches
from .errors import KacRiceError
from .loss import PhaseRetrievalLoss, get_loss
from .measure import TiltedMeasure
from .minima import (
    ComplexitySolution,
    EnergyBand,
    OuterPoint,
    SolverOptions,
    complexity,
    energy_band,
    label_law,
)
from .spectrum import SpectrumResult, WeightLaw, density_grid, hessian_density, left_edge, stieltjes_at

__all__ = [
    "BBPResult",
    "ComplexitySolution",
    "CriticalOuter",
    "EnergyBand",
    "KacRiceError",
    "OuterPoint",
    "PhaseRetrievalLoss",
    "SolverOptions",
    "SpectrumResult",
    "TCOptions",
    "TiltedMeasure",
    "WeightLaw",
    "analyze",
    "bbp_threshold",
    "complexity",
    "complexity_tc",
    "continuation_tc",
    "density_grid",
    "detect_branches",
    "edge_functionals",
    "energy_band",
    "get_loss",
    "hessian_density",
    "label_law",
    "left_edge",
    "minima_law_family",
    "outlier_location",
    "stieltjes_at",
    "threshold_bisect",
]
