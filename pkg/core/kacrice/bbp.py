# Nombre de archivo: bbp.py
# Ubicación de archivo: core/kacrice/bbp.py
# Descripción: Test de inestabilidad BBP: funcionales de borde, posición del outlier y umbrales en alpha

"""Outlier alineado con la señal por debajo del bulk de la Hessiana.

Con g_min la transformada en el borde izquierdo x_min:

* x2 = α/(1−q²) · E_ν[(y*−qy)² F/(α + g_min F)]
* d(α) = x_min − x2; hay outlier si d ≥ 0.

El outlier x* < x_min se obtiene sobre la rama real de g por debajo del
bulk, parametrizada por s = g(x*) ∈ (0, g_min].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .bisection import threshold_bisect
from .errors import NoSolutionBelowEdge
from .loss import SingleIndexLoss
from .minima import SolverOptions, complexity, energy_band, label_law
from .spectrum import WeightLaw, inverse_stieltjes, left_edge

logger = logging.getLogger(__name__)

ENERGY_CLASSES = ("typ", "low", "high")
BBP_COLUMNS: List[str] = ["alpha", "q", "e_tag", "g_min", "x_min", "x2", "d_alpha", "x_star", "w_star"]
_OUTLIER_TOL = 1e-8


@dataclass(slots=True, frozen=True)
class BBPResult:
    """Funcionales de borde y outlier (si existe) para una ley ν."""

    alpha: float
    q: float
    g_min: float
    x_min: float
    x2: float
    d_alpha: float
    t_nu: float
    x_star: Optional[float] = None

    @property
    def w_min(self) -> float:
        return self.x_min - self.t_nu

    @property
    def w2(self) -> float:
        return self.x2 - self.t_nu

    @property
    def w_star(self) -> Optional[float]:
        return None if self.x_star is None else self.x_star - self.t_nu

    @property
    def has_outlier(self) -> bool:
        return self.x_star is not None

    def to_row(self, tag: str = "") -> Dict[str, object]:
        return {
            "alpha": self.alpha,
            "q": self.q,
            "e_tag": tag,
            "g_min": self.g_min,
            "x_min": self.x_min,
            "x2": self.x2,
            "d_alpha": self.d_alpha,
            "x_star": np.nan if self.x_star is None else self.x_star,
            "w_star": np.nan if self.x_star is None else self.w_star,
        }


def _check(nu: WeightLaw, q: float) -> None:
    if not nu.has_labels:
        raise ValueError("El análisis BBP requiere una ley con etiquetas (y, y*)")
    if not abs(q) < 1.0:
        raise ValueError("El overlap q debe cumplir |q| < 1")


def _signal_functional(s: float, nu: WeightLaw, alpha: float, q: float) -> float:
    scale = alpha / (1.0 - q * q)
    return scale * nu.expect_labels(lambda y, ys, f: np.square(ys - q * y) * f / (alpha + s * f))


def edge_functionals(nu: WeightLaw, alpha: float, q: float) -> BBPResult:
    """x_min, x2 y d(α) = x_min − x2 evaluados con el mismo g_min."""
    _check(nu, q)
    x_min, g_min = left_edge(nu, alpha)
    x2 = _signal_functional(g_min, nu, alpha, q)
    return BBPResult(
        alpha=alpha,
        q=q,
        g_min=g_min,
        x_min=x_min,
        x2=x2,
        d_alpha=x_min - x2,
        t_nu=nu.t_mean,
    )


def outlier_location(nu: WeightLaw, alpha: float, q: float) -> Optional[float]:
    """Posición x* del outlier (coordenadas sin desplazar) o ``None`` si d(α) < 0."""
    return analyze(nu, alpha, q).x_star


def analyze(nu: WeightLaw, alpha: float, q: float) -> BBPResult:
    """``edge_functionals`` más la posición del outlier cuando existe."""
    edge = edge_functionals(nu, alpha, q)
    if edge.d_alpha < 0.0:
        return edge
    if edge.d_alpha == 0.0:
        return _with_outlier(edge, edge.x_min)

    def gap(s: float) -> float:
        return inverse_stieltjes(s, nu, alpha) - _signal_functional(s, nu, alpha, q)

    s_lo = 1e-3 * edge.g_min
    while gap(s_lo) >= 0.0:
        s_lo *= 1e-3
        if s_lo < 1e-15 * edge.g_min:
            raise NoSolutionBelowEdge(
                "El outlier no quedó acotado por debajo del borde",
                detail={"alpha": alpha, "q": q, "d_alpha": edge.d_alpha, "g_min": edge.g_min},
            )
    s_star = float(brentq(gap, s_lo, edge.g_min, xtol=1e-15 * edge.g_min, rtol=4e-16, maxiter=500))
    x_star = inverse_stieltjes(s_star, nu, alpha)
    residual = abs(x_star - _signal_functional(s_star, nu, alpha, q))
    if residual > _OUTLIER_TOL * max(1.0, abs(x_star)):
        raise NoSolutionBelowEdge(
            "La ecuación del outlier no alcanzó la tolerancia",
            detail={"alpha": alpha, "q": q, "residual": residual, "s": s_star},
        )
    return _with_outlier(edge, min(x_star, edge.x_min))


def _with_outlier(edge: BBPResult, x_star: float) -> BBPResult:
    logger.info(
        "action=bbp_outlier alpha=%s q=%s x_star=%.10g w_star=%.10g d_alpha=%.6g",
        edge.alpha,
        edge.q,
        x_star,
        x_star - edge.t_nu,
        edge.d_alpha,
    )
    return BBPResult(
        alpha=edge.alpha,
        q=edge.q,
        g_min=edge.g_min,
        x_min=edge.x_min,
        x2=edge.x2,
        d_alpha=edge.d_alpha,
        t_nu=edge.t_nu,
        x_star=x_star,
    )


def bbp_threshold(
    nu_family: Callable[[float], WeightLaw],
    q: float,
    bracket: Tuple[float, float],
    tol: float | None = None,
) -> float:
    """α_BBP donde d(α) cruza cero, regenerando ν(α) en cada evaluación."""

    def d_of(alpha: float) -> float:
        return edge_functionals(nu_family(alpha), alpha, q).d_alpha

    alpha_bbp = threshold_bisect(d_of, bracket, tol)
    logger.info("action=bbp_threshold q=%s alpha_bbp=%.6g", q, alpha_bbp)
    return alpha_bbp


def minima_law_family(
    q: float,
    energy_class: str,
    *,
    loss: SingleIndexLoss,
    mode: str = "tilde0",
    options: SolverOptions | None = None,
) -> Callable[[float], WeightLaw]:
    """α ↦ ν(α) de los mínimos típicos (``typ``), de menor (``low``) o mayor (``high``) energía."""
    if energy_class not in ENERGY_CLASSES:
        raise ValueError(f"Clase de energía desconocida: {energy_class}")
    cache: Dict[float, WeightLaw] = {}

    def law(alpha: float) -> WeightLaw:
        key = float(alpha)
        if key in cache:
            return cache[key]
        free = complexity(q, None, key, mode, loss=loss, options=options)
        if energy_class == "typ":
            sol = free
        else:
            band = energy_band(q, key, mode, loss=loss, options=options, free=free)
            e = band.e_min if energy_class == "low" else band.e_max
            sol = complexity(q, e, key, mode, loss=loss, init=free.outer, options=options)  # type: ignore[arg-type]
        cache[key] = label_law(sol).weight_law()
        return cache[key]

    return law


__all__ = [
    "BBP_COLUMNS",
    "BBPResult",
    "ENERGY_CLASSES",
    "analyze",
    "bbp_threshold",
    "edge_functionals",
    "minima_law_family",
    "outlier_location",
]
