# Nombre de archivo: bisection.py
# Ubicación de archivo: core/kacrice/bisection.py
# Descripción: Bisección determinista de umbrales en alpha a partir de un predicado con cambio de signo

from __future__ import annotations

import logging
from typing import Callable, Dict, Tuple

from core.config import get_settings

from .errors import NoSignChange

logger = logging.getLogger(__name__)


def threshold_bisect(
    predicate: Callable[[float], float],
    bracket: Tuple[float, float],
    tol: float | None = None,
) -> float:
    """Raíz de ``predicate`` en ``bracket`` por bisección hasta un ancho ``tol``."""
    tol = get_settings().threshold_tol if tol is None else tol
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("El intervalo debe cumplir lo < hi")
    if not tol > 0.0:
        raise ValueError("tol debe ser > 0")

    cache: Dict[float, float] = {}

    def value(x: float) -> float:
        if x not in cache:
            cache[x] = float(predicate(x))
            logger.debug("action=threshold_bisect alpha=%s value=%.10g", x, cache[x])
        return cache[x]

    f_lo, f_hi = value(lo), value(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise NoSignChange(
            "El predicado no cambia de signo en el intervalo",
            detail={"lo": lo, "hi": hi, "f_lo": f_lo, "f_hi": f_hi},
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = value(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    logger.info("action=threshold_bisect root=%.6g evaluations=%s", root, len(cache))
    return root


__all__ = ["threshold_bisect"]
