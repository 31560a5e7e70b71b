# Nombre de archivo: errors.py
# Ubicación de archivo: core/kacrice/errors.py
# Descripción: Jerarquía de errores controlados de los solvers Kac-Rice y del simulador

"""Errores con código estable y categoría de salida para la CLI."""

from __future__ import annotations

from typing import Any, ClassVar, Dict


class KacRiceError(Exception):
    """Error controlado de un cálculo numérico.

    ``code`` identifica el error en registros y CSV; ``category`` decide el
    código de salida de la CLI (``infeasible`` → 3, ``not_converged`` → 2).
    """

    code: ClassVar[str] = "kacrice_error"
    category: ClassVar[str] = "not_converged"

    def __init__(self, message: str, *, detail: Dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.detail: Dict[str, Any] = dict(detail or {})

    def __str__(self) -> str:
        if not self.detail:
            return self.message
        extra = " ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"{self.message} ({extra})"


class NonIntegrable(KacRiceError):
    code = "non_integrable"
    category = "infeasible"


class ToleranceNotMet(KacRiceError):
    code = "tolerance_not_met"


class NoConvergence(KacRiceError):
    code = "no_convergence"


class EdgeNotFound(KacRiceError):
    code = "edge_not_found"
    category = "infeasible"


class InnerDiverged(KacRiceError):
    code = "inner_diverged"
    category = "infeasible"


class OuterStalled(KacRiceError):
    code = "outer_stalled"


class NoFixedPoint(KacRiceError):
    code = "no_fixed_point"


class ImCollapse(KacRiceError):
    code = "im_collapse"


class NoSolutionBelowEdge(KacRiceError):
    code = "no_solution_below_edge"


class NoSignChange(KacRiceError):
    code = "no_sign_change"
    category = "infeasible"


class EmptyBand(KacRiceError):
    code = "empty_band"
    category = "infeasible"


class UnbracketedEdge(KacRiceError):
    code = "unbracketed_edge"
    category = "infeasible"


class NotConverged(KacRiceError):
    code = "not_converged"


class NaNEncountered(KacRiceError):
    code = "nan_encountered"


class DegenerateOrth(KacRiceError):
    code = "degenerate_orth"


class KeyMismatch(KacRiceError):
    code = "key_mismatch"
    category = "infeasible"


__all__ = [
    "DegenerateOrth",
    "EdgeNotFound",
    "EmptyBand",
    "ImCollapse",
    "InnerDiverged",
    "KacRiceError",
    "KeyMismatch",
    "NaNEncountered",
    "NoConvergence",
    "NoFixedPoint",
    "NoSignChange",
    "NoSolutionBelowEdge",
    "NonIntegrable",
    "NotConverged",
    "OuterStalled",
    "ToleranceNotMet",
    "UnbracketedEdge",
]
