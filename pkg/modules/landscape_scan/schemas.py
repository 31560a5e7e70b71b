# Nombre de archivo: schemas.py
# Ubicación de archivo: modules/landscape_scan/schemas.py
# Descripción: Modelos de datos para celdas del diagrama de fases, curvas de umbral y bandas en q

from __future__ import annotations

import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

NAN = float("nan")


class PhaseDiagramCell(BaseModel):
    """Complejidades a energía libre y diagnósticos BBP en un punto (α, q)."""

    a: float
    alpha: float
    q: float
    sigma_tilde0: float = NAN
    sigma_fin: float = NAN
    sigma_tc: float = NAN
    e_star: float = NAN
    e_min: float = NAN
    e_max: float = NAN
    d_alpha_typ: float = NAN
    d_alpha_low: float = NAN
    d_alpha_high: float = NAN
    flags: List[str] = Field(default_factory=list)

    def bound_chain_ok(self, tol: float) -> bool:
        """Σ̃₀ ≤ Σ_fin ≤ Σ_TC donde los tres valores existen."""
        values = [self.sigma_tilde0, self.sigma_fin, self.sigma_tc]
        ok = True
        for lo, hi in zip(values, values[1:]):
            if math.isfinite(lo) and math.isfinite(hi):
                ok = ok and lo <= hi + tol
        return ok

    def to_row(self) -> dict:
        row = self.model_dump()
        row["flags"] = "|".join(self.flags)
        return row


class ThresholdCurve(BaseModel):
    """Umbrales en α para un valor de q (NaN si no hay cruce en la grilla)."""

    a: float
    q: float
    alpha_triv_min: float = NAN
    alpha_triv_fin: float = NAN
    alpha_triv_tc: float = NAN
    alpha_bbp_typ: float = NAN
    alpha_bbp_low: float = NAN
    alpha_bbp_high: float = NAN
    flags: List[str] = Field(default_factory=list)

    def bbp_order_ok(self, tol: float) -> bool:
        """α_high ≤ α_typ ≤ α_low entre los umbrales BBP que existen."""
        values = [v for v in (self.alpha_bbp_high, self.alpha_bbp_typ, self.alpha_bbp_low) if math.isfinite(v)]
        return all(lo <= hi + tol for lo, hi in zip(values, values[1:]))

    def to_row(self) -> dict:
        row = self.model_dump()
        row["flags"] = "|".join(self.flags)
        return row


class OverlapPoint(BaseModel):
    a: float
    alpha: float
    e: Optional[float] = None
    q: float
    sigma: float = NAN
    flags: List[str] = Field(default_factory=list)

    def to_row(self) -> dict:
        row = self.model_dump()
        row["e"] = NAN if self.e is None else self.e
        row["flags"] = "|".join(self.flags)
        return row


class OverlapBand(BaseModel):
    """Σ̃₀(q, e) sobre una grilla de q y el intervalo de complejidad positiva."""

    points: List[OverlapPoint]
    positive_interval: Optional[Tuple[float, float]] = None

    @property
    def pairs(self) -> List[Tuple[float, float]]:
        return [(p.q, p.sigma) for p in self.points]
