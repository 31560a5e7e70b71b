# Nombre de archivo: measure.py
# Ubicación de archivo: core/kacrice/measure.py
# Descripción: Ley de etiquetas ν como medida inclinada normalizada sobre una regla de cuadratura

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import NonIntegrable
from .quadrature import (
    BaseGaussian,
    MomentBundle,
    QuadratureOptions,
    QuadratureRule,
    Tilt,
    TiltExponent,
    moments_on_rule,
    tilted_rule,
)
from .spectrum import WeightLaw

Array = NDArray[np.float64]


@dataclass(slots=True)
class TiltedMeasure:
    """ν(du) ∝ μ_q(du) e^{Φ(u)} representado por nodos y probabilidades."""

    base: BaseGaussian
    tilt: Tilt
    rule: QuadratureRule
    log_z: float
    probs: Array

    @classmethod
    def build(
        cls,
        base: BaseGaussian,
        tilt: Tilt,
        rule: QuadratureRule | None = None,
        options: QuadratureOptions | None = None,
    ) -> "TiltedMeasure":
        rule = rule if rule is not None else tilted_rule(base, tilt, options)
        phi = tilt.log_weight(rule.y, rule.y_star)
        inside = np.isfinite(phi)
        if not np.any(inside):
            raise NonIntegrable("La medida inclinada no tiene masa", detail={"q": base.q})
        sub = rule.subset(inside)
        phi = phi[inside]
        return cls(base=base, tilt=tilt, rule=sub, log_z=sub.log_partition(phi), probs=sub.probabilities(phi))

    @property
    def loss(self):
        return self.tilt.loss  # type: ignore[attr-defined]

    def expect(self, f: Callable[[Array, Array], Array]) -> float:
        """E_ν[f(y, y*)]."""
        return float(self.probs @ f(self.rule.y, self.rule.y_star))

    def moments(self) -> MomentBundle:
        if not isinstance(self.tilt, TiltExponent):
            raise TypeError("moments() solo aplica a inclinaciones con dominio B_g")
        return moments_on_rule(self.rule, self.tilt)

    def weight_law(self) -> WeightLaw:
        return WeightLaw.from_labels(self.rule.y, self.rule.y_star, self.loss, self.probs)

    def density_on_grid(self, y_grid: ArrayLike, y_star_grid: ArrayLike) -> Array:
        """Densidad conjunta normalizada de (y, y*) sobre la grilla producto."""
        gy, gys = np.meshgrid(np.asarray(y_grid, float), np.asarray(y_star_grid, float), indexing="ij")
        logd = self.base.log_density(gy.ravel(), gys.ravel()) + self.tilt.log_weight(gy.ravel(), gys.ravel())
        return np.exp(logd - self.log_z).reshape(gy.shape)

    def f_histogram(self, edges: ArrayLike) -> Tuple[Array, Array]:
        """Histograma normalizado (densidad) de F(u) bajo ν."""
        F = np.asarray(self.loss.d2(self.rule.y, self.rule.y_star))
        hist, bins = np.histogram(F, bins=np.asarray(edges, float), weights=self.probs, density=True)
        return hist, bins

    def quantiles(self, which: str, levels: ArrayLike) -> Array:
        """Cuantiles de y, y* o F bajo ν."""
        if which == "y":
            values = self.rule.y
        elif which == "y_star":
            values = self.rule.y_star
        elif which == "F":
            values = np.asarray(self.loss.d2(self.rule.y, self.rule.y_star))
        else:
            raise ValueError(f"Variable desconocida para cuantiles: {which}")
        order = np.argsort(values, kind="stable")
        cum = np.cumsum(self.probs[order])
        return np.interp(np.asarray(levels, float), cum, values[order])


__all__ = ["TiltedMeasure"]
