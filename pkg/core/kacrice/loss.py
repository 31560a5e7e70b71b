# Nombre de archivo: loss.py
# Ubicación de archivo: core/kacrice/loss.py
# Descripción: Pérdidas de modelos single-index, derivadas cerradas y funciones derivadas A, c_q, F, t, K_q

"""Interfaz de pérdida y registro de instancias.

Todas las funciones aceptan escalares o arrays de numpy (evaluación
vectorizada sobre nodos de cuadratura o muestras empíricas).
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, List, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

Real = Union[float, NDArray[np.float64]]


@dataclass(slots=True, frozen=True)
class LabelPoint:
    """Par de etiquetas u = (y, y*) con y = x·θ e y* = x·θ*."""

    y: float
    y_star: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.y) and np.isfinite(self.y_star)):
            raise ValueError("Las etiquetas (y, y*) deben ser reales finitos")


class SingleIndexLoss(ABC):
    """Pérdida ℓ(y, y*) suave en y con derivadas cerradas."""

    name: str = "abstract"

    @abstractmethod
    def value(self, y: ArrayLike, y_star: ArrayLike) -> Real: ...

    @abstractmethod
    def d1(self, y: ArrayLike, y_star: ArrayLike) -> Real:
        """Derivada parcial ∂₁ℓ respecto de la predicción."""

    @abstractmethod
    def d2(self, y: ArrayLike, y_star: ArrayLike) -> Real:
        """Derivada segunda ∂₁²ℓ (el peso F de la Hessiana)."""

    @property
    @abstractmethod
    def hessian_lower_bound(self) -> float:
        """Cota inferior global de ∂₁²ℓ; define cuándo B_g cubre todo ℝ²."""

    @abstractmethod
    def params(self) -> Dict[str, float]: ...


@dataclass(slots=True, frozen=True)
class PhaseRetrievalLoss(SingleIndexLoss):
    """ℓ_a(y, y*) = (y² − y*²)² / (a + y*²)."""

    a: float
    name: str = "phase_retrieval"

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError("El parámetro de normalización a debe ser > 0")

    def value(self, y: ArrayLike, y_star: ArrayLike) -> Real:
        y = np.asarray(y, dtype=float)
        ys2 = np.square(y_star, dtype=float)
        return np.square(y * y - ys2) / (self.a + ys2)

    def d1(self, y: ArrayLike, y_star: ArrayLike) -> Real:
        y = np.asarray(y, dtype=float)
        ys2 = np.square(y_star, dtype=float)
        return 4.0 * y * (y * y - ys2) / (self.a + ys2)

    def d2(self, y: ArrayLike, y_star: ArrayLike) -> Real:
        y = np.asarray(y, dtype=float)
        ys2 = np.square(y_star, dtype=float)
        return (12.0 * y * y - 4.0 * ys2) / (self.a + ys2)

    @property
    def hessian_lower_bound(self) -> float:
        # F ≥ −4 y*²/(a + y*²) > −4
        return -4.0

    def params(self) -> Dict[str, float]:
        return {"a": float(self.a)}


@dataclass(slots=True)
class DerivedFunctions:
    """Funciones escalares de u que entran en las fórmulas variacionales."""

    A: Real
    c_q: Real
    F: Real
    t: Real
    K_q: Real


def _check_overlap(q: float) -> None:
    if not abs(q) < 1.0:
        raise ValueError("El overlap q debe cumplir |q| < 1")


def eval_loss(u: LabelPoint, model: SingleIndexLoss) -> float:
    return float(model.value(u.y, u.y_star))


def first_deriv(u: LabelPoint, model: SingleIndexLoss) -> float:
    return float(model.d1(u.y, u.y_star))


def second_deriv(u: LabelPoint, model: SingleIndexLoss) -> float:
    return float(model.d2(u.y, u.y_star))


def derived_arrays(y: ArrayLike, y_star: ArrayLike, q: float, model: SingleIndexLoss) -> DerivedFunctions:
    """Versión vectorizada de :func:`derived` sobre arrays de etiquetas."""
    _check_overlap(q)
    y = np.asarray(y, dtype=float)
    y_star = np.asarray(y_star, dtype=float)
    dl = model.d1(y, y_star)
    F = model.d2(y, y_star)
    resid = y_star - q * y
    one_m_q2 = 1.0 - q * q
    t = y * dl
    return DerivedFunctions(
        A=dl * dl,
        c_q=resid / np.sqrt(one_m_q2) * dl,
        F=F,
        t=t,
        K_q=F * resid * resid / one_m_q2 - t,
    )


def derived(u: LabelPoint, q: float, model: SingleIndexLoss) -> DerivedFunctions:
    fx = derived_arrays(u.y, u.y_star, q, model)
    return DerivedFunctions(
        A=float(fx.A), c_q=float(fx.c_q), F=float(fx.F), t=float(fx.t), K_q=float(fx.K_q)
    )


LossFactory = Callable[..., SingleIndexLoss]


class LossRegistry:
    """Registro de pérdidas disponibles por nombre."""

    def __init__(self) -> None:
        self._factories: Dict[str, LossFactory] = {}

    def register(self, name: str, factory: LossFactory) -> None:
        if name in self._factories:
            raise ValueError(f"La pérdida '{name}' ya está registrada")
        self._factories[name] = factory
        logger.debug("action=register_loss name=%s", name)

    def create(self, name: str, **params: float) -> SingleIndexLoss:
        try:
            factory = self._factories[name]
        except KeyError as exc:
            raise ValueError(f"Pérdida desconocida: '{name}'") from exc
        return factory(**params)

    def list_losses(self) -> List[str]:
        return sorted(self._factories)


LOSS_REGISTRY = LossRegistry()
LOSS_REGISTRY.register("phase_retrieval", PhaseRetrievalLoss)


def get_loss(name: str = "phase_retrieval", **params: float) -> SingleIndexLoss:
    return LOSS_REGISTRY.create(name, **params)


__all__ = [
    "DerivedFunctions",
    "LOSS_REGISTRY",
    "LabelPoint",
    "LossRegistry",
    "PhaseRetrievalLoss",
    "SingleIndexLoss",
    "derived",
    "derived_arrays",
    "eval_loss",
    "first_deriv",
    "get_loss",
    "second_deriv",
]
