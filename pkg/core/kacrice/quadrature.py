# Nombre de archivo: quadrature.py
# Ubicación de archivo: core/kacrice/quadrature.py
# Descripción: Cuadratura adaptativa 2-D sobre la gaussiana base μ_q y medidas inclinadas restringidas a B_g

"""Esperanzas bajo μ_q y bajo sus inclinaciones exponenciales.

La integración usa subdivisión adaptativa de celdas con regla tensorial
Gauss-Legendre. El error de cada celda se estima comparando la regla sobre la
celda con la suma de la misma regla sobre sus cuatro hijas; se refinan las
celdas de mayor error hasta cumplir ``rtol``/``atol`` por componente.

La subdivisión final se devuelve como :class:`QuadratureRule` (nodos y pesos
en escala logarítmica, incluyendo la densidad de μ_q) para reevaluar
integrales con distintos multiplicadores sin volver a adaptar.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Optional, Protocol, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

from core.config import get_settings

from .errors import NonIntegrable, ToleranceNotMet
from .loss import SingleIndexLoss, derived_arrays

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

# Masa despreciable relativa al pico en el borde de la caja.
_RING_LOG_FLOOR = float(np.log(1e-13))
_PEAK_POINTS = 65
_RING_POINTS = 257


@dataclass(slots=True, frozen=True)
class QuadratureOptions:
    rtol: float = 1e-7
    atol: float = 1e-9
    max_cells: int = 6000
    order: int = 6
    r_min: float = 8.0
    r_max: float = 64.0

    @classmethod
    def from_settings(cls) -> "QuadratureOptions":
        settings = get_settings()
        return cls(
            rtol=settings.quad_rtol,
            atol=settings.quad_atol,
            max_cells=settings.quad_max_cells,
            order=settings.quad_order,
        )


@dataclass(slots=True, frozen=True)
class BaseGaussian:
    """Ley normal bivariada de (y, y*) con covarianza [[1, q], [q, 1]]."""

    q: float

    def __post_init__(self) -> None:
        if not abs(self.q) < 1.0:
            raise ValueError("La correlación q de μ_q debe cumplir |q| < 1")

    def log_density(self, y: Array, y_star: Array) -> Array:
        q = self.q
        one_m_q2 = 1.0 - q * q
        quad = (y * y - 2.0 * q * y * y_star + y_star * y_star) / (2.0 * one_m_q2)
        return -quad - np.log(2.0 * np.pi * np.sqrt(one_m_q2))


class Tilt(Protocol):
    """Exponente Φ(u) de una medida inclinada."""

    q: float

    def log_weight(self, y: Array, y_star: Array) -> Array: ...

    def moment_functions(self, y: Array, y_star: Array) -> Dict[str, Array]: ...


# Orden de los multiplicadores en la forma lineal Φ = base + S·λ.
MULTIPLIER_NAMES: Tuple[str, ...] = ("lambda_A", "lambda_c", "lambda_e", "lambda_t", "lambda_h", "lambda_star")


@dataclass(slots=True, frozen=True)
class TiltExponent:
    """Inclinación de las fórmulas de mínimos y sillas de índice finito, restringida a B_g."""

    loss: SingleIndexLoss
    alpha: float
    q: float
    g: float
    lambda_A: float = 0.0
    lambda_c: float = 0.0
    lambda_e: float = 0.0
    lambda_t: float = 0.0
    lambda_h: float = 0.0
    lambda_star: float = 0.0

    def __post_init__(self) -> None:
        if not self.alpha > 1.0:
            raise ValueError("alpha debe ser > 1")
        if not self.g > 0.0:
            raise ValueError("g debe ser > 0")
        if not abs(self.q) < 1.0:
            raise ValueError("El overlap q debe cumplir |q| < 1")
        if self.lambda_h < 0.0 or self.lambda_star < 0.0:
            raise ValueError("lambda_h y lambda_star deben ser ≥ 0")

    @property
    def multipliers(self) -> Array:
        return np.array(
            [self.lambda_A, self.lambda_c, self.lambda_e, self.lambda_t, self.lambda_h, self.lambda_star]
        )

    @property
    def covers_plane(self) -> bool:
        """True si α + g·F(u) > 0 para todo u (B_g = ℝ²)."""
        return self.alpha + self.g * self.loss.hessian_lower_bound > 0.0

    def in_domain(self, y: Array, y_star: Array) -> NDArray[np.bool_]:
        return self.alpha + self.g * self.loss.d2(y, y_star) > 0.0

    def linear_form(self, y: Array, y_star: Array) -> Tuple[Array, Array, NDArray[np.bool_]]:
        """Descompone Φ = base + S·λ sobre los puntos dados.

        Retorna ``(base, S, inside)``; las filas fuera de B_g quedan con
        ``base = -inf`` y ``S = 0``.
        """
        fx = derived_arrays(y, y_star, self.q, self.loss)
        ell = self.loss.value(y, y_star)
        den = self.alpha + self.g * fx.F
        inside = den > 0.0
        safe = np.where(inside, den, 1.0)
        ratio = fx.F / safe
        S = np.column_stack(
            [
                -fx.A,
                -fx.c_q,
                -ell,
                -fx.t / self.alpha + ratio,
                -np.square(self.g * ratio),
                fx.K_q / self.alpha,
            ]
        )
        S[~inside] = 0.0
        base = np.where(inside, np.log(safe) - self.g * fx.t / self.alpha, -np.inf)
        return base, S, inside

    def log_weight(self, y: Array, y_star: Array) -> Array:
        base, S, inside = self.linear_form(y, y_star)
        phi = base + S @ self.multipliers
        return np.where(inside, phi, -np.inf)

    def moment_functions(self, y: Array, y_star: Array) -> Dict[str, Array]:
        fx = derived_arrays(y, y_star, self.q, self.loss)
        den = self.alpha + self.g * fx.F
        inside = den > 0.0
        safe = np.where(inside, den, 1.0)
        ratio = np.where(inside, fx.F / safe, 0.0)
        return {
            "A": fx.A,
            "c_q": fx.c_q,
            "ell": self.loss.value(y, y_star),
            "t": fx.t,
            "K_q": fx.K_q,
            "f_ratio": ratio,
            "edge_sq": np.square(self.g * ratio),
            "f2_ratio": np.square(ratio),
            "f3_ratio": np.square(ratio) / safe,
        }


@dataclass(slots=True, frozen=True)
class TCTilt:
    """Inclinación de la fórmula de todos los puntos críticos (g complejo, dominio ℝ²)."""

    loss: SingleIndexLoss
    alpha: float
    q: float
    g: complex
    lambda_A: float = 0.0
    lambda_c: float = 0.0
    lambda_e: float = 0.0

    def __post_init__(self) -> None:
        if not self.alpha > 1.0:
            raise ValueError("alpha debe ser > 1")
        if not abs(self.q) < 1.0:
            raise ValueError("El overlap q debe cumplir |q| < 1")
        if not complex(self.g).imag > 0.0:
            raise ValueError("g debe pertenecer al semiplano superior (Im g > 0)")

    def log_weight(self, y: Array, y_star: Array) -> Array:
        fx = derived_arrays(y, y_star, self.q, self.loss)
        ell = self.loss.value(y, y_star)
        g = complex(self.g)
        return (
            -self.lambda_c * fx.c_q
            - self.lambda_A * fx.A
            - self.lambda_e * ell
            + np.log(np.abs(self.alpha + fx.F * g))
            - g.real * fx.t / self.alpha
        )

    def moment_functions(self, y: Array, y_star: Array) -> Dict[str, Array]:
        fx = derived_arrays(y, y_star, self.q, self.loss)
        ratio = fx.F / (self.alpha + complex(self.g) * fx.F)
        return {
            "A": fx.A,
            "c_q": fx.c_q,
            "ell": self.loss.value(y, y_star),
            "t": fx.t,
            "K_q": fx.K_q,
            "f_ratio_re": ratio.real,
            "f_ratio_im": ratio.imag,
        }


@dataclass(slots=True)
class MomentBundle:
    """Normalización y esperanzas bajo la ley inclinada normalizada."""

    log_z: float
    A: float
    c_q: float
    ell: float
    t: float
    K_q: float
    f_ratio: float
    edge_sq: float
    f2_ratio: float
    f3_ratio: float

    @property
    def Z(self) -> float:
        return float(np.exp(self.log_z))


@dataclass(slots=True)
class QuadratureRule:
    """Nodos y log-pesos (incluye la densidad de μ_q) de una subdivisión adaptada."""

    y: Array
    y_star: Array
    log_w: Array
    radius: float
    n_cells: int
    rel_error: float
    _cache: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return int(self.y.size)

    def subset(self, mask: NDArray[np.bool_]) -> "QuadratureRule":
        return QuadratureRule(
            y=self.y[mask],
            y_star=self.y_star[mask],
            log_w=self.log_w[mask],
            radius=self.radius,
            n_cells=self.n_cells,
            rel_error=self.rel_error,
        )

    def cached(self, key: str, builder: Callable[[], object]) -> object:
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def log_partition(self, phi: Array) -> float:
        return float(logsumexp(self.log_w + phi))

    def probabilities(self, phi: Array) -> Array:
        logits = self.log_w + phi
        return np.exp(logits - logsumexp(logits))


@lru_cache(maxsize=16)
def _gauss_legendre_2d(order: int) -> Tuple[Array, Array, Array]:
    x, w = np.polynomial.legendre.leggauss(order)
    xi, eta = np.meshgrid(x, x, indexing="ij")
    return xi.ravel(), eta.ravel(), np.outer(w, w).ravel()


def _cell_nodes(cells: Array, order: int) -> Tuple[Array, Array, Array]:
    xi, eta, w = _gauss_legendre_2d(order)
    cx = 0.5 * (cells[:, 0] + cells[:, 1])
    hx = 0.5 * (cells[:, 1] - cells[:, 0])
    cy = 0.5 * (cells[:, 2] + cells[:, 3])
    hy = 0.5 * (cells[:, 3] - cells[:, 2])
    y = cx[:, None] + hx[:, None] * xi[None, :]
    ys = cy[:, None] + hy[:, None] * eta[None, :]
    lw = np.log(hx * hy)[:, None] + np.log(w)[None, :]
    return y, ys, lw


def _split(cells: Array) -> Array:
    x0, x1, y0, y1 = cells.T
    xm = 0.5 * (x0 + x1)
    ym = 0.5 * (y0 + y1)
    children = np.stack(
        [
            np.stack([x0, xm, y0, ym], axis=1),
            np.stack([xm, x1, y0, ym], axis=1),
            np.stack([x0, xm, ym, y1], axis=1),
            np.stack([xm, x1, ym, y1], axis=1),
        ],
        axis=1,
    )
    return children.reshape(-1, 4)


# Integrando vectorial: (y, y*) -> (Φ, matriz de funciones de forma (n, m)).
Integrand = Callable[[Array, Array], Tuple[Array, Array]]


class _Adapter:
    """Estado de la subdivisión adaptativa para un integrando vectorial."""

    def __init__(self, base: BaseGaussian, integrand: Integrand, shift: float, order: int) -> None:
        self.base = base
        self.integrand = integrand
        self.shift = shift
        self.order = order

    def _integrate_cells(self, cells: Array) -> Array:
        y, ys, lw = _cell_nodes(cells, self.order)
        k, p = y.shape
        phi, feats = self.integrand(y.ravel(), ys.ravel())
        logits = lw.ravel() + self.base.log_density(y.ravel(), ys.ravel()) + phi - self.shift
        weights = np.exp(logits)
        vals = weights[:, None] * feats
        return vals.reshape(k, p, -1).sum(axis=1)

    def evaluate(self, cells: Array) -> Tuple[Array, Array]:
        k = cells.shape[0]
        coarse = self._integrate_cells(cells)
        fine = self._integrate_cells(_split(cells)).reshape(k, 4, coarse.shape[1]).sum(axis=1)
        return fine, np.abs(fine - coarse)


def _peak_log_integrand(base: BaseGaussian, tilt: Optional[Tilt], y: Array, ys: Array) -> Array:
    out = base.log_density(y, ys)
    if tilt is not None:
        out = out + tilt.log_weight(y, ys)
    return out


def _choose_radius(base: BaseGaussian, tilt: Optional[Tilt], options: QuadratureOptions) -> Tuple[float, float]:
    """Radio de truncamiento R y desplazamiento logarítmico del integrando.

    Duplica R hasta que el anillo del borde quede por debajo del piso
    relativo; si el integrando crece hacia afuera en el anillo se declara no
    integrable.
    """
    radius = options.r_min
    while True:
        grid = np.linspace(-radius, radius, _PEAK_POINTS)
        gy, gys = np.meshgrid(grid, grid, indexing="ij")
        sample = _peak_log_integrand(base, tilt, gy.ravel(), gys.ravel())
        finite = sample[np.isfinite(sample)]
        if finite.size == 0:
            raise NonIntegrable(
                "La medida inclinada no tiene masa en la caja de integración",
                detail={"radius": radius},
            )
        peak = float(finite.max())

        s = np.linspace(-1.0, 1.0, _RING_POINTS)
        ones = np.ones_like(s)
        ring_y = np.concatenate([s, s, ones, -ones])
        ring_ys = np.concatenate([ones, -ones, s, s])
        inner = _peak_log_integrand(base, tilt, radius * ring_y, radius * ring_ys)
        outer = _peak_log_integrand(base, tilt, 1.5 * radius * ring_y, 1.5 * radius * ring_ys)
        both = np.isfinite(inner) & np.isfinite(outer)
        growing = both & (outer > inner) & (outer > peak + _RING_LOG_FLOOR)
        if np.any(growing):
            raise NonIntegrable(
                "El integrando crece hacia afuera en el borde de la caja",
                detail={"radius": radius, "puntos": int(growing.sum())},
            )
        ring_max = float(np.max(inner[np.isfinite(inner)], initial=-np.inf))
        if ring_max - peak < _RING_LOG_FLOOR:
            return radius, peak
        if radius * 2.0 > options.r_max:
            raise NonIntegrable(
                "La cola del integrando no decae dentro del radio máximo",
                detail={"radius": radius, "ring_excess": ring_max - peak},
            )
        radius *= 2.0


def adapt(
    base: BaseGaussian,
    tilt: Optional[Tilt],
    integrand: Integrand,
    options: QuadratureOptions | None = None,
) -> Tuple[QuadratureRule, Array, float]:
    """Subdivide la caja [-R, R]² hasta cumplir la tolerancia de cada componente.

    Retorna la regla adaptada, las integrales estimadas (escaladas por
    ``exp(-shift)``) y el ``shift`` logarítmico.
    """
    options = options or QuadratureOptions.from_settings()
    radius, shift = _choose_radius(base, tilt, options)
    n0 = max(16, 2 * int(np.ceil(radius)))
    edges = np.linspace(-radius, radius, n0 + 1)
    x0, y0 = np.meshgrid(edges[:-1], edges[:-1], indexing="ij")
    x1, y1 = np.meshgrid(edges[1:], edges[1:], indexing="ij")
    cells = np.column_stack([x0.ravel(), x1.ravel(), y0.ravel(), y1.ravel()])

    adapter = _Adapter(base, integrand, shift, options.order)
    fine, err = adapter.evaluate(cells)
    while True:
        total = fine.sum(axis=0)
        tol = options.rtol * np.abs(total) + options.atol
        tol = np.maximum(tol, np.finfo(float).tiny)
        err_total = err.sum(axis=0)
        if np.all(err_total <= tol):
            break
        if cells.shape[0] >= options.max_cells:
            raise ToleranceNotMet(
                "Presupuesto de subdivisión agotado sin alcanzar la tolerancia",
                detail={
                    "cells": int(cells.shape[0]),
                    "rel_error": float(np.max(err_total / np.maximum(np.abs(total), tol))),
                },
            )
        ratio = np.max(err / tol[None, :], axis=1)
        order = np.argsort(-ratio, kind="stable")
        n_refine = max(1, min(cells.shape[0] // 8, (options.max_cells - cells.shape[0]) // 3))
        chosen = np.sort(order[:n_refine])
        keep = np.ones(cells.shape[0], dtype=bool)
        keep[chosen] = False
        children = _split(cells[chosen])
        c_fine, c_err = adapter.evaluate(children)
        cells = np.concatenate([cells[keep], children])
        fine = np.concatenate([fine[keep], c_fine])
        err = np.concatenate([err[keep], c_err])

    total = fine.sum(axis=0)
    rel_error = float(np.max(err.sum(axis=0) / np.maximum(np.abs(total), np.finfo(float).tiny)))
    y, ys, lw = _cell_nodes(_split(cells), options.order)
    y, ys = y.ravel(), ys.ravel()
    rule = QuadratureRule(
        y=y,
        y_star=ys,
        log_w=lw.ravel() + base.log_density(y, ys),
        radius=radius,
        n_cells=int(cells.shape[0]),
        rel_error=rel_error,
    )
    logger.debug(
        "action=adapt radius=%s cells=%s nodes=%s rel_error=%.3e", radius, rule.n_cells, rule.size, rel_error
    )
    return rule, total, shift


def _moment_integrand(tilt: Tilt, names: Tuple[str, ...]) -> Integrand:
    def integrand(y: Array, ys: Array) -> Tuple[Array, Array]:
        phi = tilt.log_weight(y, ys)
        inside = np.isfinite(phi)
        feats = np.zeros((y.size, len(names) + 1))
        feats[:, 0] = 1.0
        if np.any(inside):
            funcs = tilt.moment_functions(y[inside], ys[inside])
            for j, name in enumerate(names, start=1):
                feats[inside, j] = funcs[name]
        return np.where(inside, phi, -np.inf), feats

    return integrand


def tilted_rule(
    base: BaseGaussian, tilt: Tilt, options: QuadratureOptions | None = None
) -> QuadratureRule:
    """Regla adaptada a la normalización y a todos los momentos de la inclinación."""
    sample = tilt.moment_functions(np.zeros(1), np.ones(1))
    names = tuple(sample)
    rule, _, _ = adapt(base, tilt, _moment_integrand(tilt, names), options)
    return rule


def expect(
    base: BaseGaussian,
    tilt: Optional[Tilt],
    f: Callable[[Array, Array], Array],
    options: QuadratureOptions | None = None,
) -> float:
    """∫ μ_q(du) e^{Φ(u)} f(u) sobre B_g (o ℝ² sin inclinación).

    ``f`` solo se evalúa en puntos del dominio.
    """

    def integrand(y: Array, ys: Array) -> Tuple[Array, Array]:
        if tilt is None:
            phi = np.zeros_like(y)
        else:
            phi = tilt.log_weight(y, ys)
        inside = np.isfinite(phi)
        feats = np.zeros((y.size, 2))
        feats[:, 0] = 1.0
        if np.any(inside):
            feats[inside, 1] = f(y[inside], ys[inside])
        return np.where(inside, phi, -np.inf), feats

    _, total, shift = adapt(base, tilt, integrand, options)
    return float(total[1] * np.exp(shift))


def log_partition(base: BaseGaussian, tilt: Tilt, options: QuadratureOptions | None = None) -> float:
    """log ∫_{B_g} μ_q(du) e^{Φ(u)}."""

    def integrand(y: Array, ys: Array) -> Tuple[Array, Array]:
        phi = tilt.log_weight(y, ys)
        return phi, np.ones((y.size, 1))

    _, total, shift = adapt(base, tilt, integrand, options)
    if not total[0] > 0.0:
        raise NonIntegrable("Normalización nula: B_g sin masa", detail={"q": base.q})
    return float(np.log(total[0]) + shift)


def moments_on_rule(rule: QuadratureRule, tilt: TiltExponent) -> MomentBundle:
    """Momentos de una :class:`TiltExponent` evaluados sobre una regla fija."""
    phi = tilt.log_weight(rule.y, rule.y_star)
    inside = np.isfinite(phi)
    if not np.any(inside):
        raise NonIntegrable("Normalización nula: B_g sin masa", detail={"g": tilt.g})
    sub = rule.subset(inside)
    phi = phi[inside]
    p = sub.probabilities(phi)
    funcs = tilt.moment_functions(sub.y, sub.y_star)
    return MomentBundle(
        log_z=sub.log_partition(phi),
        **{name: float(p @ values) for name, values in funcs.items()},
    )


def moments(base: BaseGaussian, tilt: TiltExponent, options: QuadratureOptions | None = None) -> MomentBundle:
    """Las nueve esperanzas normalizadas más la normalización Z."""
    rule = tilted_rule(base, tilt, options)
    return moments_on_rule(rule, tilt)


__all__ = [
    "BaseGaussian",
    "MULTIPLIER_NAMES",
    "MomentBundle",
    "QuadratureOptions",
    "QuadratureRule",
    "TCTilt",
    "Tilt",
    "TiltExponent",
    "adapt",
    "expect",
    "log_partition",
    "moments",
    "moments_on_rule",
    "tilted_rule",
]
