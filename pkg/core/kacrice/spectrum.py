# Nombre de archivo: spectrum.py
# Ubicación de archivo: core/kacrice/spectrum.py
# Descripción: Ecuación de Marchenko-Pastur generalizada, densidad espectral, borde izquierdo y densidad de la Hessiana

"""Espectro de la matriz de Wishart pesada Z D Zᵀ/n con pesos F(u), u ∼ ν.

La transformada de Stieltjes g(z) resuelve
``g = -[z - α E_ν[F/(α + gF)]]⁻¹`` y la densidad se recupera por inversión de
Stieltjes-Perron ``Im g(x + iε)/π``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import brentq

from .errors import EdgeNotFound, NoConvergence
from .loss import SingleIndexLoss

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

_RESIDUAL_TOL = 1e-10
_NEWTON_MAX_ITER = 60
_FIXED_POINT_MAX_ITER = 400


@dataclass(slots=True, frozen=True)
class WeightLaw:
    """Ley discreta de pesos F con etiquetas opcionales.

    Sirve tanto para una medida inclinada (nodos de cuadratura con sus
    probabilidades) como para una muestra empírica o átomos analíticos.
    """

    f: Array
    p: Array
    y: Optional[Array] = None
    y_star: Optional[Array] = None
    loss: Optional[SingleIndexLoss] = None

    @classmethod
    def from_atoms(cls, values: ArrayLike, probs: ArrayLike | None = None) -> "WeightLaw":
        f = np.atleast_1d(np.asarray(values, dtype=float))
        p = np.full(f.size, 1.0 / f.size) if probs is None else np.asarray(probs, dtype=float)
        if p.shape != f.shape or np.any(p < 0) or not np.isclose(p.sum(), 1.0):
            raise ValueError("Las probabilidades de los átomos deben ser ≥ 0 y sumar 1")
        return cls(f=f, p=p)

    @classmethod
    def constant(cls, value: float = 1.0) -> "WeightLaw":
        return cls.from_atoms([value])

    @classmethod
    def from_labels(
        cls,
        y: ArrayLike,
        y_star: ArrayLike,
        loss: SingleIndexLoss,
        probs: ArrayLike | None = None,
        *,
        f_override: float | None = None,
    ) -> "WeightLaw":
        """Ley sobre pares (y, y*) con F = ∂₁²ℓ (o un peso constante ``f_override``)."""
        y = np.asarray(y, dtype=float).ravel()
        y_star = np.asarray(y_star, dtype=float).ravel()
        p = np.full(y.size, 1.0 / y.size) if probs is None else np.asarray(probs, dtype=float).ravel()
        keep = p > 0.0
        y, y_star, p = y[keep], y_star[keep], p[keep] / p[keep].sum()
        f = np.full(y.size, float(f_override)) if f_override is not None else np.asarray(loss.d2(y, y_star))
        return cls(f=f, p=p, y=y, y_star=y_star, loss=loss)

    @property
    def has_labels(self) -> bool:
        return self.y is not None and self.y_star is not None and self.loss is not None

    def expect(self, h: Callable[[Array], Array]) -> float:
        return float(self.p @ h(self.f))

    def expect_labels(self, h: Callable[[Array, Array, Array], Array]) -> float:
        """E_ν[h(y, y*, F)]; requiere etiquetas."""
        if not self.has_labels:
            raise ValueError("La ley de pesos no tiene etiquetas (y, y*)")
        return float(self.p @ h(self.y, self.y_star, self.f))

    @property
    def t_mean(self) -> float:
        """t(ν) = E_ν[y ∂₁ℓ(y, y*)]."""
        if not self.has_labels:
            return 0.0
        assert self.loss is not None and self.y is not None
        return float(self.p @ (self.y * self.loss.d1(self.y, self.y_star)))

    @property
    def f_min(self) -> float:
        return float(self.f.min())


@dataclass(slots=True)
class SpectrumResult:
    """Densidad sobre una grilla, borde izquierdo y transformada en el borde."""

    w: Array
    density: Array
    x_min: float
    g_min: float
    t_nu: float
    eps: float
    shifted: bool = False
    failed: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def left_edge(self) -> float:
        return self.x_min - self.t_nu if self.shifted else self.x_min

    @property
    def mass(self) -> float:
        return float(np.trapezoid(self.density, self.w))

    def cdf(self, points: ArrayLike) -> Array:
        """CDF de la densidad tabulada, normalizada a masa 1."""
        cum = cumulative_trapezoid(self.density, self.w, initial=0.0)
        cum = cum / cum[-1] if cum[-1] > 0 else cum
        return np.interp(np.asarray(points, dtype=float), self.w, cum, left=0.0, right=1.0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"w": self.w, "rho": self.density})


def _mp_moments(g: complex, nu: WeightLaw, alpha: float) -> Tuple[complex, complex]:
    r = nu.f / (alpha + g * nu.f)
    return complex(nu.p @ r), complex(nu.p @ (r * r))


def _residual(z: complex, g: complex, nu: WeightLaw, alpha: float) -> complex:
    m1, _ = _mp_moments(g, nu, alpha)
    return g + 1.0 / (z - alpha * m1)


def _newton(z: complex, g: complex, nu: WeightLaw, alpha: float) -> Tuple[complex, float]:
    """Newton amortiguado sobre G(g) = g + 1/(z − α E[F/(α+gF)])."""
    res = abs(_residual(z, g, nu, alpha))
    for _ in range(_NEWTON_MAX_ITER):
        if res < _RESIDUAL_TOL:
            break
        m1, m2 = _mp_moments(g, nu, alpha)
        h = z - alpha * m1
        G = g + 1.0 / h
        dG = 1.0 - alpha * m2 / (h * h)
        if dG == 0:
            break
        step = G / dG
        lam = 1.0
        while lam > 1e-6:
            cand = g - lam * step
            if cand.imag > 0:
                cand_res = abs(_residual(z, cand, nu, alpha))
                if cand_res < res:
                    g, res = cand, cand_res
                    break
            lam *= 0.5
        else:
            break
    return g, res


def _fixed_point(z: complex, g: complex, nu: WeightLaw, alpha: float, damping: float = 0.5) -> complex:
    for _ in range(_FIXED_POINT_MAX_ITER):
        m1, _ = _mp_moments(g, nu, alpha)
        new = -1.0 / (z - alpha * m1)
        nxt = (1.0 - damping) * g + damping * new
        if abs(nxt - g) < 1e-13 * max(1.0, abs(g)):
            return nxt
        g = nxt
    return g


def stieltjes_at(z: complex, nu: WeightLaw, alpha: float, g0: complex | None = None) -> complex:
    """Transformada de Stieltjes de μ_α[ν] en ``z`` (Im z > 0).

    Con ``g0`` se intenta primero Newton desde ese arranque (continuación
    sobre una grilla); si falla se desciende en Im z desde 1 con punto fijo
    amortiguado y pulido de Newton, rechazando ramas con Im g ≤ 0.
    """
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("stieltjes_at requiere Im z > 0")
    if not alpha > 1.0:
        raise ValueError("alpha debe ser > 1")

    if g0 is not None and complex(g0).imag > 0:
        g, res = _newton(z, complex(g0), nu, alpha)
        if res < _RESIDUAL_TOL and g.imag > 0:
            return g

    heights = [z.imag]
    while heights[-1] < 1.0:
        heights.append(heights[-1] * 10.0)
    g = -1.0 / complex(z.real, heights[-1])
    res = float("inf")
    for height in reversed(heights):
        zk = complex(z.real, height)
        g = _fixed_point(zk, g, nu, alpha)
        g, res = _newton(zk, g, nu, alpha)
    if res < _RESIDUAL_TOL and g.imag > 0:
        return g
    raise NoConvergence(
        "La ecuación de Marchenko-Pastur no convergió",
        detail={"z": z, "residual": res, "g": g},
    )


def left_edge(nu: WeightLaw, alpha: float) -> Tuple[float, float]:
    """Borde izquierdo (x_min, g_min) del soporte de μ_α[ν].

    g_min es el mayor S con α + S·F > 0 sobre el soporte de ν y
    α E[(SF/(α+SF))²] ≤ 1; la función es creciente en S en la región
    admisible, así que la raíz es única.
    """
    if not alpha > 1.0:
        raise ValueError("alpha debe ser > 1")
    f, p = nu.f, nu.p
    f_min = float(f[p > 0].min())
    s_max = np.inf if f_min >= 0.0 else alpha / (-f_min)

    def edge_condition(s: float) -> float:
        r = s * f / (alpha + s * f)
        return alpha * float(p @ (r * r)) - 1.0

    grid = np.logspace(-6.0, 6.0, 241)
    if np.isfinite(s_max):
        grid = np.append(grid[grid < s_max], s_max * (1.0 - 1e-12))
    values = np.array([edge_condition(s) for s in grid])
    above = np.flatnonzero(values >= 0.0)
    if above.size == 0:
        if not np.isfinite(s_max):
            raise EdgeNotFound(
                "Sin S admisible para el borde izquierdo",
                detail={"s_lo": float(grid[0]), "s_hi": float(grid[-1]), "max_cond": float(values.max()) + 1.0},
            )
        s_edge = float(grid[-1])
    else:
        k = int(above[0])
        lo = float(grid[k - 1]) if k > 0 else 0.0
        s_edge = float(brentq(edge_condition, lo, float(grid[k]), xtol=1e-15, rtol=1e-14))
    x_min = -1.0 / s_edge + alpha * float(p @ (f / (alpha + s_edge * f)))
    return x_min, s_edge


def inverse_stieltjes(s: float, nu: WeightLaw, alpha: float) -> float:
    """g⁻¹(s) = −1/s + α E[F/(α+sF)] para s real en (0, g_min]."""
    return -1.0 / s + alpha * nu.expect(lambda f: f / (alpha + s * f))


def _default_range(nu: WeightLaw, alpha: float, x_min: float) -> Tuple[float, float]:
    mean = nu.expect(lambda f: f)
    spread = np.sqrt(max(nu.expect(lambda f: f * f) / alpha, 1e-12))
    hi = mean + 6.0 * spread
    lo = x_min - 0.1 * (hi - x_min)
    return lo, hi


def _sweep(nu: WeightLaw, alpha: float, xs: Array, eps: float) -> Tuple[Array, list[int]]:
    density = np.zeros_like(xs)
    failed: list[int] = []
    g_prev: complex | None = None
    for i, x in enumerate(xs):
        try:
            g = stieltjes_at(complex(x, eps), nu, alpha, g0=g_prev)
        except NoConvergence:
            failed.append(i)
            g_prev = None
            continue
        density[i] = max(g.imag, 0.0) / np.pi
        g_prev = g
    return density, failed


def density_grid(
    nu: WeightLaw,
    alpha: float,
    w_range: Tuple[float, float] | None = None,
    n_points: int = 512,
    eps: float = 1e-6,
    *,
    richardson: bool = False,
) -> SpectrumResult:
    """Densidad de μ_α[ν] por inversión de Stieltjes-Perron sobre una grilla uniforme."""
    if not 1e-8 <= eps <= 1e-3:
        raise ValueError("eps debe estar en [1e-8, 1e-3]")
    if n_points < 64:
        raise ValueError("n_points debe ser ≥ 64")
    x_min, g_min = left_edge(nu, alpha)
    lo, hi = w_range if w_range is not None else _default_range(nu, alpha, x_min)
    xs = np.linspace(lo, hi, n_points)
    density, failed = _sweep(nu, alpha, xs, eps)
    if richardson:
        half, failed_half = _sweep(nu, alpha, xs, eps / 2.0)
        density = np.clip(2.0 * half - density, 0.0, None)
        failed = sorted(set(failed) | set(failed_half))
    if len(failed) > 0.01 * n_points:
        raise NoConvergence(
            "Demasiados puntos de la grilla sin converger",
            detail={"failed": len(failed), "n_points": n_points},
        )
    if failed:
        logger.warning("action=density_grid failed_points=%s n_points=%s", len(failed), n_points)
    return SpectrumResult(
        w=xs,
        density=density,
        x_min=x_min,
        g_min=g_min,
        t_nu=nu.t_mean,
        eps=eps,
        failed=tuple(failed),
    )


def hessian_density(
    nu: WeightLaw,
    alpha: float,
    w_range: Tuple[float, float] | None = None,
    n_points: int = 512,
    eps: float = 1e-6,
    *,
    richardson: bool = False,
) -> SpectrumResult:
    """Densidad ρ(w) = σ(w + t(ν)) de la Hessiana esférica.

    ``w_range`` se expresa en la coordenada desplazada w.
    """
    t_nu = nu.t_mean
    x_range = None if w_range is None else (w_range[0] + t_nu, w_range[1] + t_nu)
    grid = density_grid(nu, alpha, x_range, n_points, eps, richardson=richardson)
    return SpectrumResult(
        w=grid.w - t_nu,
        density=grid.density,
        x_min=grid.x_min,
        g_min=grid.g_min,
        t_nu=t_nu,
        eps=eps,
        shifted=True,
        failed=grid.failed,
    )


__all__ = [
    "SpectrumResult",
    "WeightLaw",
    "density_grid",
    "hessian_density",
    "inverse_stieltjes",
    "left_edge",
    "stieltjes_at",
]
