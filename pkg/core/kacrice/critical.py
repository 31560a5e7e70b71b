# Nombre de archivo: critical.py
# Ubicación de archivo: core/kacrice/critical.py
# Descripción: Iteración de punto fijo para la complejidad de todos los puntos críticos (Σ_TC) y detección de ramas

"""Complejidad Σ_TC(q, e) de todos los puntos críticos.

Cada paso actualiza, con amortiguamiento γ:
(i) g ← −[E t + iε − α E F/(α+gF)]⁻¹, (ii) A ← E[A],
(iii) (λ_c, λ_e) exactos para E c_q = 0 y E ℓ = e, (iv) λ_A ← 1/(2αA).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.optimize import minimize
from scipy.special import logsumexp

from core.config import get_settings

from .errors import ImCollapse, KacRiceError, NoFixedPoint
from .loss import SingleIndexLoss, derived_arrays
from .measure import TiltedMeasure
from .minima import ComplexitySolution, MultiplierVector, prefactor
from .quadrature import BaseGaussian, QuadratureOptions, QuadratureRule, TCTilt, adapt, expect, tilted_rule
from .spectrum import WeightLaw, stieltjes_at

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

_SUBPROBLEM_TOL = 1e-12


@dataclass(slots=True, frozen=True)
class CriticalOuter:
    """Variables del extremo: A, g ∈ ℂ₊ y multiplicadores (λ_A, λ_c, λ_e)."""

    A: float
    g: complex
    lambda_A: float
    lambda_c: float = 0.0
    lambda_e: float = 0.0
    eps: float = 1e-6

    def __post_init__(self) -> None:
        if not self.A > 0.0:
            raise ValueError("A debe ser > 0")
        if not complex(self.g).imag > 0.0:
            raise ValueError("g debe cumplir Im g > 0")
        if not self.eps > 0.0:
            raise ValueError("eps debe ser > 0")

    @property
    def g_r(self) -> float:
        return float(complex(self.g).real)

    @property
    def g_i(self) -> float:
        return float(complex(self.g).imag)


@dataclass(slots=True, frozen=True)
class TCOptions:
    tol: float = 1e-9
    max_iter: int = 5000
    damping: float = 0.5
    min_damping: float = 1.0 / 64.0
    rebuild_every: int = 25
    max_restarts: int = 3
    joint_lambda_A: bool = False
    quadrature: QuadratureOptions = field(default_factory=QuadratureOptions)

    @classmethod
    def from_settings(cls) -> "TCOptions":
        settings = get_settings()
        return cls(tol=settings.tc_tol, max_iter=settings.tc_max_iter, quadrature=QuadratureOptions.from_settings())


class _NodeFeatures:
    """Funciones de u precalculadas sobre los nodos de una regla (dominio ℝ²)."""

    def __init__(self, rule: QuadratureRule, q: float, alpha: float, loss: SingleIndexLoss) -> None:
        fx = derived_arrays(rule.y, rule.y_star, q, loss)
        self.rule = rule
        self.alpha = alpha
        self.A = np.asarray(fx.A)
        self.c = np.asarray(fx.c_q)
        self.ell = np.asarray(loss.value(rule.y, rule.y_star))
        self.t = np.asarray(fx.t)
        self.F = np.asarray(fx.F)

    def base_logits(self, g: complex, lambda_A: float) -> Array:
        return (
            self.rule.log_w
            - lambda_A * self.A
            + np.log(np.abs(self.alpha + self.F * g))
            - g.real * self.t / self.alpha
        )

    def stats(self, joint: bool) -> Array:
        cols = [-self.c, -self.ell]
        if joint:
            cols.append(-self.A)
        return np.column_stack(cols)


def _solve_constraints(
    feats: _NodeFeatures,
    g: complex,
    lambda_A: float,
    lam0: Array,
    targets: Array,
    fixed: NDArray[np.bool_],
    joint: bool,
) -> Tuple[Array, float]:
    """Multiplicadores que satisfacen exactamente E[c_q] = 0, E[ℓ] = e (y E[A] = A si ``joint``).

    Minimiza el dual convexo ``targets·λ + log Z(λ)``; retorna (λ, log Z).
    """
    base = feats.base_logits(g, 0.0 if joint else lambda_A)
    S_raw = feats.stats(joint)
    p0 = np.exp(base + S_raw @ lam0 - logsumexp(base + S_raw @ lam0))
    spread = np.sqrt(np.maximum(p0 @ np.square(S_raw - p0 @ S_raw), 0.0))
    scale = np.where(spread > 0.0, spread, 1.0)
    S = S_raw / scale
    lin = -targets / scale

    def evaluate(mu: Array) -> Tuple[float, Array, Array]:
        logits = base + S @ mu
        lz = float(logsumexp(logits))
        p = np.exp(logits - lz)
        return float(lin @ mu) + lz, lin + p @ S, p

    def fun(mu: Array) -> Tuple[float, Array]:
        value, grad, _ = evaluate(mu)
        if not np.isfinite(value):
            return 1e300, np.zeros_like(mu)
        return value, np.where(fixed, 0.0, grad)

    bounds = [(0.0, 0.0) if fx else (None, None) for fx in fixed]
    res = minimize(fun, lam0 * scale, jac=True, method="L-BFGS-B", bounds=bounds, options={"ftol": 1e-16, "gtol": 1e-13})
    mu = np.where(fixed, 0.0, np.asarray(res.x, dtype=float))
    free = ~fixed
    for _ in range(30):
        value, grad, p = evaluate(mu)
        if not np.any(free) or np.max(np.abs(grad[free])) < _SUBPROBLEM_TOL:
            break
        centered = S[:, free] - p @ S[:, free]
        H = (centered.T * p) @ centered
        try:
            step = scipy.linalg.solve(H, -grad[free], assume_a="pos")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            step = scipy.linalg.lstsq(H, -grad[free])[0]
        t = 1.0
        while t > 1e-10:
            cand = mu.copy()
            cand[free] += t * step
            if evaluate(cand)[0] <= value + 1e-4 * t * float(grad[free] @ step) + 1e-15 * abs(value):
                mu = cand
                break
            t *= 0.5
        else:
            break
    lam = mu / scale
    logits = base + S_raw @ lam
    return lam, float(logsumexp(logits))


@dataclass(slots=True)
class _Iterate:
    A: float
    g: complex
    lambda_A: float
    lambda_c: float
    lambda_e: float


def _tilt(state: _Iterate, q: float, alpha: float, loss: SingleIndexLoss) -> TCTilt:
    return TCTilt(
        loss=loss,
        alpha=alpha,
        q=q,
        g=state.g,
        lambda_A=state.lambda_A,
        lambda_c=state.lambda_c,
        lambda_e=state.lambda_e,
    )


def _tc_moments(feats: _NodeFeatures, state: _Iterate) -> Dict[str, complex | float]:
    logits = feats.base_logits(state.g, state.lambda_A) - state.lambda_c * feats.c - state.lambda_e * feats.ell
    lz = float(logsumexp(logits))
    p = np.exp(logits - lz)
    ratio = feats.F / (feats.alpha + state.g * feats.F)
    return {
        "log_z": lz,
        "t": float(p @ feats.t),
        "A": float(p @ feats.A),
        "c_q": float(p @ feats.c),
        "ell": float(p @ feats.ell),
        "f_ratio": complex(p @ ratio),
        "c_std": float(np.sqrt(max(p @ np.square(feats.c), 1e-300))),
        "ell_std": float(np.sqrt(max(p @ np.square(feats.ell - p @ feats.ell), 1e-300))),
    }


def default_critical_outer(
    q: float, alpha: float, loss: SingleIndexLoss, eps: float = 1e-6, options: TCOptions | None = None
) -> CriticalOuter:
    """A = E_{μ_q}[A], g = transformada de la ley sin inclinar en E_{μ_q}[t] + iε."""
    options = options or TCOptions.from_settings()
    base = BaseGaussian(q)

    def integrand(y: Array, ys: Array) -> Tuple[Array, Array]:
        return np.zeros_like(y), np.column_stack([np.ones_like(y), loss.d2(y, ys)])

    rule, _, _ = adapt(base, None, integrand, options.quadrature)
    law = WeightLaw.from_labels(rule.y, rule.y_star, loss, rule.probabilities(np.zeros_like(rule.y)))

    def a_of(y: Array, ys: Array) -> Array:
        d1 = loss.d1(y, ys)
        return d1 * d1

    A0 = expect(base, None, a_of, options.quadrature)
    g0 = stieltjes_at(complex(law.t_mean, max(eps, 1e-3)), law, alpha)
    return CriticalOuter(A=float(A0), g=g0, lambda_A=1.0 / (2.0 * alpha * A0), eps=eps)


def _run_fixed_point(
    q: float,
    e: Optional[float],
    alpha: float,
    loss: SingleIndexLoss,
    init: CriticalOuter,
    damping: float,
    options: TCOptions,
) -> Tuple[_Iterate, _NodeFeatures, Dict[str, complex | float], int]:
    base = BaseGaussian(q)
    eps = init.eps
    state = _Iterate(A=init.A, g=complex(init.g), lambda_A=init.lambda_A, lambda_c=init.lambda_c, lambda_e=init.lambda_e)
    joint = options.joint_lambda_A
    fixed = np.array([False, e is None] + ([False] if joint else []))
    gamma = damping
    history: List[float] = []
    feats: _NodeFeatures | None = None
    verified = False

    for it in range(1, options.max_iter + 1):
        if feats is None or it % options.rebuild_every == 0 or verified:
            rule = tilted_rule(base, _tilt(state, q, alpha, loss), options.quadrature)
            feats = _NodeFeatures(rule, q, alpha, loss)
        mom = _tc_moments(feats, state)
        g_new = -1.0 / (mom["t"] + 1j * eps - alpha * mom["f_ratio"])
        g_next = (1.0 - gamma) * state.g + gamma * g_new
        A_next = (1.0 - gamma) * state.A + gamma * float(mom["A"])
        if not g_next.imag > 0.0:
            raise ImCollapse(
                "Im g dejó de ser positiva durante la iteración",
                detail={"iteration": it, "g": g_next, "damping": gamma},
            )
        targets = np.array([0.0, e if e is not None else 0.0] + ([A_next] if joint else []))
        lam0 = np.array([state.lambda_c, state.lambda_e] + ([state.lambda_A] if joint else []))
        lambda_A = 1.0 / (2.0 * alpha * A_next)
        lam, _ = _solve_constraints(feats, g_next, lambda_A, lam0, targets, fixed, joint)
        change = max(abs(g_next - state.g) / max(abs(g_next), 1e-300), abs(A_next - state.A) / A_next)
        state = _Iterate(
            A=A_next,
            g=g_next,
            lambda_A=float(lam[2]) if joint else lambda_A,
            lambda_c=float(lam[0]),
            lambda_e=float(lam[1]),
        )
        history.append(change)
        if len(history) >= 4 and history[-1] > history[-2] > history[-3] > history[-4] and gamma > options.min_damping:
            gamma *= 0.5
            logger.debug("action=complexity_tc damping=%s iteration=%s", gamma, it)
        if change < options.tol:
            if verified:
                return state, feats, _tc_moments(feats, state), it
            verified = True
            continue
        verified = False
    raise NoFixedPoint(
        "Presupuesto de iteraciones agotado sin punto fijo",
        detail={"iterations": options.max_iter, "last_changes": [float(c) for c in history[-20:]]},
    )


def complexity_tc(
    q: float,
    e: Optional[float],
    alpha: float,
    *,
    loss: SingleIndexLoss,
    init: CriticalOuter | None = None,
    damping: float | None = None,
    eps: float = 1e-6,
    options: TCOptions | None = None,
) -> ComplexitySolution:
    """Σ_TC(q, e) por iteración de punto fijo; ``e=None`` deja la energía libre (λ_e = 0)."""
    if not abs(q) < 1.0:
        raise ValueError("El overlap q debe cumplir |q| < 1")
    if not alpha > 1.0:
        raise ValueError("alpha debe ser > 1")
    options = options or TCOptions.from_settings()
    start = init or default_critical_outer(q, alpha, loss, eps, options)
    gamma = options.damping if damping is None else damping

    for restart in range(options.max_restarts + 1):
        try:
            state, feats, mom, iterations = _run_fixed_point(q, e, alpha, loss, start, gamma, options)
            break
        except ImCollapse as exc:
            if restart == options.max_restarts:
                raise
            gamma *= 0.5
            logger.warning("action=complexity_tc restart=%s damping=%s reason=%s", restart + 1, gamma, exc.code)

    eps = start.eps
    g = state.g
    energy = float(mom["ell"]) if e is None else float(e)
    value = (
        -0.5 * np.log(state.A)
        - np.log(abs(g))
        + eps * g.imag
        + alpha * (state.lambda_A * state.A + state.lambda_e * (e if e is not None else 0.0))
        + alpha * float(mom["log_z"])
    )
    sigma = prefactor(alpha, q) + value
    g_update = -1.0 / (mom["t"] + 1j * eps - alpha * mom["f_ratio"])
    residuals = {
        "fp_g": float(abs(g_update - g) / abs(g)),
        "fp_A": float(abs(mom["A"] - state.A) / state.A),
        "fp_lambda_A": float(abs(state.lambda_A - 1.0 / (2.0 * alpha * state.A)) * 2.0 * alpha * state.A),
        "r_c": float(abs(mom["c_q"]) / mom["c_std"]),
        "r_e": float(abs(mom["ell"] - e) / mom["ell_std"]) if e is not None else 0.0,
    }
    outer = CriticalOuter(
        A=state.A, g=g, lambda_A=state.lambda_A, lambda_c=state.lambda_c, lambda_e=state.lambda_e, eps=eps
    )
    tilt = _tilt(state, q, alpha, loss)
    nu = TiltedMeasure.build(BaseGaussian(q), tilt, rule=feats.rule)
    logger.info(
        "action=complexity_tc q=%s alpha=%s e=%s sigma=%.10g g=%s A=%.6g iterations=%s",
        q,
        alpha,
        "free" if e is None else e,
        sigma,
        g,
        state.A,
        iterations,
    )
    return ComplexitySolution(
        sigma=float(sigma),
        outer=outer,
        multipliers=MultiplierVector(lambda_A=state.lambda_A, lambda_c=state.lambda_c, lambda_e=state.lambda_e),
        mode="tc",
        q=q,
        e=e,
        energy=energy,
        alpha=alpha,
        loss_params=loss.params(),
        residuals=residuals,
        nu=nu,
        t_nu=float(mom["t"]),
        converged=True,
        iterations=iterations,
    )


def detect_branches(
    q: float,
    alpha: float,
    init_list: Sequence[CriticalOuter],
    *,
    loss: SingleIndexLoss,
    e: Optional[float] = None,
    options: TCOptions | None = None,
    tol: float = 1e-4,
) -> Tuple[List[ComplexitySolution], bool]:
    """Puntos fijos distintos alcanzados desde varias inicializaciones y flag de coexistencia."""
    if len(init_list) < 2:
        raise ValueError("detect_branches requiere al menos dos inicializaciones")
    distinct: List[ComplexitySolution] = []
    for init in init_list:
        try:
            sol = complexity_tc(q, e, alpha, loss=loss, init=init, options=options)
        except KacRiceError as exc:
            logger.warning("action=detect_branches q=%s alpha=%s error=%s", q, alpha, exc.code)
            continue
        if all(abs(sol.sigma - d.sigma) > tol or abs(sol.energy - d.energy) > tol for d in distinct):
            distinct.append(sol)
    coexist = len(distinct) > 1
    if coexist:
        logger.info("action=detect_branches q=%s alpha=%s branches=%s", q, alpha, len(distinct))
    return distinct, coexist


def continuation_tc(
    q: float,
    alphas: Sequence[float],
    *,
    loss: SingleIndexLoss,
    e: Optional[float] = None,
    init: CriticalOuter | None = None,
    options: TCOptions | None = None,
) -> List[Optional[ComplexitySolution]]:
    """Barrido en α reutilizando el punto fijo anterior como inicialización."""
    out: List[Optional[ComplexitySolution]] = []
    current = init
    for alpha in alphas:
        try:
            sol = complexity_tc(q, e, alpha, loss=loss, init=current, options=options)
        except KacRiceError as exc:
            logger.warning("action=continuation_tc q=%s alpha=%s error=%s", q, alpha, exc.code)
            out.append(None)
            continue
        out.append(sol)
        current = replace(sol.outer)  # type: ignore[type-var]
    return out


__all__ = [
    "CriticalOuter",
    "TCOptions",
    "complexity_tc",
    "continuation_tc",
    "default_critical_outer",
    "detect_branches",
]
