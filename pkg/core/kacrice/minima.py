# Nombre de archivo: minima.py
# Ubicación de archivo: core/kacrice/minima.py
# Descripción: Solver max-min de la complejidad de mínimos locales (tilde0) y sillas de índice finito (fin)

"""Complejidad anillada de mínimos y sillas de índice sub-extensivo.

El problema interno (ínfimo sobre multiplicadores) es convexo: sobre una
regla de cuadratura fija su objetivo es ``c0 + a·λ + α log Σ w e^{base + S·λ}``
con gradiente ``a + α E[S]`` y Hessiana ``α Cov[S]``. Se resuelve con
L-BFGS-B en variables estandarizadas y se pule con Newton sobre los
multiplicadores libres. El problema externo (supremo sobre A, g) se resuelve
con L-BFGS-B en (log A, log g) usando el gradiente envolvente.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.optimize import minimize, minimize_scalar
from scipy.special import logsumexp

from core.config import get_settings

from .errors import EmptyBand, InnerDiverged, KacRiceError, NoConvergence, NotConverged, UnbracketedEdge
from .loss import SingleIndexLoss
from .measure import TiltedMeasure
from .quadrature import (
    BaseGaussian,
    MomentBundle,
    QuadratureOptions,
    QuadratureRule,
    TiltExponent,
    adapt,
    expect,
    moments_on_rule,
    tilted_rule,
)
from .spectrum import WeightLaw, left_edge

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]
Mode = Literal["tilde0", "fin"]

_IDX_A, _IDX_C, _IDX_E, _IDX_T, _IDX_H, _IDX_STAR = range(6)
_DIVERGENCE_LIMIT = 1e10


@dataclass(slots=True, frozen=True)
class OuterPoint:
    """Variables externas (A, g) del supremo."""

    A: float
    g: float

    def __post_init__(self) -> None:
        if not (self.A > 0.0 and self.g > 0.0):
            raise ValueError("A y g deben ser estrictamente positivos")


@dataclass(slots=True)
class MultiplierVector:
    lambda_A: float = 0.0
    lambda_c: float = 0.0
    lambda_e: float = 0.0
    lambda_t: float = 0.0
    lambda_h: float = 0.0
    lambda_star: float = 0.0

    def as_array(self) -> Array:
        return np.array(
            [self.lambda_A, self.lambda_c, self.lambda_e, self.lambda_t, self.lambda_h, self.lambda_star]
        )

    @classmethod
    def from_array(cls, lam: Sequence[float]) -> "MultiplierVector":
        return cls(*(float(v) for v in lam))

    def as_dict(self) -> Dict[str, float]:
        return {
            "lambda_A": self.lambda_A,
            "lambda_c": self.lambda_c,
            "lambda_e": self.lambda_e,
            "lambda_t": self.lambda_t,
            "lambda_h": self.lambda_h,
            "lambda_star": self.lambda_star,
        }


@dataclass(slots=True, frozen=True)
class SolverOptions:
    inner_tol: float = 1e-7
    outer_tol: float = 1e-6
    outer_max_iter: int = 60
    inner_max_iter: int = 500
    newton_max_iter: int = 25
    max_rebuilds: int = 3
    quadrature: QuadratureOptions = field(default_factory=QuadratureOptions)

    @classmethod
    def from_settings(cls) -> "SolverOptions":
        settings = get_settings()
        return cls(
            inner_tol=settings.inner_tol,
            outer_tol=settings.outer_tol,
            outer_max_iter=settings.outer_max_iter,
            quadrature=QuadratureOptions.from_settings(),
        )


@dataclass(slots=True)
class InnerResult:
    multipliers: MultiplierVector
    value: float
    moments: MomentBundle
    residuals: Dict[str, float]
    rule: QuadratureRule
    tilt: TiltExponent
    iterations: int


@dataclass(slots=True)
class ComplexitySolution:
    """Resultado de una fórmula de complejidad en (q, e, α)."""

    sigma: float
    outer: object
    multipliers: MultiplierVector
    mode: str
    q: float
    e: Optional[float]
    energy: float
    alpha: float
    loss_params: Dict[str, float]
    residuals: Dict[str, float]
    nu: Optional[TiltedMeasure]
    t_nu: float
    converged: bool
    status: str = "ok"
    iterations: int = 0

    @property
    def free_energy(self) -> bool:
        return self.e is None


@dataclass(slots=True)
class EnergyBand:
    """Banda [e_min, e_max] de complejidad positiva y su máximo e_star."""

    e_min: float
    e_star: float
    e_max: float
    sigma_at_star: float
    empty: bool = False


def prefactor(alpha: float, q: float) -> float:
    """Término cerrado (−1 + (1−2α) log α)/2 + ½ log(1−q²)."""
    return 0.5 * (-1.0 + (1.0 - 2.0 * alpha) * np.log(alpha)) + 0.5 * np.log1p(-q * q)


def _validate(q: float, alpha: float, mode: str) -> None:
    if not abs(q) < 1.0:
        raise ValueError("El overlap q debe cumplir |q| < 1")
    if not alpha > 1.0:
        raise ValueError("alpha debe ser > 1")
    if mode not in ("tilde0", "fin"):
        raise ValueError(f"Modo desconocido: {mode}")


class _DualProblem:
    """Dual convexo del problema interno sobre una regla fija (variables estandarizadas)."""

    def __init__(
        self,
        rule: QuadratureRule,
        outer: OuterPoint,
        q: float,
        e: Optional[float],
        alpha: float,
        mode: str,
        loss: SingleIndexLoss,
        lam0: Array,
    ) -> None:
        template = TiltExponent(loss=loss, alpha=alpha, q=q, g=outer.g)
        base, S, inside = template.linear_form(rule.y, rule.y_star)
        if not np.any(inside):
            raise InnerDiverged("B_g no contiene nodos de cuadratura", detail={"g": outer.g})
        self.rule = rule.subset(inside)
        self.L = self.rule.log_w + base[inside]
        self.S_raw = S[inside]
        self.alpha = alpha
        self.outer = outer
        self.lin = np.array(
            [alpha * outer.A, 0.0, alpha * (e if e is not None else 0.0), -1.0 / outer.g, 1.0, 0.0]
        )
        self.c0 = -0.5 * np.log(outer.A) - np.log(outer.g)

        self.fixed = np.zeros(6, dtype=bool)
        self.fixed[_IDX_E] = e is None
        self.fixed[_IDX_STAR] = mode == "fin"
        self.lower = np.full(6, -np.inf)
        self.lower[[_IDX_A, _IDX_H, _IDX_STAR]] = 0.0
        if not template.covers_plane:
            self.lower[_IDX_T] = 0.0

        lam0 = np.where(self.fixed, 0.0, np.maximum(lam0, self.lower))
        p = self._probabilities(lam0, self.S_raw)
        mean = p @ self.S_raw
        spread = np.sqrt(np.maximum(p @ np.square(self.S_raw - mean), 0.0))
        self.scale = np.where(spread > 0.0, spread, 1.0)
        self.S = self.S_raw / self.scale
        self.mu0 = lam0 * self.scale

    def _probabilities(self, lam: Array, S: Array) -> Array:
        logits = self.L + S @ lam
        return np.exp(logits - logsumexp(logits))

    def evaluate(self, mu: Array) -> Tuple[float, Array, Array]:
        logits = self.L + self.S @ mu
        lz = float(logsumexp(logits))
        p = np.exp(logits - lz)
        lam = mu / self.scale
        value = self.c0 + float(self.lin @ lam) + self.alpha * lz
        grad = self.lin / self.scale + self.alpha * (p @ self.S)
        return value, grad, p

    def hessian(self, p: Array) -> Array:
        centered = self.S - p @ self.S
        return self.alpha * (centered.T * p) @ centered

    def bounds(self) -> List[Tuple[Optional[float], Optional[float]]]:
        out: List[Tuple[Optional[float], Optional[float]]] = []
        for j in range(6):
            if self.fixed[j]:
                out.append((0.0, 0.0))
            elif np.isfinite(self.lower[j]):
                out.append((0.0, None))
            else:
                out.append((None, None))
        return out

    def projected_residual(self, mu: Array, grad: Array) -> Array:
        """Gradiente proyectado normalizado (G_j / (α σ_j)); cero en cotas activas."""
        r = grad / self.alpha
        at_bound = np.isfinite(self.lower) & (mu <= self.lower * self.scale + 1e-14) & (grad > 0.0)
        r = np.where(self.fixed | at_bound, 0.0, r)
        return r

    def project(self, mu: Array) -> Array:
        mu = np.where(self.fixed, 0.0, mu)
        return np.maximum(mu, np.where(np.isfinite(self.lower), 0.0, -np.inf))

    def check_divergence(self, value: float, mu: Array) -> None:
        if not np.isfinite(value) or value < -_DIVERGENCE_LIMIT or np.max(np.abs(mu)) > _DIVERGENCE_LIMIT:
            raise InnerDiverged(
                "El dual interno no está acotado inferiormente (región (A, g) infactible)",
                detail={"A": self.outer.A, "g": self.outer.g, "value": value},
            )

    def newton_polish(self, mu: Array, tol: float, max_iter: int) -> Tuple[Array, int]:
        it = 0
        for it in range(1, max_iter + 1):
            value, grad, p = self.evaluate(mu)
            self.check_divergence(value, mu)
            r = self.projected_residual(mu, grad)
            if np.max(np.abs(r)) < 0.1 * tol:
                break
            free = r != 0.0
            if not np.any(free):
                break
            H = self.hessian(p)[np.ix_(free, free)]
            H = H + 1e-12 * max(float(np.max(np.diag(H))), 1.0) * np.eye(int(free.sum()))
            try:
                step = scipy.linalg.solve(H, -grad[free], assume_a="pos")
            except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
                step = scipy.linalg.lstsq(H, -grad[free])[0]
            t = 1.0
            slope = float(grad[free] @ step)
            while t > 1e-10:
                cand = mu.copy()
                cand[free] += t * step
                cand = self.project(cand)
                cand_value, _, _ = self.evaluate(cand)
                if np.isfinite(cand_value) and cand_value <= value + 1e-4 * t * slope + 1e-15 * abs(value):
                    mu = cand
                    break
                t *= 0.5
            else:
                break
        return mu, it


def _solve_on_rule(
    rule: QuadratureRule,
    outer: OuterPoint,
    q: float,
    e: Optional[float],
    alpha: float,
    mode: str,
    loss: SingleIndexLoss,
    lam0: Array,
    options: SolverOptions,
) -> Tuple[Array, float, int, _DualProblem]:
    problem = _DualProblem(rule, outer, q, e, alpha, mode, loss, lam0)

    def fun(mu: Array) -> Tuple[float, Array]:
        value, grad, _ = problem.evaluate(mu)
        if not np.isfinite(value):
            return 1e300, np.zeros_like(mu)
        return value, grad

    res = minimize(
        fun,
        problem.mu0,
        jac=True,
        method="L-BFGS-B",
        bounds=problem.bounds(),
        options={"maxiter": options.inner_max_iter, "ftol": 1e-16, "gtol": 1e-3 * options.inner_tol},
    )
    mu = problem.project(np.asarray(res.x, dtype=float))
    mu, newton_iters = problem.newton_polish(mu, options.inner_tol, options.newton_max_iter)
    value, grad, _ = problem.evaluate(mu)
    problem.check_divergence(value, mu)
    return mu / problem.scale, value, int(res.nit) + newton_iters, problem


def _residuals(
    mom: MomentBundle, outer: OuterPoint, e: Optional[float], alpha: float, normalized: Array
) -> Dict[str, float]:
    g = outer.g
    raw = {
        "G_A": alpha * (outer.A - mom.A),
        "G_c": -alpha * mom.c_q,
        "G_e": alpha * (e - mom.ell) if e is not None else 0.0,
        "G_t": -1.0 / g - mom.t + alpha * mom.f_ratio,
        "G_h": 1.0 - alpha * mom.edge_sq,
        "G_star": mom.K_q,
    }
    out = dict(raw)
    for key, value in zip(("r_A", "r_c", "r_e", "r_t", "r_h", "r_star"), normalized):
        out[key] = float(value)
    out["max_r"] = float(np.max(np.abs(normalized)))
    return out


def inner_minimize(
    outer: OuterPoint,
    q: float,
    e: Optional[float],
    alpha: float,
    mode: str,
    *,
    loss: SingleIndexLoss,
    init: MultiplierVector | None = None,
    rule: QuadratureRule | None = None,
    options: SolverOptions | None = None,
) -> InnerResult:
    """Ínfimo convexo sobre los multiplicadores a (A, g) fijos.

    ``e=None`` fija λ_e = 0 (energía libre); ``mode="fin"`` fija λ_star = 0.
    La regla de cuadratura se re-adapta a la inclinación final y el problema
    se vuelve a resolver si los residuos se degradan.
    """
    _validate(q, alpha, mode)
    options = options or SolverOptions.from_settings()
    base = BaseGaussian(q)
    lam = (init or MultiplierVector(lambda_A=1.0 / (2.0 * alpha * outer.A))).as_array()
    if rule is None:
        rule = tilted_rule(base, _tilt_from(lam, outer, q, alpha, loss), options.quadrature)

    iterations = 0
    for rebuild in range(options.max_rebuilds + 1):
        lam, value, its, problem = _solve_on_rule(rule, outer, q, e, alpha, mode, loss, lam, options)
        iterations += its
        tilt = _tilt_from(lam, outer, q, alpha, loss)
        rule = tilted_rule(base, tilt, options.quadrature)
        check = _DualProblem(rule, outer, q, e, alpha, mode, loss, lam)
        mu = lam * check.scale
        value, grad, _ = check.evaluate(mu)
        normalized = check.projected_residual(mu, grad)
        if np.max(np.abs(normalized)) < options.inner_tol:
            break
        logger.debug(
            "action=inner_minimize rebuild=%s max_r=%.3e A=%s g=%s", rebuild, np.max(np.abs(normalized)), outer.A, outer.g
        )
    mom = moments_on_rule(rule, tilt)
    residuals = _residuals(mom, outer, e, alpha, normalized)
    logger.debug(
        "action=inner_minimize status=ok A=%.6g g=%.6g value=%.10g max_r=%.3e iters=%s",
        outer.A,
        outer.g,
        value,
        residuals["max_r"],
        iterations,
    )
    return InnerResult(
        multipliers=MultiplierVector.from_array(lam),
        value=float(value),
        moments=mom,
        residuals=residuals,
        rule=rule,
        tilt=tilt,
        iterations=iterations,
    )


def _tilt_from(lam: Array, outer: OuterPoint, q: float, alpha: float, loss: SingleIndexLoss) -> TiltExponent:
    return TiltExponent(
        loss=loss,
        alpha=alpha,
        q=q,
        g=outer.g,
        lambda_A=float(lam[_IDX_A]),
        lambda_c=float(lam[_IDX_C]),
        lambda_e=float(lam[_IDX_E]),
        lambda_t=float(lam[_IDX_T]),
        lambda_h=max(float(lam[_IDX_H]), 0.0),
        lambda_star=max(float(lam[_IDX_STAR]), 0.0),
    )


def outer_gradient(inner: InnerResult, outer: OuterPoint, alpha: float) -> Tuple[float, float]:
    """(L_A, L_g) por el teorema de la envolvente."""
    lam = inner.multipliers
    mom = inner.moments
    g = outer.g
    L_A = -1.0 / (2.0 * outer.A) + alpha * lam.lambda_A
    L_g = (
        -1.0 / g
        + lam.lambda_t / (g * g)
        - mom.t
        + alpha * mom.f_ratio
        - alpha * lam.lambda_t * mom.f2_ratio
        - 2.0 * alpha * alpha * g * lam.lambda_h * mom.f3_ratio
    )
    return L_A, L_g


def default_outer(
    q: float, alpha: float, loss: SingleIndexLoss, options: SolverOptions | None = None
) -> OuterPoint:
    """A = E_{μ_q}[A(u)], g = 0.9 · g_edge de la ley sin inclinar."""
    options = options or SolverOptions.from_settings()
    base = BaseGaussian(q)

    def a_of(y: Array, ys: Array) -> Array:
        d1 = loss.d1(y, ys)
        return d1 * d1

    A0 = expect(base, None, a_of, options.quadrature)

    def integrand(y: Array, ys: Array) -> Tuple[Array, Array]:
        return np.zeros_like(y), np.column_stack([np.ones_like(y), loss.d2(y, ys)])

    rule, _, _ = adapt(base, None, integrand, options.quadrature)
    law = WeightLaw.from_labels(rule.y, rule.y_star, loss, rule.probabilities(np.zeros_like(rule.y)))
    _, g_edge = left_edge(law, alpha)
    return OuterPoint(A=float(A0), g=0.9 * g_edge)


def complexity(
    q: float,
    e: Optional[float],
    alpha: float,
    mode: str = "tilde0",
    *,
    loss: SingleIndexLoss,
    init: OuterPoint | None = None,
    options: SolverOptions | None = None,
) -> ComplexitySolution:
    """Σ̃₀(q, e) (``mode="tilde0"``) o Σ_fin(q, e) (``mode="fin"``); ``e=None`` maximiza en e."""
    _validate(q, alpha, mode)
    options = options or SolverOptions.from_settings()
    start = init or default_outer(q, alpha, loss, options)
    state: Dict[str, object] = {"lam": None, "rule": None, "best": None}

    def solve_at(x: Array) -> Tuple[InnerResult, OuterPoint]:
        point = OuterPoint(A=float(np.exp(x[0])), g=float(np.exp(x[1])))
        inner = inner_minimize(
            point,
            q,
            e,
            alpha,
            mode,
            loss=loss,
            init=state["lam"],  # type: ignore[arg-type]
            rule=state["rule"],  # type: ignore[arg-type]
            options=options,
        )
        return inner, point

    def objective(x: Array) -> Tuple[float, Array]:
        try:
            inner, point = solve_at(x)
        except InnerDiverged:
            best = state["best"]
            if best is None:
                raise
            best_x = best[0]  # type: ignore[index]
            delta = x - best_x
            return -best[1] + 1e3 * (1.0 + float(delta @ delta)), 2e3 * delta  # type: ignore[index]
        L_A, L_g = outer_gradient(inner, point, alpha)
        grad_log = np.array([point.A * L_A, point.g * L_g])
        state["lam"] = inner.multipliers
        state["rule"] = inner.rule
        best = state["best"]
        if best is None or inner.value > best[1]:  # type: ignore[index]
            state["best"] = (np.array(x, dtype=float), inner.value, inner, point, grad_log)
        return -inner.value, -grad_log

    x0 = np.log([start.A, start.g])
    res = minimize(
        objective,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": options.outer_max_iter, "ftol": 1e-16, "gtol": 0.1 * options.outer_tol},
    )
    _, _, inner, point, grad_log = state["best"]  # type: ignore[misc]
    if not np.allclose(state["best"][0], res.x):  # type: ignore[index]
        inner, point = solve_at(np.asarray(res.x))
        L_A, L_g = outer_gradient(inner, point, alpha)
        grad_log = np.array([point.A * L_A, point.g * L_g])
    converged = bool(np.max(np.abs(grad_log)) < options.outer_tol and inner.residuals["max_r"] < options.inner_tol)
    status = "ok" if converged else "outer_stalled"
    nu = TiltedMeasure.build(BaseGaussian(q), inner.tilt, rule=inner.rule)
    residuals = dict(inner.residuals)
    residuals.update({"L_A_log": float(grad_log[0]), "L_g_log": float(grad_log[1])})
    sigma = prefactor(alpha, q) + inner.value
    log = logger.info if converged else logger.warning
    log(
        "action=complexity mode=%s q=%s alpha=%s e=%s sigma=%.10g A=%.6g g=%.6g status=%s outer_iters=%s",
        mode,
        q,
        alpha,
        "free" if e is None else e,
        sigma,
        point.A,
        point.g,
        status,
        res.nit,
    )
    return ComplexitySolution(
        sigma=float(sigma),
        outer=point,
        multipliers=inner.multipliers,
        mode=mode,
        q=q,
        e=e,
        energy=float(inner.moments.ell) if e is None else float(e),
        alpha=alpha,
        loss_params=loss.params(),
        residuals=residuals,
        nu=nu,
        t_nu=float(inner.moments.t),
        converged=converged,
        status=status,
        iterations=int(res.nit),
    )


def _edge_bisect(sigma_of: Callable[[float], float], inside: float, outside: float, e_tol: float) -> float:
    """Borde de la banda entre ``inside`` (Σ ≥ 0) y ``outside`` (Σ < 0).

    Un punto donde el solver falla no decide el signo: se prueban otros puntos
    del intervalo y, si todos fallan, el borde queda sin resolver.
    """
    s_in, s_out = sigma_of(inside), sigma_of(outside)
    while abs(outside - inside) > e_tol:
        width = outside - inside
        for frac in (0.5, 0.25, 0.75):
            x = inside + frac * width
            s = sigma_of(x)
            if np.isfinite(s):
                break
        else:
            raise NoConvergence(
                "El solver falla en todo el intervalo del borde de la banda",
                detail={"inside": inside, "outside": outside},
            )
        if s >= 0.0:
            inside, s_in = x, s
        else:
            outside, s_out = x, s
    return float(inside + s_in * (outside - inside) / (s_in - s_out))


def _first_negative(sigma_of: Callable[[float], float], start: float, factor: float, limit: float) -> Optional[float]:
    e = start
    while (e > limit) if factor < 1.0 else (e < limit):
        s = sigma_of(e)
        if np.isfinite(s) and s < 0.0:
            return e
        e *= factor
    return None


def energy_band(
    q: float,
    alpha: float,
    mode: str = "tilde0",
    *,
    loss: SingleIndexLoss,
    options: SolverOptions | None = None,
    n_coarse: int = 25,
    e_tol: float = 1e-4,
    free: ComplexitySolution | None = None,
) -> EnergyBand:
    """Banda de energías con complejidad positiva y su máximo e_star.

    Los bordes cumplen Σ(e_min) = Σ(e_max) = 0; si Σ no cambia de signo a
    algún lado de e_star se lanza ``UnbracketedEdge``.
    """
    _validate(q, alpha, mode)
    options = options or SolverOptions.from_settings()
    free = free or complexity(q, None, alpha, mode, loss=loss, options=options)
    e_free = free.energy
    cache: Dict[float, float] = {}
    warm: Dict[str, OuterPoint] = {"init": free.outer}  # type: ignore[dict-item]

    def sigma_of(e: float) -> float:
        key = float(e)
        if key not in cache:
            try:
                sol = complexity(q, key, alpha, mode, loss=loss, init=warm["init"], options=options)
                cache[key] = sol.sigma
                warm["init"] = sol.outer  # type: ignore[assignment]
            except KacRiceError as exc:
                logger.debug("action=energy_band e=%s error=%s", key, exc.code)
                cache[key] = float("nan")
        return cache[key]

    def neg_sigma(e: float) -> float:
        s = sigma_of(e)
        return -s if np.isfinite(s) else np.inf

    grid = np.linspace(0.1 * e_free, 3.0 * e_free, n_coarse)
    values = np.array([sigma_of(e) for e in grid])
    finite = np.isfinite(values)
    best = float(values[finite].max()) if finite.any() else -np.inf
    if max(best, free.sigma) <= 0.0:
        raise EmptyBand(
            "Sin energías de complejidad positiva",
            detail={"sigma_free": free.sigma, "e_free": e_free, "q": q, "alpha": alpha},
        )

    e_star, s_star = float(e_free), float(free.sigma)
    if finite.any():
        k = int(np.nanargmax(values))
        if values[k] > s_star:
            e_star, s_star = float(grid[k]), float(values[k])
        lo = grid[max(k - 1, 0)]
        hi = grid[min(k + 1, grid.size - 1)]
        found = minimize_scalar(neg_sigma, bounds=(lo, hi), method="bounded", options={"xatol": e_tol})
        if np.isfinite(found.fun) and -float(found.fun) > s_star:
            e_star, s_star = float(found.x), -float(found.fun)

    negative = finite & (values < 0.0)
    left = grid[negative & (grid < e_star)]
    a = float(left.max()) if left.size else _first_negative(sigma_of, float(grid[0]), 0.5, 1e-8 * e_free)
    right = grid[negative & (grid > e_star)]
    b = float(right.min()) if right.size else _first_negative(sigma_of, float(grid[-1]), 1.5, 50.0 * e_free)
    for side, edge in (("low", a), ("high", b)):
        if edge is None:
            logger.warning("action=energy_band stage=unbracketed side=%s q=%s alpha=%s e_star=%.6g", side, q, alpha, e_star)
            raise UnbracketedEdge(
                "Σ no cambia de signo a un lado de e_star",
                detail={"side": side, "e_star": e_star, "sigma_star": s_star, "q": q, "alpha": alpha},
            )

    e_min = _edge_bisect(sigma_of, e_star, a, e_tol)  # type: ignore[arg-type]
    e_max = _edge_bisect(sigma_of, e_star, b, e_tol)  # type: ignore[arg-type]
    logger.info(
        "action=energy_band mode=%s q=%s alpha=%s e_min=%.6g e_star=%.6g e_max=%.6g sigma_star=%.6g",
        mode,
        q,
        alpha,
        e_min,
        e_star,
        e_max,
        s_star,
    )
    return EnergyBand(e_min=e_min, e_star=e_star, e_max=e_max, sigma_at_star=s_star)


def label_law(sol: ComplexitySolution) -> TiltedMeasure:
    """Ley ν de las etiquetas en los puntos críticos típicos de la solución."""
    if not sol.converged or sol.nu is None:
        raise NotConverged("La solución no convergió; ν no está definida", detail={"status": sol.status})
    return sol.nu


__all__ = [
    "ComplexitySolution",
    "EnergyBand",
    "InnerResult",
    "Mode",
    "MultiplierVector",
    "OuterPoint",
    "SolverOptions",
    "complexity",
    "default_outer",
    "energy_band",
    "inner_minimize",
    "label_law",
    "outer_gradient",
    "prefactor",
]
