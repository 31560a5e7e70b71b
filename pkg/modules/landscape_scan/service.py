# Nombre de archivo: service.py
# Ubicación de archivo: modules/landscape_scan/service.py
# Descripción: Barridos en (alpha, q) para el diagrama de fases, curvas de umbral y banda de overlap alto

"""Servicio central de barridos del paisaje.

Cada fila de q se resuelve en orden creciente de α con continuación
(la solución anterior inicializa la siguiente) y se reintenta en frío si la
continuación falla. Las filas son independientes y se reparten entre procesos.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import pandas as pd

from core.config import get_settings
from core.kacrice.bbp import edge_functionals, minima_law_family
from core.kacrice.bisection import threshold_bisect
from core.kacrice.critical import CriticalOuter, TCOptions, complexity_tc
from core.kacrice.errors import KacRiceError
from core.kacrice.loss import PhaseRetrievalLoss
from core.kacrice.minima import ComplexitySolution, OuterPoint, SolverOptions, complexity, energy_band, label_law

from . import config as scan_config
from .schemas import OverlapBand, OverlapPoint, PhaseDiagramCell, ThresholdCurve

logger = logging.getLogger(__name__)


@dataclass(slots=True, frozen=True)
class ScanOptions:
    """Parámetros del barrido (picklables para enviarlos a los workers)."""

    workers: int = 1
    n_coarse: int = scan_config.N_COARSE
    compute_tc: bool = True
    compute_bbp: bool = True
    refine: bool = False
    multistart: bool = False
    threshold_tol: float = 1e-2
    solver: SolverOptions = field(default_factory=SolverOptions)
    tc: TCOptions = field(default_factory=TCOptions)

    @classmethod
    def from_settings(cls) -> "ScanOptions":
        settings = get_settings()
        return cls(
            workers=settings.workers,
            threshold_tol=settings.threshold_tol,
            solver=SolverOptions.from_settings(),
            tc=TCOptions.from_settings(),
        )


@dataclass(slots=True)
class PhaseDiagramResult:
    cells: List[PhaseDiagramCell]
    thresholds: List[ThresholdCurve]

    def cells_frame(self) -> pd.DataFrame:
        rows = [c.to_row() for c in self.cells]
        return pd.DataFrame(rows, columns=scan_config.CELL_COLUMNS)

    def thresholds_frame(self) -> pd.DataFrame:
        rows = [t.to_row() for t in self.thresholds]
        return pd.DataFrame(rows, columns=scan_config.THRESHOLD_COLUMNS)


def _validate_grids(a: float, alpha_grid: Sequence[float], q_grid: Sequence[float]) -> None:
    if not a > 0.0:
        raise ValueError("El parámetro a debe ser > 0")
    for name, grid in (("alpha_grid", alpha_grid), ("q_grid", q_grid)):
        if any(x >= y for x, y in zip(grid, grid[1:])):
            raise ValueError(f"{name} debe estar ordenada en forma estrictamente creciente")
    if alpha_grid and min(alpha_grid) <= 1.0:
        raise ValueError("Todos los alpha deben ser > 1")
    if q_grid and (min(q_grid) < 0.0 or max(q_grid) > scan_config.Q_CAP):
        raise ValueError(f"Los q deben estar en [0, {scan_config.Q_CAP}]")


class _RowState:
    """Estado de continuación de una fila de q (uno por worker)."""

    def __init__(self) -> None:
        self.tilde0: Optional[OuterPoint] = None
        self.fin: Optional[OuterPoint] = None
        self.tc: Optional[CriticalOuter] = None


def _solve_warm(
    solve: Callable[[object], ComplexitySolution],
    warm: object,
    flags: List[str],
    tag: str,
) -> Optional[ComplexitySolution]:
    """Resuelve con inicialización caliente y reintenta en frío si falla."""
    attempts = [warm, None] if warm is not None else [None]
    last: Optional[KacRiceError] = None
    for init in attempts:
        try:
            sol = solve(init)
        except KacRiceError as exc:
            last = exc
            continue
        if init is None and warm is not None:
            flags.append(f"{tag}:cold_start")
        if not sol.converged:
            flags.append(f"{tag}:{sol.status}")
        return sol
    assert last is not None
    flags.append(f"{tag}:{last.code}")
    return None


def _solve_cell(a: float, alpha: float, q: float, state: _RowState, options: ScanOptions) -> PhaseDiagramCell:
    loss = PhaseRetrievalLoss(a)
    flags: List[str] = []
    cell = PhaseDiagramCell(a=a, alpha=alpha, q=q)

    sol0 = _solve_warm(
        lambda init: complexity(q, None, alpha, "tilde0", loss=loss, init=init, options=options.solver),  # type: ignore[arg-type]
        state.tilde0,
        flags,
        "tilde0",
    )
    if sol0 is not None:
        cell.sigma_tilde0 = sol0.sigma
        state.tilde0 = sol0.outer  # type: ignore[assignment]
        if options.multistart:
            try:
                cold = complexity(q, None, alpha, "tilde0", loss=loss, options=options.solver)
                if abs(cold.sigma - sol0.sigma) > 1e-5:
                    flags.append("tilde0:multistart_disagree")
            except KacRiceError as exc:
                flags.append(f"tilde0:multistart_{exc.code}")

    sol_fin = _solve_warm(
        lambda init: complexity(q, None, alpha, "fin", loss=loss, init=init, options=options.solver),  # type: ignore[arg-type]
        state.fin or state.tilde0,
        flags,
        "fin",
    )
    if sol_fin is not None:
        cell.sigma_fin = sol_fin.sigma
        state.fin = sol_fin.outer  # type: ignore[assignment]

    if options.compute_tc:
        sol_tc = _solve_warm(
            lambda init: complexity_tc(q, None, alpha, loss=loss, init=init, options=options.tc),  # type: ignore[arg-type]
            state.tc,
            flags,
            "tc",
        )
        if sol_tc is not None:
            cell.sigma_tc = sol_tc.sigma
            state.tc = sol_tc.outer  # type: ignore[assignment]

    if sol0 is not None and sol0.converged:
        try:
            band = energy_band(q, alpha, "tilde0", loss=loss, options=options.solver, n_coarse=options.n_coarse, free=sol0)
            cell.e_min, cell.e_star, cell.e_max = band.e_min, band.e_star, band.e_max
        except KacRiceError as exc:
            flags.append(f"band:{exc.code}")
            band = None
        if options.compute_bbp:
            try:
                cell.d_alpha_typ = edge_functionals(label_law(sol0).weight_law(), alpha, q).d_alpha
            except KacRiceError as exc:
                flags.append(f"bbp_typ:{exc.code}")
            if band is not None:
                for tag, e in (("low", band.e_min), ("high", band.e_max)):
                    try:
                        sol = complexity(q, e, alpha, "tilde0", loss=loss, init=sol0.outer, options=options.solver)  # type: ignore[arg-type]
                        d = edge_functionals(label_law(sol).weight_law(), alpha, q).d_alpha
                    except KacRiceError as exc:
                        flags.append(f"bbp_{tag}:{exc.code}")
                        continue
                    setattr(cell, f"d_alpha_{tag}", d)

    cell.flags = flags
    return cell


def _check_cell(cell: PhaseDiagramCell) -> None:
    """Marca las celdas que violan la cadena de cotas o Σ_fin > 0 en q = 0."""
    if not cell.bound_chain_ok(scan_config.BOUND_CHAIN_TOL):
        cell.flags.append("bound_chain")
        logger.warning(
            "action=phase_diagram stage=bound_chain alpha=%s q=%s tilde0=%s fin=%s tc=%s",
            cell.alpha,
            cell.q,
            cell.sigma_tilde0,
            cell.sigma_fin,
            cell.sigma_tc,
        )
    if cell.q == 0.0 and math.isfinite(cell.sigma_fin) and cell.sigma_fin <= 0.0:
        cell.flags.append("sigma_fin_q0_nonpositive")
        logger.warning("action=phase_diagram stage=sigma_fin_q0 alpha=%s sigma_fin=%s", cell.alpha, cell.sigma_fin)


def _bracket(alphas: Sequence[float], values: Sequence[float], rising: bool) -> Optional[Tuple[int, int]]:
    """Primer par de celdas consecutivas donde el valor cambia de signo en la dirección pedida."""
    for k in range(len(alphas) - 1):
        v0, v1 = values[k], values[k + 1]
        if not (math.isfinite(v0) and math.isfinite(v1)):
            continue
        if (rising and v0 < 0.0 <= v1) or (not rising and v0 > 0.0 >= v1):
            return k, k + 1
    return None


def _crossing(
    alphas: Sequence[float],
    values: Sequence[float],
    rising: bool,
    predicate: Callable[[float], float] | None,
    tol: float,
) -> float:
    found = _bracket(alphas, values, rising)
    if found is None:
        return float("nan")
    i, j = found
    if predicate is not None:
        try:
            return threshold_bisect(predicate, (alphas[i], alphas[j]), tol)
        except KacRiceError as exc:
            logger.warning("action=phase_diagram stage=refine bracket=%s error=%s", (alphas[i], alphas[j]), exc.code)
    v0, v1 = values[i], values[j]
    return float(alphas[i] + (alphas[j] - alphas[i]) * v0 / (v0 - v1))


def _row_thresholds(a: float, q: float, cells: Sequence[PhaseDiagramCell], options: ScanOptions) -> ThresholdCurve:
    alphas = [c.alpha for c in cells]
    loss = PhaseRetrievalLoss(a)
    refine = options.refine

    def sigma_predicate(mode: str) -> Callable[[float], float] | None:
        if not refine:
            return None
        if mode == "tc":
            return lambda al: complexity_tc(q, None, al, loss=loss, options=options.tc).sigma
        return lambda al: complexity(q, None, al, mode, loss=loss, options=options.solver).sigma

    def bbp_predicate(energy_class: str) -> Callable[[float], float] | None:
        if not refine:
            return None
        family = minima_law_family(q, energy_class, loss=loss, options=options.solver)
        return lambda al: edge_functionals(family(al), al, q).d_alpha

    tol = options.threshold_tol
    curve = ThresholdCurve(
        a=a,
        q=q,
        alpha_triv_min=_crossing(alphas, [c.sigma_tilde0 for c in cells], False, sigma_predicate("tilde0"), tol),
        alpha_triv_fin=_crossing(alphas, [c.sigma_fin for c in cells], False, sigma_predicate("fin"), tol),
        alpha_bbp_typ=_crossing(alphas, [c.d_alpha_typ for c in cells], True, bbp_predicate("typ"), tol),
        alpha_bbp_low=_crossing(alphas, [c.d_alpha_low for c in cells], True, bbp_predicate("low"), tol),
        alpha_bbp_high=_crossing(alphas, [c.d_alpha_high for c in cells], True, bbp_predicate("high"), tol),
    )
    if options.compute_tc:
        curve.alpha_triv_tc = _crossing(alphas, [c.sigma_tc for c in cells], False, sigma_predicate("tc"), tol)
    if not curve.bbp_order_ok(tol):
        curve.flags.append("bbp_order")
        logger.warning(
            "action=phase_diagram stage=bbp_order q=%s high=%s typ=%s low=%s",
            q,
            curve.alpha_bbp_high,
            curve.alpha_bbp_typ,
            curve.alpha_bbp_low,
        )
    return curve


def _scan_row(a: float, q: float, alphas: Sequence[float], options: ScanOptions) -> Tuple[List[PhaseDiagramCell], ThresholdCurve]:
    state = _RowState()
    cells: List[PhaseDiagramCell] = []
    for alpha in alphas:
        try:
            cell = _solve_cell(a, alpha, q, state, options)
        except Exception as exc:  # noqa: BLE001
            logger.exception("action=phase_diagram stage=cell alpha=%s q=%s error=%s", alpha, q, exc)
            cell = PhaseDiagramCell(a=a, alpha=alpha, q=q, flags=[f"unexpected:{type(exc).__name__}"])
        _check_cell(cell)
        cells.append(cell)
    curve = _row_thresholds(a, q, cells, options)
    logger.info("action=phase_diagram stage=row_ok a=%s q=%s cells=%s", a, q, len(cells))
    return cells, curve


def phase_diagram(
    a: float,
    alpha_grid: Sequence[float],
    q_grid: Sequence[float],
    options: ScanOptions | None = None,
) -> PhaseDiagramResult:
    """Complejidades a energía libre en cada celda y curvas de umbral por fila de q."""
    _validate_grids(a, alpha_grid, q_grid)
    options = options or ScanOptions.from_settings()
    alphas = [float(x) for x in alpha_grid]
    rows: List[Tuple[List[PhaseDiagramCell], ThresholdCurve]] = []
    logger.info(
        "action=phase_diagram stage=start a=%s alphas=%s qs=%s workers=%s", a, len(alphas), len(q_grid), options.workers
    )
    if options.workers > 1 and len(q_grid) > 1:
        with ProcessPoolExecutor(max_workers=options.workers) as pool:
            futures = [pool.submit(_scan_row, a, float(q), alphas, options) for q in q_grid]
            rows = [f.result() for f in futures]
    else:
        rows = [_scan_row(a, float(q), alphas, options) for q in q_grid]

    cells = sorted((c for row, _ in rows for c in row), key=lambda c: (c.q, c.alpha))
    curves = sorted((curve for _, curve in rows), key=lambda c: c.q)
    return PhaseDiagramResult(cells=cells, thresholds=curves)


def high_overlap_band(
    a: float,
    alpha: float,
    e_fixed: Optional[float],
    q_grid: Sequence[float],
    options: ScanOptions | None = None,
) -> OverlapBand:
    """Σ̃₀(q, e_fixed) sobre ``q_grid``; ``e_fixed=None`` usa energía libre."""
    if e_fixed is not None and not e_fixed > 0.0:
        raise ValueError("e_fixed debe ser > 0")
    _validate_grids(a, [alpha], q_grid)
    options = options or ScanOptions.from_settings()
    loss = PhaseRetrievalLoss(a)
    points: List[OverlapPoint] = []
    for q in q_grid:
        point = OverlapPoint(a=a, alpha=alpha, e=e_fixed, q=float(q))
        try:
            sol = complexity(float(q), e_fixed, alpha, "tilde0", loss=loss, options=options.solver)
            point.sigma = sol.sigma
            if not sol.converged:
                point.flags.append(sol.status)
        except KacRiceError as exc:
            logger.warning("action=high_overlap_band q=%s error=%s", q, exc.code)
            point.flags.append(exc.code)
        points.append(point)

    positive = [p.q for p in points if math.isfinite(p.sigma) and p.sigma > 0.0]
    interval = (min(positive), max(positive)) if positive else None
    logger.info("action=high_overlap_band a=%s alpha=%s e=%s interval=%s", a, alpha, e_fixed, interval)
    return OverlapBand(points=points, positive_interval=interval)


def overlap_frame(band: OverlapBand) -> pd.DataFrame:
    return pd.DataFrame([p.to_row() for p in band.points], columns=scan_config.OVERLAP_COLUMNS)


__all__ = [
    "PhaseDiagramResult",
    "ScanOptions",
    "high_overlap_band",
    "overlap_frame",
    "phase_diagram",
    "threshold_bisect",
]
