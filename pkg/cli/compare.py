# Nombre de archivo: compare.py
# Ubicación de archivo: cli/compare.py
# Descripción: Comparación teoría vs experimento: banda de energía, espectro, pesos F, etiquetas y outlier BBP

"""Reporte de comparación por clave (a, α, q).

Cada lado se reduce a un ``Observables`` común: CDF espectral, histograma de
F, cuantiles de etiquetas, energía y presencia de outlier. Un registro teórico
puede usarse en ambos lados (autocomparación).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import cumulative_trapezoid

from core.kacrice.errors import KeyMismatch

from .schemas import ComparisonRow, SolutionRecord

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]
Key = Tuple[float, float, float]

_LABEL_VARS = ("y", "y_star", "F")


def _key(a: float, alpha: float, q: float) -> Key:
    return (round(float(a), 10), round(float(alpha), 10), round(float(q), 10))


@dataclass(slots=True)
class Observables:
    key: Key
    energy: Optional[float] = None
    band: Optional[Tuple[float, float]] = None
    spectrum_grid: Optional[Tuple[Array, Array]] = None
    eigenvalues: Optional[Array] = None
    f_samples: Optional[Array] = None
    f_hist: Optional[Tuple[Array, Array]] = None
    levels: Optional[Array] = None
    quantiles: Optional[Dict[str, Array]] = None
    samples: Optional[Dict[str, Array]] = None
    outlier: Optional[bool] = None
    w_min: Optional[float] = None
    min_eigenvalues: Optional[Array] = None
    outlier_overlaps: Optional[Array] = None


def _grid_cdf(w: Array, rho: Array) -> Callable[[Array], Array]:
    cum = cumulative_trapezoid(rho, w, initial=0.0)
    cum = cum / cum[-1] if cum[-1] > 0 else cum
    return lambda x: np.interp(x, w, cum, left=0.0, right=1.0)


def from_theory(record: SolutionRecord) -> Observables:
    obs = Observables(key=_key(record.a, record.alpha, record.q), energy=record.energy)
    if record.band is not None:
        obs.band = (record.band.e_min, record.band.e_max)
    if record.spectrum is not None:
        obs.spectrum_grid = (np.asarray(record.spectrum.w), np.asarray(record.spectrum.rho))
        obs.w_min = record.spectrum.w_min
    if record.labels is not None:
        obs.f_hist = (np.asarray(record.labels.f_edges), np.asarray(record.labels.f_probs))
        obs.levels = np.asarray(record.labels.levels)
        obs.quantiles = {k: np.asarray(v) for k, v in record.labels.quantiles.items()}
    if record.bbp is not None:
        obs.outlier = record.bbp.x_star is not None
        obs.w_min = record.bbp.w_min if obs.w_min is None else obs.w_min
    return obs


def from_experiment(cell: Mapping[str, Any], a: float) -> Observables:
    obs = Observables(key=_key(a, cell["alpha"], cell["q"]))
    energies = np.asarray(cell.get("energies", []), dtype=float)
    if energies.size:
        obs.energy = float(energies.mean())
    eig = np.asarray(cell.get("eigenvalues", []), dtype=float)
    if eig.size:
        obs.eigenvalues = np.sort(eig)
    samples = {var: np.asarray(cell.get(var, []), dtype=float) for var in _LABEL_VARS}
    if samples["F"].size:
        obs.f_samples = samples["F"]
        obs.samples = samples
    overlaps = np.asarray(cell.get("outlier_overlaps", []), dtype=float)
    if overlaps.size:
        obs.outlier_overlaps = overlaps
        # una fila de d−1 autovalores por mínimo atrapado
        if eig.size and eig.size % overlaps.size == 0:
            obs.min_eigenvalues = eig.reshape(overlaps.size, -1).min(axis=1)
    return obs


def spectral_ks(theory: Observables, other: Observables) -> Optional[float]:
    """Distancia de Kolmogorov entre la CDF de ρ y la ECDF (u otra CDF tabulada)."""
    if theory.spectrum_grid is None:
        return None
    cdf = _grid_cdf(*theory.spectrum_grid)
    if other.eigenvalues is not None:
        x = other.eigenvalues
        n = x.size
        F = cdf(x)
        upper = np.arange(1, n + 1) / n - F
        lower = F - np.arange(0, n) / n
        return float(max(upper.max(), lower.max()))
    if other.spectrum_grid is not None:
        other_cdf = _grid_cdf(*other.spectrum_grid)
        pts = np.union1d(theory.spectrum_grid[0], other.spectrum_grid[0])
        return float(np.max(np.abs(cdf(pts) - other_cdf(pts))))
    return None


def f_total_variation(theory: Observables, other: Observables) -> Optional[float]:
    if theory.f_hist is None:
        return None
    edges, probs = theory.f_hist
    if other.f_samples is not None:
        counts, _ = np.histogram(np.clip(other.f_samples, edges[0], edges[-1]), bins=edges)
        other_probs = counts / max(counts.sum(), 1)
    elif other.f_hist is not None and np.array_equal(other.f_hist[0], edges):
        other_probs = other.f_hist[1]
    else:
        return None
    return float(0.5 * np.sum(np.abs(probs - other_probs)))


def label_quantile_distance(theory: Observables, other: Observables) -> Optional[float]:
    """Media de |Δ cuantil| normalizada por el rango 5–95% teórico de cada variable."""
    if theory.quantiles is None or theory.levels is None:
        return None
    if other.samples is not None:
        observed = {var: np.quantile(v, theory.levels) for var, v in other.samples.items() if v.size}
    elif other.quantiles is not None and other.levels is not None and np.array_equal(other.levels, theory.levels):
        observed = other.quantiles
    else:
        return None
    dists: List[float] = []
    for var, qt in theory.quantiles.items():
        qe = observed.get(var)
        if qe is None:
            continue
        spread = float(qt[-1] - qt[0]) or 1.0
        dists.append(float(np.mean(np.abs(qt - qe)) / abs(spread)))
    return float(np.mean(dists)) if dists else None


def bbp_agreement(theory: Observables, other: Observables, outlier_overlap: float) -> Optional[bool]:
    if theory.outlier is None:
        return None
    if other.outlier is not None:
        return theory.outlier == other.outlier
    if other.outlier_overlaps is None or other.min_eigenvalues is None or theory.w_min is None:
        return None
    below = other.min_eigenvalues < theory.w_min
    aligned = other.outlier_overlaps > outlier_overlap
    observed = bool(np.mean(below & aligned) > 0.5)
    return theory.outlier == observed


def compare_pair(theory: Observables, other: Observables, outlier_overlap: float = 0.1) -> ComparisonRow:
    a, alpha, q = theory.key
    row = ComparisonRow(a=a, alpha=alpha, q=q)
    if theory.band is not None and other.energy is not None:
        lo, hi = theory.band
        row.energy_in_band = lo <= other.energy <= hi
        row.margin_low = other.energy - lo
        row.margin_high = hi - other.energy
    row.spectral_ks = spectral_ks(theory, other)
    row.f_tv = f_total_variation(theory, other)
    row.label_quantile_distance = label_quantile_distance(theory, other)
    row.bbp_agreement = bbp_agreement(theory, other, outlier_overlap)
    return row


def _experiment_observables(payload: Mapping[str, Any] | Sequence[Mapping[str, Any]]) -> List[Observables]:
    if isinstance(payload, Mapping) and "cells" in payload:
        a = float(payload["a"])
        return [from_experiment(cell, a) for cell in payload["cells"]]
    records = [payload] if isinstance(payload, Mapping) else list(payload)
    return [from_theory(SolutionRecord.model_validate(r)) for r in records]


def cmd_compare(
    theory_records: Sequence[Mapping[str, Any]],
    experiment: Mapping[str, Any] | Sequence[Mapping[str, Any]],
    *,
    outlier_overlap: float = 0.1,
) -> List[ComparisonRow]:
    """Filas de comparación por clave; falla con ``KeyMismatch`` si hay claves sin par."""
    theory = {obs.key: obs for obs in (from_theory(SolutionRecord.model_validate(r)) for r in theory_records)}
    observed = {obs.key: obs for obs in _experiment_observables(experiment)}
    only_theory = sorted(set(theory) - set(observed))
    only_experiment = sorted(set(observed) - set(theory))
    if only_theory or only_experiment:
        raise KeyMismatch(
            "Claves (a, alpha, q) sin par entre teoría y experimento",
            detail={"only_theory": only_theory, "only_experiment": only_experiment},
        )
    rows = [compare_pair(theory[k], observed[k], outlier_overlap) for k in sorted(theory)]
    logger.info("action=compare rows=%s", len(rows))
    return rows


__all__ = ["Observables", "cmd_compare", "compare_pair", "from_experiment", "from_theory"]
