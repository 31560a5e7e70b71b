# Nombre de archivo: observables.py
# Ubicación de archivo: modules/gd_simulator/observables.py
# Descripción: Hessiana esférica, autovector mínimo y leyes empíricas de etiquetas en un punto θ

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from core.kacrice.loss import PhaseRetrievalLoss

from .config import F_MAX, HIST_BINS, LABEL_RANGE
from .schemas import Array, EmpiricalLaws, HessianSpectrum, Instance

logger = logging.getLogger(__name__)

_UNIT_TOL = 1e-8


def _require_unit(theta: Array) -> None:
    norm = float(np.linalg.norm(theta))
    if abs(norm - 1.0) > _UNIT_TOL:
        raise ValueError(f"θ debe tener norma 1 (‖θ‖ = {norm:.12g})")


def hessian_at(theta: Array, instance: Instance, a: float) -> HessianSpectrum:
    """Espectro de la Hessiana riemanniana en la base ortonormal de T_θ S^{d−1}.

    H = Bᵀ[(1/n) Xᵀ diag(F) X]B − (1/n Σ y ∂₁ℓ) I, con B una base de θ^⊥.
    """
    _require_unit(theta)
    loss = PhaseRetrievalLoss(a)
    y = instance.x @ theta
    y_star = instance.x @ instance.theta_star
    F = np.asarray(loss.d2(y, y_star))
    t_mean = float(np.mean(y * loss.d1(y, y_star)))

    basis = scipy.linalg.null_space(theta[None, :])
    M = instance.x @ basis
    H = (M.T * F) @ M / instance.n
    H[np.diag_indices_from(H)] -= t_mean
    eigenvalues, vectors = scipy.linalg.eigh(H)

    w = basis.T @ instance.theta_star
    w_norm = float(np.linalg.norm(w))
    overlap = float(abs(vectors[:, 0] @ w) / w_norm) if w_norm > 1e-12 else float("nan")
    logger.debug("action=hessian_at d=%s min_eig=%.6g v_min_overlap=%.4f", instance.d, eigenvalues[0], overlap)
    return HessianSpectrum(eigenvalues=np.asarray(eigenvalues), v_min_overlap=overlap, t_mean=t_mean)


def empirical_laws(
    theta: Array,
    instance: Instance,
    a: float,
    label_edges: Optional[ArrayLike] = None,
    f_edges: Optional[ArrayLike] = None,
) -> EmpiricalLaws:
    """Histogramas de (y, y*) y de F(u), energía y overlap en θ."""
    _require_unit(theta)
    loss = PhaseRetrievalLoss(a)
    y = instance.x @ theta
    y_star = instance.x @ instance.theta_star
    F = np.asarray(loss.d2(y, y_star))
    edges = (
        np.linspace(-LABEL_RANGE, LABEL_RANGE, HIST_BINS + 1)
        if label_edges is None
        else np.asarray(label_edges, dtype=float)
    )
    label_hist, _, _ = np.histogram2d(y, y_star, bins=[edges, edges], density=True)
    f_bins = np.linspace(-4.0, F_MAX, HIST_BINS + 1) if f_edges is None else np.asarray(f_edges, float)
    f_hist, f_bins = np.histogram(F, bins=f_bins, density=True)
    u = instance.theta_star / np.linalg.norm(instance.theta_star)
    return EmpiricalLaws(
        label_hist=label_hist,
        label_edges=edges,
        f_hist=f_hist,
        f_edges=f_bins,
        energy=float(np.mean(loss.value(y, y_star))),
        overlap=float(theta @ u),
        y=y,
        y_star=y_star,
        F=F,
    )


__all__ = ["empirical_laws", "hessian_at"]
