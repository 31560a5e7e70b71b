# Nombre de archivo: dynamics.py
# Ubicación de archivo: modules/gd_simulator/dynamics.py
# Descripción: Generación de instancias y descenso por gradiente con burn-in a overlap fijo

"""Dinámica de GD de lote completo sobre R(θ) = (1/n) Σ ℓ(x_i·θ, x_i·θ*).

Fase 1 (t_C pasos): cada paso se reproyecta sobre {‖θ‖ = 1, θ·θ* = q0}.
Fase 2 (T pasos): actualizaciones euclídeas sin renormalizar.
"""

from __future__ import annotations

import logging
from typing import Tuple

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from core.kacrice.errors import DegenerateOrth, NaNEncountered
from core.kacrice.loss import PhaseRetrievalLoss

from .config import ORTH_TOL
from .schemas import Array, GDConfig, GDRunResult, Instance

logger = logging.getLogger(__name__)

_STREAM_DATA = 0
_STREAM_INIT = 1


def _generator(seed: int, stream: int) -> Generator:
    """Philox contado por (seed, stream): réplicas independientes por construcción."""
    return Generator(Philox(SeedSequence(entropy=seed, spawn_key=(stream,))))


def generate_instance(d: int, n: int, seed: int, normalize_signal: bool = True) -> Instance:
    """x_i ∼ N(0, I_d) y θ* ∼ N(0, I_d/d), normalizada a norma 1 si se pide."""
    if d < 2 or n < 1:
        raise ValueError("Se requiere d ≥ 2 y n ≥ 1")
    rng = _generator(seed, _STREAM_DATA)
    x = rng.standard_normal((n, d))
    theta_star = rng.standard_normal(d) / np.sqrt(d)
    if normalize_signal:
        theta_star = theta_star / np.linalg.norm(theta_star)
    return Instance(x=x, theta_star=theta_star, seed=seed)


def project_overlap(theta: Array, theta_star: Array, q0: float) -> Array:
    """θ ← q0 u* + √(1−q0²) θ_⊥/‖θ_⊥‖ con u* = θ*/‖θ*‖."""
    u = theta_star / np.linalg.norm(theta_star)
    perp = theta - (theta @ u) * u
    norm = float(np.linalg.norm(perp))
    if norm < ORTH_TOL:
        raise DegenerateOrth("θ quedó alineado con la señal durante la proyección", detail={"norm_perp": norm})
    return q0 * u + np.sqrt(1.0 - q0 * q0) * perp / norm


def initial_theta(instance: Instance, q0: float, seed: int) -> Array:
    """Componente q0 sobre la señal y componentes ortogonales gaussianas de varianza 1/d."""
    u = instance.theta_star / np.linalg.norm(instance.theta_star)
    if q0 >= 1.0:
        return u.copy()
    rng = _generator(seed, _STREAM_INIT)
    z = rng.standard_normal(instance.d) / np.sqrt(instance.d)
    return q0 * u + (z - (z @ u) * u)


def energy_and_grad(theta: Array, instance: Instance, y_star: Array, loss: PhaseRetrievalLoss) -> Tuple[float, Array]:
    y = instance.x @ theta
    n = instance.n
    energy = float(np.sum(loss.value(y, y_star)) / n)
    grad = instance.x.T @ loss.d1(y, y_star) / n
    return energy, grad


def _check_finite(theta: Array, step: int) -> None:
    if not np.all(np.isfinite(theta)):
        raise NaNEncountered("La dinámica divergió", detail={"step": step})


def run_gd(config: GDConfig, instance: Instance) -> GDRunResult:
    """Burn-in proyectado seguido de GD libre; éxito si |q(T)| > umbral."""
    loss = PhaseRetrievalLoss(config.a)
    y_star = instance.x @ instance.theta_star
    u = instance.theta_star / np.linalg.norm(instance.theta_star)
    theta = initial_theta(instance, config.q0, config.seed)
    eta = config.eta
    stride = config.trace_stride
    burn_in = config.t_C if config.q0 < 1.0 else 0
    if burn_in:
        theta = project_overlap(theta, instance.theta_star, config.q0)

    for step in range(burn_in):
        _, grad = energy_and_grad(theta, instance, y_star, loss)
        theta = project_overlap(theta - eta * grad, instance.theta_star, config.q0)
        _check_finite(theta, step)
    burn_in_energy = energy_and_grad(theta, instance, y_star, loss)[0]
    logger.debug("action=run_gd stage=burn_in_ok seed=%s energy=%.6g", config.seed, burn_in_energy)

    total = config.total_steps
    overlaps, energies, steps = [], [], []
    energy = burn_in_energy
    for step in range(total):
        energy, grad = energy_and_grad(theta, instance, y_star, loss)
        if step % stride == 0:
            overlaps.append(float(theta @ u))
            energies.append(energy)
            steps.append(burn_in + step)
        theta = theta - eta * grad
        _check_finite(theta, burn_in + step)
    energy = energy_and_grad(theta, instance, y_star, loss)[0]
    overlap = float(theta @ u)
    overlaps.append(overlap)
    energies.append(energy)
    steps.append(burn_in + total)

    success = abs(overlap) > config.success_threshold
    logger.info(
        "action=run_gd seed=%s alpha=%s q0=%s success=%s overlap=%.6f energy=%.6g steps=%s",
        config.seed,
        config.alpha,
        config.q0,
        success,
        overlap,
        energy,
        burn_in + total,
    )
    return GDRunResult(
        success=success,
        final_overlap=overlap,
        final_energy=energy,
        overlap_trace=np.asarray(overlaps),
        energy_trace=np.asarray(energies),
        trace_steps=np.asarray(steps, dtype=np.int64),
        theta=theta,
        wall_steps=burn_in + total,
        burn_in_energy=burn_in_energy,
    )


__all__ = ["energy_and_grad", "generate_instance", "initial_theta", "project_overlap", "run_gd"]
