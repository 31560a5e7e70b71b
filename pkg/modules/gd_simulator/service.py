# Nombre de archivo: service.py
# Ubicación de archivo: modules/gd_simulator/service.py
# Descripción: Lotes de corridas de GD por (alpha, q0) con tasas de éxito y estadísticas de mínimos atrapados

"""Servicio de experimentos en lote.

Cada réplica recibe una semilla derivada de (semilla maestra, celda, réplica),
de modo que los resultados no dependen de la cantidad de workers.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.random import SeedSequence

from core.config import get_settings
from core.kacrice.errors import KacRiceError

from .config import BATCH_COLUMNS
from .dynamics import generate_instance, run_gd
from .observables import empirical_laws, hessian_at
from .schemas import BatchRow, EmpiricalLaws, GDConfig, HessianSpectrum, PooledObservables, RunRecord

logger = logging.getLogger(__name__)

Key = Tuple[float, float]


def replicate_seed(master_seed: int, cell: int, replicate: int) -> int:
    """Semilla de 64 bits de la réplica, estable frente al orden de ejecución."""
    state = SeedSequence(entropy=master_seed, spawn_key=(cell, replicate)).generate_state(1, dtype=np.uint64)
    return int(state[0])


@dataclass(slots=True)
class BatchResult:
    rows: List[BatchRow]
    records: List[RunRecord]
    pooled: Dict[Key, PooledObservables] = field(default_factory=dict)
    master_seed: int = 0

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.rows], columns=BATCH_COLUMNS)


def _run_replicate(
    config: GDConfig, replicate: int, analyze_hessian: bool
) -> Tuple[RunRecord, Optional[HessianSpectrum], Optional[EmpiricalLaws]]:
    record = RunRecord(alpha=config.alpha, q0=config.q0, replicate=replicate, seed=config.seed)
    try:
        instance = generate_instance(config.d, config.n, config.seed, config.normalize_signal)
        result = run_gd(config, instance)
    except KacRiceError as exc:
        logger.warning("action=batch_experiment seed=%s error=%s", config.seed, exc.code)
        record.error = exc.code
        return record, None, None

    record.success = result.success
    record.final_overlap = result.final_overlap
    record.final_energy = result.final_energy
    record.wall_steps = result.wall_steps
    record.in_band = (not result.success) and abs(abs(result.final_overlap) - config.q0) <= config.latitude_half_width
    if not (record.in_band and analyze_hessian):
        return record, None, None

    theta = result.theta / np.linalg.norm(result.theta)
    spectrum = hessian_at(theta, instance, config.a)
    laws = empirical_laws(theta, instance, config.a)
    record.min_eigenvalue = spectrum.min_eigenvalue
    record.v_min_overlap = spectrum.v_min_overlap
    return record, spectrum, laws


def _summarize(alpha: float, q0: float, records: Sequence[RunRecord]) -> BatchRow:
    done = [r for r in records if r.error is None]
    n = len(done)
    successes = sum(1 for r in done if r.success)
    rate = successes / n if n else float("nan")
    err = float(np.sqrt(rate * (1.0 - rate) / n)) if n else float("nan")
    failed = [abs(r.final_overlap) for r in done if not r.success and r.final_overlap is not None]
    trapped = [r.final_energy for r in done if r.in_band and r.final_energy is not None]
    mean_energy = float(np.mean(trapped)) if trapped else float("nan")
    energy_err = float(np.std(trapped, ddof=1) / np.sqrt(len(trapped))) if len(trapped) > 1 else float("nan")
    return BatchRow(
        alpha=alpha,
        q0=q0,
        replicates=n,
        success_rate=rate,
        success_err=err,
        mean_qT_fail=float(np.mean(failed)) if failed else float("nan"),
        mean_energy=mean_energy,
        energy_err=energy_err,
        n_trapped=len(trapped),
        n_errors=len(records) - n,
    )


def batch_experiment(
    grid: Sequence[Key],
    replicates: int,
    base: GDConfig,
    *,
    master_seed: int = 0,
    workers: Optional[int] = None,
    analyze_hessian: bool = False,
) -> BatchResult:
    """Tasas de éxito por (α, q0) y estadísticas de mínimos atrapados en la banda de latitud."""
    if replicates < 0:
        raise ValueError("replicates debe ser ≥ 0")
    workers = get_settings().workers if workers is None else max(1, int(workers))
    tasks: List[Tuple[GDConfig, int]] = []
    for cell, (alpha, q0) in enumerate(grid):
        for rep in range(replicates):
            fields = {**base.model_dump(), "alpha": float(alpha), "q0": float(q0), "seed": replicate_seed(master_seed, cell, rep)}
            tasks.append((GDConfig.model_validate(fields), rep))

    logger.info(
        "action=batch_experiment stage=start cells=%s replicates=%s workers=%s master_seed=%s",
        len(grid),
        replicates,
        workers,
        master_seed,
    )
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_replicate, cfg, rep, analyze_hessian) for cfg, rep in tasks]
            outputs = [f.result() for f in futures]
    else:
        outputs = [_run_replicate(cfg, rep, analyze_hessian) for cfg, rep in tasks]

    by_key: Dict[Key, List[RunRecord]] = {}
    pooled: Dict[Key, PooledObservables] = {}
    for record, spectrum, laws in outputs:
        key = (record.alpha, record.q0)
        by_key.setdefault(key, []).append(record)
        if laws is not None:
            pooled.setdefault(key, PooledObservables()).extend(spectrum, laws)

    rows = [_summarize(alpha, q0, by_key[(alpha, q0)]) for alpha, q0 in sorted(by_key)]
    records = sorted((r for r, _, _ in outputs), key=lambda r: (r.alpha, r.q0, r.replicate))
    logger.info("action=batch_experiment stage=done rows=%s runs=%s", len(rows), len(records))
    return BatchResult(rows=rows, records=records, pooled=pooled, master_seed=master_seed)


__all__ = ["BatchResult", "batch_experiment", "replicate_seed"]
