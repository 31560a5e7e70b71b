# Nombre de archivo: runner.py
# Ubicación de archivo: modules/gd_simulator/runner.py
# Descripción: Orquestador de lotes de GD: ejecución y exportación de tabla, registros y observables agrupados

import logging
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple

from core.io import dump_record, dump_records, write_table

from .config import BATCH_COLUMNS, OUTPUT_DIR
from .schemas import GDConfig
from .service import BatchResult, batch_experiment

logger = logging.getLogger(__name__)


def run(
    grid: Sequence[Tuple[float, float]],
    replicates: int,
    base: GDConfig,
    out_dir: Optional[Path] = None,
    master_seed: int = 0,
    workers: Optional[int] = None,
    analyze_hessian: bool = False,
    header: Optional[Mapping[str, object]] = None,
) -> Dict[str, str]:
    """Ejecuta el lote y escribe el CSV de estadísticas, los registros por corrida y los observables."""

    out_dir = Path(out_dir or OUTPUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    result: BatchResult = batch_experiment(
        grid,
        replicates,
        base,
        master_seed=master_seed,
        workers=workers,
        analyze_hessian=analyze_hessian,
    )
    meta = {"seed": master_seed, **dict(header or {})}
    paths = {
        "batch": str(write_table(result.frame(), out_dir / "gd_batch.csv", columns=BATCH_COLUMNS, header=meta)),
        "runs": str(dump_records(result.records, out_dir / "gd_runs.jsonl")),
    }
    if result.pooled:
        pooled = {
            "seed": master_seed,
            "a": base.a,
            "cells": [
                {"alpha": alpha, "q": q0, **obs.as_dict()} for (alpha, q0), obs in sorted(result.pooled.items())
            ],
        }
        paths["pooled"] = str(dump_record(pooled, out_dir / "gd_pooled.json"))
    logger.info("action=run rows=%s runs=%s out_dir=%s", len(result.rows), len(result.records), out_dir)
    return paths
