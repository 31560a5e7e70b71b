# Nombre de archivo: runner.py
# Ubicación de archivo: modules/landscape_scan/runner.py
# Descripción: Orquestador del diagrama de fases: cálculo y exportación de las dos tablas CSV

import logging
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence

from core.io import write_table

from .config import CELL_COLUMNS, OUTPUT_DIR, OVERLAP_COLUMNS, THRESHOLD_COLUMNS
from .service import PhaseDiagramResult, ScanOptions, high_overlap_band, overlap_frame, phase_diagram

logger = logging.getLogger(__name__)


def run(
    a: float,
    alpha_grid: Sequence[float],
    q_grid: Sequence[float],
    out_dir: Optional[Path] = None,
    options: Optional[ScanOptions] = None,
    header: Optional[Mapping[str, object]] = None,
) -> Dict[str, str]:
    """Ejecuta el barrido completo y escribe celdas y curvas de umbral."""

    out_dir = Path(out_dir or OUTPUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    result: PhaseDiagramResult = phase_diagram(a, alpha_grid, q_grid, options)

    meta = {"a": a, **dict(header or {})}
    cells_path = write_table(result.cells_frame(), out_dir / "phase_diagram_cells.csv", columns=CELL_COLUMNS, header=meta)
    thresholds_path = write_table(
        result.thresholds_frame(), out_dir / "phase_diagram_thresholds.csv", columns=THRESHOLD_COLUMNS, header=meta
    )
    flagged = sum(1 for c in result.cells if c.flags)
    logger.info(
        "action=run a=%s cells=%s flagged=%s cells_csv=%s thresholds_csv=%s",
        a,
        len(result.cells),
        flagged,
        cells_path,
        thresholds_path,
    )
    return {"cells": str(cells_path), "thresholds": str(thresholds_path)}


def run_overlap_band(
    a: float,
    alpha: float,
    e_fixed: Optional[float],
    q_grid: Sequence[float],
    out_dir: Optional[Path] = None,
    options: Optional[ScanOptions] = None,
) -> Dict[str, str]:
    out_dir = Path(out_dir or OUTPUT_DIR)
    band = high_overlap_band(a, alpha, e_fixed, q_grid, options)
    path = write_table(
        overlap_frame(band),
        out_dir / "high_overlap_band.csv",
        columns=OVERLAP_COLUMNS,
        header={"a": a, "alpha": alpha, "positive_interval": band.positive_interval},
    )
    return {"band": str(path)}
