# Nombre de archivo: __init__.py
# Ubicación de archivo: modules/landscape_scan/__init__.py
# Descripción: Inicializa el paquete de barridos del paisaje Kac-Rice

from .service import (
    PhaseDiagramResult,
    ScanOptions,
    high_overlap_band,
    phase_diagram,
    threshold_bisect,
)

__all__ = [
    "PhaseDiagramResult",
    "ScanOptions",
    "high_overlap_band",
    "phase_diagram",
    "threshold_bisect",
]
