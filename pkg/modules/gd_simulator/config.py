# Nombre de archivo: config.py
# Ubicación de archivo: modules/gd_simulator/config.py
# Descripción: Valores por defecto del protocolo de descenso por gradiente y columnas de salida

import os
from pathlib import Path
from typing import List

OUTPUT_DIR = Path(os.getenv("PAISAJE_GD_OUTPUT_DIR", "data/gd"))

DEFAULT_D: int = 512
DEFAULT_A: float = 0.01
DEFAULT_ETA: float = 2e-4
DEFAULT_T_C: int = 60_000
T_PER_LOG2_D: int = 12_000
DEFAULT_SUCCESS_THRESHOLD: float = 0.99
DEFAULT_LATITUDE: float = 0.05
TRACE_STRIDE: int = 100

# Umbral de ‖θ_⊥‖ por debajo del cual la proyección queda indefinida
ORTH_TOL: float = 1e-12

BATCH_COLUMNS: List[str] = [
    "alpha",
    "q0",
    "replicates",
    "success_rate",
    "success_err",
    "mean_qT_fail",
    "mean_energy",
    "energy_err",
    "n_trapped",
    "n_errors",
]

HIST_BINS: int = 60
LABEL_RANGE: float = 4.0
# F ≥ −4 para ℓ_a; la cola superior de F queda fuera del histograma
F_MAX: float = 24.0
