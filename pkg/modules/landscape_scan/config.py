# Nombre de archivo: config.py
# Ubicación de archivo: modules/landscape_scan/config.py
# Descripción: Constantes y valores por defecto de los barridos del paisaje en (alpha, q, e)

import os
from pathlib import Path
from typing import List

OUTPUT_DIR = Path(os.getenv("PAISAJE_OUTPUT_DIR", "data/landscape"))

# La solución numérica pierde confiabilidad cerca de q = 1
Q_CAP: float = float(os.getenv("PAISAJE_Q_CAP", "0.95"))
N_COARSE: int = int(os.getenv("PAISAJE_N_COARSE", "25"))
BOUND_CHAIN_TOL: float = 1e-5

DEFAULT_ALPHA_GRID: List[float] = [round(1.5 + 0.5 * k, 10) for k in range(18)]
DEFAULT_Q_GRID: List[float] = [round(0.05 * k, 10) for k in range(19)]

CELL_COLUMNS: List[str] = [
    "a",
    "alpha",
    "q",
    "sigma_tilde0",
    "sigma_fin",
    "sigma_tc",
    "e_star",
    "e_min",
    "e_max",
    "d_alpha_typ",
    "d_alpha_low",
    "d_alpha_high",
    "flags",
]

THRESHOLD_COLUMNS: List[str] = [
    "a",
    "q",
    "alpha_triv_min",
    "alpha_triv_fin",
    "alpha_triv_tc",
    "alpha_bbp_typ",
    "alpha_bbp_low",
    "alpha_bbp_high",
    "flags",
]

OVERLAP_COLUMNS: List[str] = ["a", "alpha", "e", "q", "sigma", "flags"]
