# Nombre de archivo: conftest.py
# Ubicación de archivo: tests/conftest.py
# Descripción: Configuraciones comunes para Pytest (PYTHONPATH, pérdidas y leyes de pesos compartidas)

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:  # pragma: no cover - inicialización
    sys.path.insert(0, str(ROOT_DIR))

from core.kacrice.loss import PhaseRetrievalLoss  # noqa: E402
from core.kacrice.spectrum import WeightLaw  # noqa: E402


def gaussian_pairs(q: float, order: int = 40) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodos (y, y*) y probabilidades de Gauss-Hermite para μ_q."""
    x, w = np.polynomial.hermite_e.hermegauss(order)
    w = w / w.sum()
    z1, z2 = np.meshgrid(x, x, indexing="ij")
    p = np.outer(w, w).ravel()
    y = z1.ravel()
    y_star = q * y + np.sqrt(1.0 - q * q) * z2.ravel()
    return y, y_star, p


@pytest.fixture
def loss() -> PhaseRetrievalLoss:
    return PhaseRetrievalLoss(0.01)


@pytest.fixture
def wishart_law():
    """Fábrica de leyes con F ≡ 1 sobre μ_q sin inclinar (caso Wishart)."""

    def build(q: float) -> WeightLaw:
        y, y_star, p = gaussian_pairs(q)
        return WeightLaw.from_labels(y, y_star, PhaseRetrievalLoss(1.0), p, f_override=1.0)

    return build
