# Nombre de archivo: test_bbp.py
# Ubicación de archivo: tests/test_bbp.py
# Descripción: Pruebas del análisis BBP: identidad de Wishart sin spike y ubicación del outlier

import numpy as np
import pytest

from core.kacrice.bbp import analyze, bbp_threshold, edge_functionals, minima_law_family, outlier_location
from core.kacrice.errors import NoSignChange
from core.kacrice.loss import PhaseRetrievalLoss
from core.kacrice.spectrum import WeightLaw, inverse_stieltjes


@pytest.mark.parametrize("alpha", [2.0, 4.0, 9.0])
@pytest.mark.parametrize("q", [0.0, 0.4])
def test_identidad_wishart_sin_spike(wishart_law, alpha: float, q: float) -> None:
    result = edge_functionals(wishart_law(q), alpha, q)
    assert result.d_alpha == pytest.approx(-1.0 / result.g_min, abs=1e-10)
    assert not result.has_outlier
    assert outlier_location(wishart_law(q), alpha, q) is None


def test_outlier_bajo_el_borde_cuando_d_positivo() -> None:
    # F grande sólo donde y* = 0: la dirección de la señal casi no pesa
    law = WeightLaw(
        f=np.array([2.0, 1e-3]),
        p=np.array([0.5, 0.5]),
        y=np.array([1.0, 1.0]),
        y_star=np.array([0.0, 2.0]),
        loss=PhaseRetrievalLoss(1.0),
    )
    result = analyze(law, 6.0, 0.0)
    assert result.x2 == pytest.approx(2e-3, rel=1e-2)
    assert result.d_alpha > 0.1
    assert result.has_outlier
    assert result.x_star is not None and result.x_star <= result.x_min
    assert result.w_star == pytest.approx(result.x_star - result.t_nu)


def test_fila_bbp_con_nan_sin_outlier(wishart_law) -> None:
    row = analyze(wishart_law(0.0), 4.0, 0.0).to_row("typ")
    assert np.isnan(row["x_star"])
    assert row["d_alpha"] < 0


def test_umbral_bbp_de_una_familia_sintetica(wishart_law) -> None:
    # d(α) = −1/g_min para Wishart: nunca cruza cero
    with pytest.raises(NoSignChange):
        bbp_threshold(lambda alpha: wishart_law(0.0), 0.0, (2.0, 8.0), tol=1e-2)


def test_inversa_de_stieltjes_en_el_borde(wishart_law) -> None:
    law = wishart_law(0.0)
    result = edge_functionals(law, 4.0, 0.0)
    assert inverse_stieltjes(result.g_min, law, 4.0) == pytest.approx(result.x_min, abs=1e-12)


def test_ley_sin_etiquetas_es_rechazada() -> None:
    with pytest.raises(ValueError):
        edge_functionals(WeightLaw.constant(1.0), 4.0, 0.0)
    with pytest.raises(ValueError):
        minima_law_family(0.0, "media", loss=PhaseRetrievalLoss(0.01))
