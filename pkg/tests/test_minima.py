# Nombre de archivo: test_minima.py
# Ubicación de archivo: tests/test_minima.py
# Descripción: Pruebas de las fórmulas variacionales de mínimos (Σ̃₀ y Σ_fin), KKT y banda de energías

from types import SimpleNamespace

import numpy as np
import pytest

from core.kacrice import minima
from core.kacrice.errors import NoConvergence, UnbracketedEdge
from core.kacrice.loss import PhaseRetrievalLoss
from core.kacrice.minima import (
    MultiplierVector,
    OuterPoint,
    complexity,
    default_outer,
    energy_band,
    inner_minimize,
    label_law,
    prefactor,
)
from core.kacrice.spectrum import left_edge


def test_prefactor_cerrado() -> None:
    assert prefactor(1.0, 0.0) == pytest.approx(-0.5)
    expected = 0.5 * (-1.0 + (1.0 - 8.0) * np.log(4.0)) + 0.5 * np.log(1.0 - 0.16)
    assert prefactor(4.0, 0.4) == pytest.approx(expected, rel=1e-14)


def test_punto_externo_requiere_valores_positivos() -> None:
    with pytest.raises(ValueError):
        OuterPoint(A=0.0, g=1.0)
    with pytest.raises(ValueError):
        OuterPoint(A=1.0, g=-0.1)


def test_vector_de_multiplicadores_ida_y_vuelta() -> None:
    lam = MultiplierVector(0.1, -0.2, 0.3, 0.0, 0.5, 0.6)
    assert MultiplierVector.from_array(lam.as_array()) == lam
    assert list(lam.as_dict()) == ["lambda_A", "lambda_c", "lambda_e", "lambda_t", "lambda_h", "lambda_star"]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"q": 1.0, "alpha": 3.0, "mode": "tilde0"},
        {"q": 0.0, "alpha": 1.0, "mode": "tilde0"},
        {"q": 0.0, "alpha": 3.0, "mode": "otro"},
    ],
)
def test_precondiciones_de_complexity(kwargs: dict) -> None:
    with pytest.raises(ValueError):
        complexity(kwargs["q"], None, kwargs["alpha"], kwargs["mode"], loss=PhaseRetrievalLoss(0.01))


def test_minimizacion_interna_respeta_signos_y_fijaciones() -> None:
    loss = PhaseRetrievalLoss(1.0)
    outer = default_outer(0.0, 4.0, loss)
    free = inner_minimize(outer, 0.0, None, 4.0, "fin", loss=loss)
    lam = free.multipliers
    assert lam.lambda_e == 0.0
    assert lam.lambda_star == 0.0
    assert lam.lambda_A >= 0.0 and lam.lambda_h >= 0.0
    assert np.isfinite(free.value)
    assert free.residuals["G_e"] == 0.0


@pytest.mark.slow
def test_complejidad_de_minimos_tipicos_en_alpha_6_5() -> None:
    sol = complexity(0.0, None, 6.5, "tilde0", loss=PhaseRetrievalLoss(0.01))
    assert sol.converged
    assert sol.sigma == pytest.approx(7e-3, abs=3e-3)
    fin = complexity(0.0, None, 6.5, "fin", loss=PhaseRetrievalLoss(0.01))
    assert fin.sigma >= sol.sigma - 1e-4


@pytest.mark.slow
def test_trivializacion_de_minimos_entre_7_3_y_7_7() -> None:
    loss = PhaseRetrievalLoss(0.01)
    assert complexity(0.0, None, 7.3, "tilde0", loss=loss).sigma > 0.0
    assert complexity(0.0, None, 7.7, "tilde0", loss=loss).sigma < 0.0


@pytest.mark.slow
def test_condiciones_kkt_en_puntos_aleatorios() -> None:
    rng = np.random.default_rng(2024)
    loss = PhaseRetrievalLoss(0.01)
    converged = 0
    for q, alpha in zip(rng.uniform(0.0, 0.5, 10), rng.uniform(3.0, 7.0, 10)):
        sol = complexity(float(q), None, float(alpha), "tilde0", loss=loss)
        if not sol.converged:
            continue
        converged += 1
        lam = sol.multipliers
        assert abs(lam.lambda_h) < 1e-6
        assert abs(lam.lambda_A - 1.0 / (2.0 * alpha * sol.outer.A)) < 1e-6
        assert sol.residuals["max_r"] < 1e-7
    assert converged >= 1


@pytest.mark.slow
def test_activacion_de_lambda_star_cerca_de_alpha_7() -> None:
    loss = PhaseRetrievalLoss(0.01)
    assert complexity(0.0, None, 6.7, "tilde0", loss=loss).multipliers.lambda_star < 1e-4
    assert complexity(0.0, None, 7.3, "tilde0", loss=loss).multipliers.lambda_star > 1e-4


@pytest.mark.slow
def test_borde_espectral_autoconsistente() -> None:
    sol = complexity(0.0, None, 6.5, "tilde0", loss=PhaseRetrievalLoss(0.01))
    law = label_law(sol).weight_law()
    x_min, g_min = left_edge(law, 6.5)
    assert g_min == pytest.approx(sol.outer.g, abs=1e-4)
    assert x_min - law.t_mean == pytest.approx(0.0, abs=1e-2)


@pytest.mark.slow
def test_banda_de_energias_contiene_el_maximo() -> None:
    band = energy_band(0.0, 5.0, "tilde0", loss=PhaseRetrievalLoss(0.01))
    assert band.e_min < band.e_star < band.e_max
    assert band.sigma_at_star > 0.0


def _fake_band(monkeypatch, sigma, failing=lambda e: False) -> SimpleNamespace:
    """Sustituye el solver por Σ(e) analítica; ``failing`` marca energías donde falla."""

    def fake_complexity(q, e, alpha, mode, *, loss, init=None, options=None):
        if failing(e):
            raise NoConvergence("falla forzada", detail={"e": e})
        return SimpleNamespace(sigma=sigma(e), outer=None)

    monkeypatch.setattr(minima, "complexity", fake_complexity)
    return SimpleNamespace(energy=1.0, sigma=sigma(1.0), outer=None)


def test_banda_ignora_fallas_del_solver_al_buscar_bordes(monkeypatch) -> None:
    free = _fake_band(monkeypatch, lambda e: 0.25 - (e - 1.0) ** 2, failing=lambda e: 1.25 < e < 1.4)
    band = energy_band(0.0, 3.0, "tilde0", loss=PhaseRetrievalLoss(0.01), free=free)
    assert band.e_star == pytest.approx(1.0, abs=1e-3)
    assert band.e_min == pytest.approx(0.5, abs=1e-3)
    assert band.e_max == pytest.approx(1.5, abs=1e-3)
    assert band.sigma_at_star == pytest.approx(0.25, abs=1e-6)


def test_banda_sin_cambio_de_signo_lanza_error(monkeypatch) -> None:
    free = _fake_band(monkeypatch, lambda e: 1.0)
    with pytest.raises(UnbracketedEdge) as info:
        energy_band(0.0, 3.0, "tilde0", loss=PhaseRetrievalLoss(0.01), free=free)
    assert info.value.detail["side"] == "low"
    assert info.value.category == "infeasible"


def test_banda_con_solver_caido_en_todo_el_borde(monkeypatch) -> None:
    free = _fake_band(monkeypatch, lambda e: 0.25 - (e - 1.0) ** 2, failing=lambda e: 1.2 < e < 1.56)
    with pytest.raises(NoConvergence):
        energy_band(0.0, 3.0, "tilde0", loss=PhaseRetrievalLoss(0.01), free=free)


@pytest.mark.slow
def test_banda_de_energias_en_a_1() -> None:
    band = energy_band(0.0, 3.0, "tilde0", loss=PhaseRetrievalLoss(1.0))
    assert band.e_star == pytest.approx(0.096, abs=0.01)
    assert band.e_min < band.e_star < band.e_max


@pytest.mark.slow
def test_leyes_fin_y_tilde0_coinciden_sin_lambda_star() -> None:
    loss = PhaseRetrievalLoss(0.01)
    tilde0 = complexity(0.0, None, 6.0, "tilde0", loss=loss)
    fin = complexity(0.0, None, 6.0, "fin", loss=loss)
    assert tilde0.multipliers.lambda_star < 1e-8
    grid = np.linspace(-4.0, 4.0, 161)
    cell = (grid[1] - grid[0]) ** 2
    p = label_law(tilde0).density_on_grid(grid, grid)
    r = label_law(fin).density_on_grid(grid, grid)
    assert 0.5 * np.abs(p - r).sum() * cell < 1e-4
