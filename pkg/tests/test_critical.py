# Nombre de archivo: test_critical.py
# Ubicación de archivo: tests/test_critical.py
# Descripción: Pruebas del punto fijo de la complejidad de todos los puntos críticos y la cadena de cotas

import pytest

from core.kacrice.critical import (
    CriticalOuter,
    TCOptions,
    complexity_tc,
    continuation_tc,
    default_critical_outer,
    detect_branches,
)
from core.kacrice.loss import PhaseRetrievalLoss
from core.kacrice.minima import complexity


def test_g_debe_estar_en_el_semiplano_superior() -> None:
    with pytest.raises(ValueError):
        CriticalOuter(A=1.0, g=complex(0.5, 0.0), lambda_A=0.1)
    with pytest.raises(ValueError):
        CriticalOuter(A=-1.0, g=complex(0.5, 0.1), lambda_A=0.1)
    outer = CriticalOuter(A=1.0, g=complex(0.5, 0.1), lambda_A=0.1)
    assert (outer.g_r, outer.g_i) == (0.5, 0.1)


def test_precondiciones_del_punto_fijo() -> None:
    loss = PhaseRetrievalLoss(0.01)
    with pytest.raises(ValueError):
        complexity_tc(1.0, None, 3.0, loss=loss)
    with pytest.raises(ValueError):
        complexity_tc(0.0, None, 0.5, loss=loss)
    with pytest.raises(ValueError):
        detect_branches(0.0, 3.0, [CriticalOuter(A=1.0, g=1j, lambda_A=0.1)], loss=loss)


def test_opciones_desde_settings() -> None:
    options = TCOptions.from_settings()
    assert options.damping == 0.5
    assert options.max_restarts == 3


def test_arranque_por_defecto_en_semiplano_superior() -> None:
    outer = default_critical_outer(0.0, 4.0, PhaseRetrievalLoss(1.0))
    assert outer.g_i > 0.0
    assert outer.lambda_A == pytest.approx(1.0 / (2.0 * 4.0 * outer.A))


@pytest.mark.slow
def test_punto_fijo_converge_con_g_complejo() -> None:
    sol = complexity_tc(0.0, None, 4.0, loss=PhaseRetrievalLoss(0.01))
    assert sol.mode == "tc"
    assert sol.converged
    assert sol.outer.g_i > 0.0


@pytest.mark.slow
def test_trivializacion_tc_en_q_0_4() -> None:
    loss = PhaseRetrievalLoss(0.01)
    assert complexity_tc(0.4, None, 4.4, loss=loss).sigma > 0.0
    assert complexity_tc(0.4, None, 4.7, loss=loss).sigma < 0.0


@pytest.mark.slow
def test_tc_positiva_en_el_ecuador() -> None:
    loss = PhaseRetrievalLoss(0.01)
    for alpha in (3.0, 10.0, 25.0, 50.0):
        assert complexity_tc(0.0, None, alpha, loss=loss).sigma > 0.0


@pytest.mark.slow
@pytest.mark.parametrize("q", [0.0, 0.2, 0.4])
@pytest.mark.parametrize("alpha", [3.0, 4.5, 6.0])
def test_cadena_de_cotas(q: float, alpha: float) -> None:
    loss = PhaseRetrievalLoss(0.01)
    tilde0 = complexity(q, None, alpha, "tilde0", loss=loss).sigma
    fin = complexity(q, None, alpha, "fin", loss=loss).sigma
    tc = complexity_tc(q, None, alpha, loss=loss).sigma
    assert tilde0 <= fin + 1e-4
    assert fin <= tc + 1e-4


@pytest.mark.slow
def test_coexistencia_de_ramas_por_continuacion() -> None:
    loss = PhaseRetrievalLoss(0.01)
    alphas = [3.0 + 0.05 * k for k in range(11)]
    ascending = continuation_tc(0.0, alphas, loss=loss)
    descending = continuation_tc(0.0, list(reversed(alphas)), loss=loss)[::-1]
    gaps = [
        abs(up.sigma - down.sigma)
        for up, down in zip(ascending, descending)
        if up is not None and down is not None
    ]
    assert gaps and max(gaps) > 1e-4


@pytest.mark.slow
def test_rama_ascendente_salta_cerca_de_alpha_3_4() -> None:
    loss = PhaseRetrievalLoss(0.01)
    alphas = [3.0 + 0.05 * k for k in range(11)]
    ascending = continuation_tc(0.0, alphas, loss=loss)
    points = [(al, sol.energy) for al, sol in zip(alphas, ascending) if sol is not None]
    assert len(points) >= 2
    steps = [
        (abs(e1 - e0), 0.5 * (a0 + a1))
        for (a0, e0), (a1, e1) in zip(points, points[1:])
    ]
    _, where = max(steps)
    assert where == pytest.approx(3.4, abs=0.2)
