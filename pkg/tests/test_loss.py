# Nombre de archivo: test_loss.py
# Ubicación de archivo: tests/test_loss.py
# Descripción: Pruebas de la pérdida de recuperación de fase y de sus funciones derivadas

import numpy as np
import pytest

from core.kacrice.loss import (
    LOSS_REGISTRY,
    LabelPoint,
    PhaseRetrievalLoss,
    derived,
    derived_arrays,
    eval_loss,
    first_deriv,
    get_loss,
    second_deriv,
)


def test_valores_cerrados_en_un_punto(loss: PhaseRetrievalLoss) -> None:
    y, ys = 1.5, 0.5
    denom = 0.01 + 0.25
    assert loss.value(y, ys) == pytest.approx((2.25 - 0.25) ** 2 / denom, rel=1e-14)
    assert loss.d1(y, ys) == pytest.approx(4 * 1.5 * 2.0 / denom, rel=1e-14)
    assert loss.d2(y, ys) == pytest.approx((12 * 2.25 - 4 * 0.25) / denom, rel=1e-14)


def test_evaluacion_puntual_en_pares_conocidos() -> None:
    sharp = PhaseRetrievalLoss(0.01)
    unit = PhaseRetrievalLoss(1.0)
    assert eval_loss(LabelPoint(1.0, 1.0), sharp) == 0.0
    assert eval_loss(LabelPoint(1.0, 0.0), sharp) == pytest.approx(100.0)
    assert eval_loss(LabelPoint(2.0, 1.0), unit) == pytest.approx(4.5)
    assert first_deriv(LabelPoint(0.0, 0.7), sharp) == 0.0
    assert first_deriv(LabelPoint(1.0, 0.0), sharp) == pytest.approx(400.0)
    assert second_deriv(LabelPoint(0.0, 1.0), sharp) == pytest.approx(-4.0 / 1.01)


def test_derivadas_contra_diferencias_finitas(loss: PhaseRetrievalLoss) -> None:
    rng = np.random.default_rng(3)
    y = rng.normal(size=50)
    ys = rng.normal(size=50)
    h = 1e-6
    fd1 = (loss.value(y + h, ys) - loss.value(y - h, ys)) / (2 * h)
    fd2 = (loss.d1(y + h, ys) - loss.d1(y - h, ys)) / (2 * h)
    np.testing.assert_allclose(loss.d1(y, ys), fd1, rtol=1e-6, atol=1e-5)
    np.testing.assert_allclose(loss.d2(y, ys), fd2, rtol=1e-6, atol=1e-5)


def test_simetria_en_signos(loss: PhaseRetrievalLoss) -> None:
    y = np.linspace(-3, 3, 13)
    ys = np.linspace(-2, 2, 13)
    np.testing.assert_allclose(loss.value(-y, ys), loss.value(y, ys))
    np.testing.assert_allclose(loss.value(y, -ys), loss.value(y, ys))
    np.testing.assert_allclose(loss.d1(-y, ys), -loss.d1(y, ys))


def test_cota_inferior_del_peso_f(loss: PhaseRetrievalLoss) -> None:
    ys = np.linspace(-50, 50, 2001)
    F = loss.d2(np.zeros_like(ys), ys)
    assert np.all(F > loss.hessian_lower_bound)
    assert loss.hessian_lower_bound == -4.0


def test_minimo_global_en_la_senal(loss: PhaseRetrievalLoss) -> None:
    ys = np.linspace(-3, 3, 31)
    assert np.all(loss.value(ys, ys) == 0.0)
    assert np.all(loss.d1(ys, ys) == 0.0)
    np.testing.assert_allclose(loss.d2(ys, ys), 8 * ys**2 / (0.01 + ys**2))


def test_funciones_derivadas_vectorizadas_coinciden(loss: PhaseRetrievalLoss) -> None:
    q = 0.3
    u = LabelPoint(0.7, -1.2)
    scalar = derived(u, q, loss)
    arrays = derived_arrays(np.array([0.7]), np.array([-1.2]), q, loss)
    dl = loss.d1(0.7, -1.2)
    resid = -1.2 - q * 0.7
    assert scalar.A == pytest.approx(dl**2)
    assert scalar.c_q == pytest.approx(resid / np.sqrt(1 - q * q) * dl)
    assert scalar.t == pytest.approx(0.7 * dl)
    assert scalar.K_q == pytest.approx(scalar.F * resid**2 / (1 - q * q) - scalar.t)
    assert float(arrays.K_q[0]) == pytest.approx(scalar.K_q)


def test_parametros_invalidos() -> None:
    with pytest.raises(ValueError):
        PhaseRetrievalLoss(0.0)
    with pytest.raises(ValueError):
        LabelPoint(float("nan"), 1.0)
    with pytest.raises(ValueError):
        derived(LabelPoint(0.1, 0.2), 1.0, PhaseRetrievalLoss(1.0))


def test_registro_de_perdidas() -> None:
    assert "phase_retrieval" in LOSS_REGISTRY.list_losses()
    model = get_loss("phase_retrieval", a=0.5)
    assert model.params() == {"a": 0.5}
    with pytest.raises(ValueError):
        get_loss("inexistente")
    with pytest.raises(ValueError):
        LOSS_REGISTRY.register("phase_retrieval", PhaseRetrievalLoss)
