# Nombre de archivo: test_bisection.py
# Ubicación de archivo: tests/test_bisection.py
# Descripción: Pruebas de la bisección de umbrales en alpha

import pytest

from core.kacrice.bisection import threshold_bisect
from core.kacrice.errors import NoSignChange


def test_raiz_de_un_predicado_lineal() -> None:
    root = threshold_bisect(lambda a: a - 3.3, (1.5, 10.0), tol=1e-6)
    assert root == pytest.approx(3.3, abs=1e-6)


def test_predicado_decreciente() -> None:
    root = threshold_bisect(lambda a: 7.49 - a, (2.0, 12.0), tol=1e-4)
    assert root == pytest.approx(7.49, abs=1e-4)


def test_raiz_en_el_extremo() -> None:
    assert threshold_bisect(lambda a: a - 2.0, (2.0, 5.0), tol=1e-3) == 2.0


def test_sin_cambio_de_signo() -> None:
    with pytest.raises(NoSignChange) as info:
        threshold_bisect(lambda a: a * a + 1.0, (1.5, 10.0), tol=1e-3)
    assert info.value.code == "no_sign_change"
    assert info.value.category == "infeasible"
    assert info.value.detail["lo"] == 1.5


def test_cada_alpha_se_evalua_una_sola_vez() -> None:
    calls: list[float] = []

    def predicate(a: float) -> float:
        calls.append(a)
        return a - 4.0

    threshold_bisect(predicate, (1.5, 10.0), tol=1e-2)
    assert len(calls) == len(set(calls))


def test_intervalo_invalido() -> None:
    with pytest.raises(ValueError):
        threshold_bisect(lambda a: a, (3.0, 2.0), tol=1e-3)
    with pytest.raises(ValueError):
        threshold_bisect(lambda a: a, (1.0, 2.0), tol=0.0)
