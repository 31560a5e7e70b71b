# Nombre de archivo: test_mp_spectrum.py
# Ubicación de archivo: tests/test_mp_spectrum.py
# Descripción: Pruebas de la ecuación de Marchenko-Pastur ponderada, su borde izquierdo y la densidad

import numpy as np
import pytest

from core.kacrice.errors import EdgeNotFound
from core.kacrice.spectrum import (
    WeightLaw,
    density_grid,
    hessian_density,
    inverse_stieltjes,
    left_edge,
    stieltjes_at,
)


@pytest.mark.parametrize("alpha", [2.0, 4.0, 9.0])
def test_left_edge_wishart_constante(alpha: float) -> None:
    x_min, g_min = left_edge(WeightLaw.constant(1.0), alpha)
    assert x_min == pytest.approx((1.0 - 1.0 / np.sqrt(alpha)) ** 2, abs=1e-10)
    assert inverse_stieltjes(g_min, WeightLaw.constant(1.0), alpha) == pytest.approx(x_min, abs=1e-12)


def test_bordes_de_marchenko_pastur_en_alpha_4() -> None:
    grid = density_grid(WeightLaw.constant(1.0), 4.0, (0.0, 3.0), 1201, 1e-6)
    support = grid.w[grid.density > 1e-3]
    assert support.min() == pytest.approx(0.25, abs=1e-2)
    assert support.max() == pytest.approx(2.25, abs=1e-2)
    assert grid.x_min == pytest.approx(0.25, abs=1e-3)


def test_densidad_tiene_masa_unitaria() -> None:
    law = WeightLaw.from_atoms([0.5, 2.0], [0.3, 0.7])
    grid = density_grid(law, 3.0, None, 4096, 1e-6)
    assert grid.mass == pytest.approx(1.0, abs=5e-3)
    assert np.all(grid.density >= 0.0)
    assert grid.cdf([grid.w[-1] + 1.0])[0] == pytest.approx(1.0)


def test_stieltjes_resuelve_la_ecuacion_de_punto_fijo() -> None:
    law = WeightLaw.from_atoms([-1.0, 3.0], [0.25, 0.75])
    alpha = 5.0
    z = complex(0.7, 1e-3)
    g = stieltjes_at(z, law, alpha)
    assert g.imag > 0
    m1 = np.sum(law.p * law.f / (alpha + g * law.f))
    assert abs(g + 1.0 / (z - alpha * m1)) < 1e-9


def test_propiedad_de_herglotz_en_puntos_aleatorios() -> None:
    rng = np.random.default_rng(21)
    law = WeightLaw.from_atoms([0.2, 1.0, 3.0], [0.2, 0.3, 0.5])
    for re, im in zip(rng.uniform(-3.0, 6.0, 100), 10.0 ** rng.uniform(-6.0, 1.0, 100)):
        assert stieltjes_at(complex(re, im), law, 4.0).imag > 0.0


def test_densidad_crece_como_raiz_en_el_borde() -> None:
    law = WeightLaw.constant(1.0)
    x_min, _ = left_edge(law, 4.0)
    deltas = np.logspace(-4.0, -2.0, 9)
    rho = [stieltjes_at(complex(x_min + delta, 1e-9), law, 4.0).imag / np.pi for delta in deltas]
    slope = np.polyfit(np.log(deltas), np.log(rho), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.1)


def test_peso_nulo_da_delta_en_cero() -> None:
    law = WeightLaw.constant(0.0)
    with pytest.raises(EdgeNotFound):
        left_edge(law, 2.0)
    g = stieltjes_at(complex(0.5, 1e-6), law, 2.0)
    assert g == pytest.approx(-1.0 / complex(0.5, 1e-6), rel=1e-8)


def test_dos_atomos_contra_matriz_muestreada() -> None:
    rng = np.random.default_rng(11)
    alpha, d = 3.0, 600
    n = int(alpha * d)
    law = WeightLaw.from_atoms([0.5, 2.0], [0.5, 0.5])
    weights = rng.choice(law.f, size=n, p=law.p)
    Z = rng.standard_normal((n, d))
    eig = np.linalg.eigvalsh((Z.T * weights) @ Z / n)
    x_min, _ = left_edge(law, alpha)
    assert eig.min() == pytest.approx(x_min, abs=5e-2)


def test_densidad_desplazada_de_la_hessiana() -> None:
    law = WeightLaw.constant(1.0)
    grid = hessian_density(law, 4.0, n_points=256)
    assert grid.shifted
    assert grid.t_nu == 0.0
    assert grid.left_edge == pytest.approx(0.25, abs=1e-10)


def test_atomos_con_probabilidades_invalidas() -> None:
    with pytest.raises(ValueError):
        WeightLaw.from_atoms([1.0, 2.0], [0.5, 0.6])
    with pytest.raises(ValueError):
        stieltjes_at(complex(1.0, 0.0), WeightLaw.constant(1.0), 2.0)
