# Nombre de archivo: test_quadrature.py
# Ubicación de archivo: tests/test_quadrature.py
# Descripción: Pruebas de la cuadratura adaptativa sobre μ_q y sobre medidas inclinadas

import numpy as np
import pytest

from core.kacrice.errors import NonIntegrable
from core.kacrice.loss import PhaseRetrievalLoss
from core.kacrice.quadrature import (
    BaseGaussian,
    QuadratureOptions,
    TiltExponent,
    adapt,
    expect,
    log_partition,
    moments,
    tilted_rule,
)


@pytest.mark.parametrize("q", [0.0, 0.4, 0.8])
def test_momentos_gaussianos_de_mu_q(q: float) -> None:
    base = BaseGaussian(q)
    assert expect(base, None, lambda y, ys: np.ones_like(y)) == pytest.approx(1.0, rel=1e-8)
    assert expect(base, None, lambda y, ys: y * y) == pytest.approx(1.0, rel=1e-6)
    assert expect(base, None, lambda y, ys: ys**4) == pytest.approx(3.0, rel=1e-6)
    assert expect(base, None, lambda y, ys: y * ys) == pytest.approx(q, abs=1e-7)


def test_base_gaussiana_rechaza_correlacion_unitaria() -> None:
    with pytest.raises(ValueError):
        BaseGaussian(1.0)


def _brute_force(tilt: TiltExponent, base: BaseGaussian, name: str) -> float:
    grid = np.linspace(-8.0, 8.0, 1201)
    gy, gys = np.meshgrid(grid, grid, indexing="ij")
    y, ys = gy.ravel(), gys.ravel()
    logw = base.log_density(y, ys) + tilt.log_weight(y, ys)
    w = np.exp(logw - logw.max())
    values = tilt.moment_functions(y, ys)[name]
    return float(w @ values / w.sum())


def test_momentos_de_una_inclinacion_contra_grilla_densa() -> None:
    loss = PhaseRetrievalLoss(1.0)
    base = BaseGaussian(0.3)
    tilt = TiltExponent(loss=loss, alpha=2.0, q=0.3, g=0.4, lambda_A=0.05, lambda_c=0.1, lambda_e=0.2)
    assert tilt.covers_plane
    bundle = moments(base, tilt)
    for name in ("A", "c_q", "ell", "t", "f_ratio"):
        assert getattr(bundle, name) == pytest.approx(_brute_force(tilt, base, name), rel=1e-5, abs=1e-9)


def test_regla_reutilizable_normaliza_probabilidades() -> None:
    loss = PhaseRetrievalLoss(1.0)
    base = BaseGaussian(0.0)
    tilt = TiltExponent(loss=loss, alpha=3.0, q=0.0, g=0.5, lambda_A=0.1)
    rule = tilted_rule(base, tilt)
    phi = tilt.log_weight(rule.y, rule.y_star)
    inside = np.isfinite(phi)
    probs = rule.subset(inside).probabilities(phi[inside])
    assert probs.sum() == pytest.approx(1.0, rel=1e-12)
    assert rule.subset(inside).log_partition(phi[inside]) == pytest.approx(log_partition(base, tilt), rel=1e-6)


def test_inclinacion_creciente_no_es_integrable() -> None:
    loss = PhaseRetrievalLoss(1.0)
    # λ_A < 0 hace crecer el peso como exp(+c y⁶)
    tilt = TiltExponent(loss=loss, alpha=3.0, q=0.0, g=0.1, lambda_A=-1.0)
    with pytest.raises(NonIntegrable):
        log_partition(BaseGaussian(0.0), tilt)


def test_multiplicadores_de_desigualdad_negativos_invalidos() -> None:
    with pytest.raises(ValueError):
        TiltExponent(loss=PhaseRetrievalLoss(1.0), alpha=3.0, q=0.0, g=0.1, lambda_h=-1.0)


def test_tolerancia_absoluta_no_escala_con_la_magnitud_del_integrando() -> None:
    def integrand(y: np.ndarray, ys: np.ndarray):
        # E[y² - 1] = 0 bajo μ_0; la escala 1e3 no debe aflojar la tolerancia
        feats = np.column_stack([np.ones_like(y), 1e3 * (y * y - 1.0)])
        return np.zeros_like(y), feats

    options = QuadratureOptions(rtol=1e-12, atol=1e-6)
    _, total, _ = adapt(BaseGaussian(0.0), None, integrand, options)
    assert abs(total[1] / total[0]) < 1e-5
