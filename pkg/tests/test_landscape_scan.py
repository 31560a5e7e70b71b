# Nombre de archivo: test_landscape_scan.py
# Ubicación de archivo: tests/test_landscape_scan.py
# Descripción: Pruebas del barrido del diagrama de fases, curvas de umbral y banda de overlap alto

import math
from types import SimpleNamespace

import pytest

from core.io import read_table
from core.kacrice.errors import InnerDiverged
from modules.landscape_scan import service
from modules.landscape_scan.config import CELL_COLUMNS, OVERLAP_COLUMNS, THRESHOLD_COLUMNS
from modules.landscape_scan.runner import run, run_overlap_band
from modules.landscape_scan.schemas import OverlapBand, OverlapPoint, PhaseDiagramCell, ThresholdCurve
from modules.landscape_scan.service import ScanOptions, _bracket, _crossing, _validate_grids, phase_diagram

NAN = float("nan")


def test_bracket_detecta_el_primer_cambio_de_signo() -> None:
    alphas = [2.0, 3.0, 4.0, 5.0]
    assert _bracket(alphas, [0.3, 0.1, -0.2, -0.4], rising=False) == (1, 2)
    assert _bracket(alphas, [-0.3, NAN, 0.2, 0.4], rising=True) is None
    assert _bracket(alphas, [-0.3, -0.1, 0.0, 0.4], rising=True) == (1, 2)
    assert _bracket(alphas, [0.3, 0.2, 0.1, 0.05], rising=False) is None


def test_cruce_por_interpolacion_lineal() -> None:
    alphas = [2.0, 3.0, 4.0]
    value = _crossing(alphas, [0.2, 0.1, -0.1], rising=False, predicate=None, tol=1e-3)
    assert value == pytest.approx(3.5)
    assert math.isnan(_crossing(alphas, [0.2, 0.1, 0.05], rising=False, predicate=None, tol=1e-3))


def test_cruce_refinado_por_biseccion() -> None:
    value = _crossing([2.0, 3.0], [-1.0, 1.0], rising=True, predicate=lambda al: al - 2.25, tol=1e-8)
    assert value == pytest.approx(2.25, abs=1e-6)


@pytest.mark.parametrize(
    "a, alphas, qs",
    [
        (0.0, [2.0], [0.0]),
        (0.01, [3.0, 2.0], [0.0]),
        (0.01, [1.0, 2.0], [0.0]),
        (0.01, [2.0], [0.0, 0.99]),
        (0.01, [2.0], [0.2, 0.2]),
    ],
)
def test_grillas_invalidas(a: float, alphas: list, qs: list) -> None:
    with pytest.raises(ValueError):
        _validate_grids(a, alphas, qs)


def test_cadena_de_cotas_ignora_valores_faltantes() -> None:
    cell = PhaseDiagramCell(a=0.01, alpha=3.0, q=0.0, sigma_tilde0=0.1, sigma_fin=NAN, sigma_tc=0.2)
    assert cell.bound_chain_ok(1e-5)
    broken = PhaseDiagramCell(a=0.01, alpha=3.0, q=0.0, sigma_tilde0=0.3, sigma_fin=0.2, sigma_tc=0.4)
    assert not broken.bound_chain_ok(1e-5)
    row = PhaseDiagramCell(a=0.01, alpha=3.0, q=0.0, flags=["tc:not_converged", "bound_chain"]).to_row()
    assert row["flags"] == "tc:not_converged|bound_chain"


def test_banda_de_overlap_en_pares() -> None:
    band = OverlapBand(
        points=[
            OverlapPoint(a=0.01, alpha=3.0, q=0.6, sigma=-0.01),
            OverlapPoint(a=0.01, alpha=3.0, q=0.8, sigma=0.02),
        ]
    )
    assert band.pairs == [(0.6, -0.01), (0.8, 0.02)]
    assert math.isnan(band.points[0].to_row()["e"])


def _fake_cell(a: float, alpha: float, q: float, state, options) -> PhaseDiagramCell:
    """Complejidades lineales en α que se anulan en α = 5 + q."""
    sigma = 0.1 * (5.0 + q - alpha)
    return PhaseDiagramCell(
        a=a,
        alpha=alpha,
        q=q,
        sigma_tilde0=sigma - 0.01,
        sigma_fin=sigma,
        sigma_tc=sigma + 0.01,
        d_alpha_typ=alpha - 4.0,
    )


def test_diagrama_de_fases_con_celdas_sinteticas(monkeypatch, tmp_path) -> None:
    monkeypatch.setattr(service, "_solve_cell", _fake_cell)
    options = ScanOptions(workers=1, compute_tc=True)
    result = phase_diagram(0.01, [3.0, 4.0, 5.0, 6.0], [0.0, 0.5], options)
    assert [(c.q, c.alpha) for c in result.cells][:2] == [(0.0, 3.0), (0.0, 4.0)]
    curve = result.thresholds[0]
    assert curve.alpha_triv_fin == pytest.approx(5.0)
    assert curve.alpha_triv_min == pytest.approx(4.9)
    assert curve.alpha_triv_tc == pytest.approx(5.1)
    assert curve.alpha_bbp_typ == pytest.approx(4.0)
    assert math.isnan(curve.alpha_bbp_low)

    paths = run(0.01, [3.0, 4.0, 5.0, 6.0], [0.0, 0.5], out_dir=tmp_path, options=options, header={"command": "phase-diagram"})
    cells, header = read_table(paths["cells"])
    assert list(cells.columns) == CELL_COLUMNS
    assert header["a"] == "0.01"
    assert header["command"] == "phase-diagram"
    thresholds, _ = read_table(paths["thresholds"])
    assert list(thresholds.columns) == THRESHOLD_COLUMNS
    assert thresholds["alpha_triv_fin"].tolist() == pytest.approx([5.0, 5.5])


def test_celdas_con_sigma_fin_no_positiva_en_q0_quedan_marcadas(monkeypatch) -> None:
    monkeypatch.setattr(service, "_solve_cell", _fake_cell)
    result = phase_diagram(0.01, [3.0, 6.0], [0.0, 0.5], ScanOptions(workers=1))
    flags = {(c.q, c.alpha): c.flags for c in result.cells}
    assert flags[(0.0, 3.0)] == []
    assert flags[(0.0, 6.0)] == ["sigma_fin_q0_nonpositive"]
    assert flags[(0.5, 6.0)] == []


def test_celda_fallida_tambien_se_verifica(monkeypatch) -> None:
    def broken_cell(a, alpha, q, state, options):
        raise RuntimeError("celda rota")

    monkeypatch.setattr(service, "_solve_cell", broken_cell)
    (cell,) = phase_diagram(0.01, [3.0], [0.0], ScanOptions(workers=1)).cells
    assert cell.flags == ["unexpected:RuntimeError"]


def test_orden_de_umbrales_bbp() -> None:
    ok = ThresholdCurve(a=0.01, q=0.0, alpha_bbp_high=2.76, alpha_bbp_typ=3.5, alpha_bbp_low=4.39)
    assert ok.bbp_order_ok(1e-3)
    assert ThresholdCurve(a=0.01, q=0.0, alpha_bbp_high=4.5, alpha_bbp_low=4.0).bbp_order_ok(1e-3) is False
    assert ThresholdCurve(a=0.01, q=0.0, alpha_bbp_typ=4.0).bbp_order_ok(1e-3)


def test_orden_bbp_invertido_queda_marcado(monkeypatch, tmp_path) -> None:
    def inverted_cell(a, alpha, q, state, options):
        cell = _fake_cell(a, alpha, q, state, options)
        cell.d_alpha_high = alpha - 4.5
        cell.d_alpha_low = alpha - 3.5
        return cell

    monkeypatch.setattr(service, "_solve_cell", inverted_cell)
    options = ScanOptions(workers=1)
    (curve,) = phase_diagram(0.01, [3.0, 4.0, 5.0], [0.0], options).thresholds
    assert curve.alpha_bbp_high == pytest.approx(4.5)
    assert curve.alpha_bbp_low == pytest.approx(3.5)
    assert curve.flags == ["bbp_order"]

    paths = run(0.01, [3.0, 4.0, 5.0], [0.0], out_dir=tmp_path, options=options)
    thresholds, _ = read_table(paths["thresholds"])
    assert thresholds["flags"].tolist() == ["bbp_order"]


def test_banda_de_overlap_marca_errores(monkeypatch, tmp_path) -> None:
    def fake_complexity(q, e, alpha, mode, *, loss, options=None):
        if q < 0.5:
            raise InnerDiverged("sin soporte")
        return SimpleNamespace(sigma=q - 0.7, converged=True, status="ok")

    monkeypatch.setattr(service, "complexity", fake_complexity)
    paths = run_overlap_band(0.01, 3.0, None, [0.3, 0.6, 0.8, 0.9], out_dir=tmp_path, options=ScanOptions())
    df, header = read_table(paths["band"])
    assert list(df.columns) == OVERLAP_COLUMNS
    assert df["flags"].tolist()[0] == "inner_diverged"
    assert header["positive_interval"] == "(0.8, 0.9)"


@pytest.mark.slow
def test_umbral_de_trivializacion_de_minimos_en_a_0_01() -> None:
    options = ScanOptions(workers=1, compute_tc=False, compute_bbp=False, refine=True, threshold_tol=1e-3)
    result = phase_diagram(0.01, [7.0, 8.0], [0.0], options)
    assert result.thresholds[0].alpha_triv_min == pytest.approx(7.49, abs=0.1)


@pytest.mark.slow
def test_umbrales_bbp_de_minimos_extremos_en_a_0_01() -> None:
    options = ScanOptions(workers=1, compute_tc=False, refine=True, threshold_tol=1e-3)
    result = phase_diagram(0.01, [2.5, 3.0, 4.0, 4.75], [0.0], options)
    curve = result.thresholds[0]
    assert curve.alpha_bbp_high == pytest.approx(2.76, abs=0.1)
    assert curve.alpha_bbp_low == pytest.approx(4.39, abs=0.1)


@pytest.mark.slow
def test_umbral_bbp_tipico_en_a_1() -> None:
    options = ScanOptions(workers=1, compute_tc=False, refine=True, threshold_tol=1e-3)
    result = phase_diagram(1.0, [5.5, 6.5], [0.0], options)
    assert result.thresholds[0].alpha_bbp_typ == pytest.approx(5.94, abs=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("a", [0.1, 1.0])
def test_umbrales_crecen_con_a(a: float) -> None:
    options = ScanOptions(workers=1, compute_tc=False, refine=True, threshold_tol=1e-3)
    alphas = [2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0, 12.0, 14.0]
    base = phase_diagram(0.01, alphas, [0.0], options).thresholds[0]
    curve = phase_diagram(a, alphas, [0.0], options).thresholds[0]
    pairs = [
        (base.alpha_triv_min, curve.alpha_triv_min),
        (base.alpha_triv_fin, curve.alpha_triv_fin),
        (base.alpha_bbp_typ, curve.alpha_bbp_typ),
    ]
    compared = [(lo, hi) for lo, hi in pairs if math.isfinite(lo) and math.isfinite(hi)]
    assert compared
    for lo, hi in compared:
        assert hi > lo
