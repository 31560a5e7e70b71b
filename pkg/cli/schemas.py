# Nombre de archivo: schemas.py
# Ubicación de archivo: cli/schemas.py
# Descripción: Configuraciones declarativas de cada subcomando y registros de salida versionados

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.io import SCHEMA_VERSION
from core.kacrice.critical import TCOptions
from core.kacrice.minima import SolverOptions
from core.kacrice.quadrature import QuadratureOptions

Alpha = Annotated[float, Field(gt=1.0)]
Overlap = Annotated[float, Field(ge=0.0, lt=1.0)]
InitialOverlap = Annotated[float, Field(ge=0.0, le=1.0)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SolverBlock(_Strict):
    """Tolerancias opcionales; lo no indicado se toma de ``Settings``."""

    inner_tol: Optional[float] = Field(default=None, gt=0)
    outer_tol: Optional[float] = Field(default=None, gt=0)
    outer_max_iter: Optional[int] = Field(default=None, ge=1)
    tc_tol: Optional[float] = Field(default=None, gt=0)
    tc_max_iter: Optional[int] = Field(default=None, ge=1)
    quad_rtol: Optional[float] = Field(default=None, gt=0)
    quad_max_cells: Optional[int] = Field(default=None, ge=64)

    def _quadrature(self) -> QuadratureOptions:
        base = QuadratureOptions.from_settings()
        updates = {k: v for k, v in (("rtol", self.quad_rtol), ("max_cells", self.quad_max_cells)) if v is not None}
        return replace(base, **updates)

    def solver_options(self) -> SolverOptions:
        base = SolverOptions.from_settings()
        updates = {
            k: v
            for k, v in (
                ("inner_tol", self.inner_tol),
                ("outer_tol", self.outer_tol),
                ("outer_max_iter", self.outer_max_iter),
            )
            if v is not None
        }
        return replace(base, **updates, quadrature=self._quadrature())

    def tc_options(self) -> TCOptions:
        base = TCOptions.from_settings()
        updates = {k: v for k, v in (("tol", self.tc_tol), ("max_iter", self.tc_max_iter)) if v is not None}
        return replace(base, **updates, quadrature=self._quadrature())


class GridSpec(_Strict):
    lo: float
    hi: float
    n: int = Field(default=81, ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "GridSpec":
        if not self.lo < self.hi:
            raise ValueError("La grilla requiere lo < hi")
        return self


class RhoSpec(_Strict):
    n_points: int = Field(default=512, ge=64)
    eps: float = Field(default=1e-6, ge=1e-8, le=1e-3)
    w_range: Optional[Tuple[float, float]] = None
    richardson: bool = False


class ComplexityConfig(_Strict):
    a: float = Field(default=0.01, gt=0)
    q: float = Field(default=0.0, ge=0.0, lt=1.0)
    alpha: float = Field(gt=1.0)
    mode: Literal["tilde0", "fin", "tc"] = "tilde0"
    e: Optional[float] = None
    free_e: bool = False
    band: bool = False
    bbp: bool = False
    nu_grid: Optional[GridSpec] = None
    rho: Optional[RhoSpec] = None
    solver: SolverBlock = Field(default_factory=SolverBlock)
    out_dir: Path = Path("data/complexity")

    @model_validator(mode="after")
    def _energy(self) -> "ComplexityConfig":
        if self.free_e == (self.e is not None):
            raise ValueError("Indicar exactamente uno de 'e' o 'free_e'")
        if self.band and self.mode == "tc":
            raise ValueError("La banda de energías sólo aplica a los modos tilde0 y fin")
        return self


class PhaseDiagramConfig(_Strict):
    a: float = Field(default=0.01, gt=0)
    alpha_grid: List[Alpha] = Field(min_length=1)
    q_grid: List[Overlap] = Field(min_length=1)
    workers: Optional[int] = Field(default=None, ge=1)
    n_coarse: int = Field(default=25, ge=5)
    compute_tc: bool = True
    compute_bbp: bool = True
    refine: bool = False
    solver: SolverBlock = Field(default_factory=SolverBlock)
    out_dir: Path = Path("data/landscape")


class OverlapBandConfig(_Strict):
    a: float = Field(default=0.01, gt=0)
    alpha: Alpha
    e: Optional[float] = Field(default=None, gt=0)
    q_grid: List[Overlap] = Field(min_length=1)
    solver: SolverBlock = Field(default_factory=SolverBlock)
    out_dir: Path = Path("data/landscape")


class GDBlock(_Strict):
    d: int = Field(default=512, ge=2)
    a: float = Field(default=0.01, gt=0)
    eta: float = Field(default=2e-4, gt=0)
    t_C: int = Field(default=60_000, ge=0)
    T: Optional[int] = Field(default=None, ge=0)
    success_threshold: float = Field(default=0.99, gt=0, lt=1)
    latitude_half_width: float = Field(default=0.05, gt=0)
    normalize_signal: bool = True
    trace_stride: int = Field(default=100, ge=1)


class SimulateConfig(_Strict):
    alpha_grid: List[Alpha] = Field(default_factory=list)
    q0_grid: List[InitialOverlap] = Field(default_factory=lambda: [0.0])
    replicates: int = Field(default=10, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: Optional[int] = Field(default=None, ge=1)
    analyze_hessian: bool = False
    gd: GDBlock = Field(default_factory=GDBlock)
    out_dir: Path = Path("data/gd")

    @property
    def grid(self) -> List[Tuple[float, float]]:
        return [(alpha, q0) for q0 in self.q0_grid for alpha in self.alpha_grid]


class CompareConfig(_Strict):
    theory: List[Path] = Field(min_length=1)
    experiment: Path
    outlier_overlap: float = Field(default=0.1, gt=0, lt=1)
    out_dir: Path = Path("data/compare")


class SpectrumConfig(ComplexityConfig):
    rho: Optional[RhoSpec] = Field(default_factory=RhoSpec)


# ---------------------------------------------------------------- registros


class _Record(BaseModel):
    schema_version: str = SCHEMA_VERSION


class BandRecord(BaseModel):
    e_min: float
    e_star: float
    e_max: float
    sigma_at_star: float


class BBPRecord(BaseModel):
    g_min: float
    x_min: float
    x2: float
    d_alpha: float
    t_nu: float
    w_min: float
    x_star: Optional[float] = None
    w_star: Optional[float] = None


class LabelSummary(BaseModel):
    """Resumen de ν: cuantiles por variable e histograma de F."""

    levels: List[float]
    quantiles: Dict[str, List[float]]
    f_edges: List[float]
    f_probs: List[float]


class SpectrumGrid(BaseModel):
    w: List[float]
    rho: List[float]
    w_min: float


class SolutionRecord(_Record):
    command: str = "complexity"
    config: Dict[str, object]
    a: float
    q: float
    alpha: float
    mode: str
    e: Optional[float] = None
    energy: float
    sigma: float
    A: float
    g_re: float
    g_im: float = 0.0
    multipliers: Dict[str, float]
    residuals: Dict[str, float]
    converged: bool
    status: str
    t_nu: float
    band: Optional[BandRecord] = None
    bbp: Optional[BBPRecord] = None
    labels: Optional[LabelSummary] = None
    spectrum: Optional[SpectrumGrid] = None


class ComparisonRow(BaseModel):
    a: float
    alpha: float
    q: float
    energy_in_band: Optional[bool] = None
    margin_low: Optional[float] = None
    margin_high: Optional[float] = None
    spectral_ks: Optional[float] = None
    f_tv: Optional[float] = None
    label_quantile_distance: Optional[float] = None
    bbp_agreement: Optional[bool] = None


class ComparisonReport(_Record):
    command: str = "compare"
    config: Dict[str, object]
    rows: List[ComparisonRow]
