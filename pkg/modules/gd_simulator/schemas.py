# Nombre de archivo: schemas.py
# Ubicación de archivo: modules/gd_simulator/schemas.py
# Descripción: Modelos de datos del simulador de descenso por gradiente (configuración, corridas y lotes)

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config import (
    DEFAULT_A,
    DEFAULT_D,
    DEFAULT_ETA,
    DEFAULT_LATITUDE,
    DEFAULT_SUCCESS_THRESHOLD,
    DEFAULT_T_C,
    TRACE_STRIDE,
    T_PER_LOG2_D,
)

Array = NDArray[np.float64]


class GDConfig(BaseModel):
    """Hiperparámetros de una corrida de GD con burn-in a overlap fijo."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    d: int = Field(default=DEFAULT_D, ge=2)
    alpha: float = Field(gt=1.0)
    a: float = Field(default=DEFAULT_A, gt=0.0)
    eta: float = Field(default=DEFAULT_ETA, gt=0.0)
    q0: float = Field(default=0.0, ge=0.0, le=1.0)
    t_C: int = Field(default=DEFAULT_T_C, ge=0)
    T: Optional[int] = Field(default=None, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    success_threshold: float = Field(default=DEFAULT_SUCCESS_THRESHOLD, gt=0.0, lt=1.0)
    latitude_half_width: float = Field(default=DEFAULT_LATITUDE, gt=0.0)
    normalize_signal: bool = True
    trace_stride: int = Field(default=TRACE_STRIDE, ge=1)

    @model_validator(mode="after")
    def _check_samples(self) -> "GDConfig":
        if self.n < 1:
            raise ValueError("n = round(alpha·d) debe ser ≥ 1")
        return self

    @property
    def n(self) -> int:
        return int(round(self.alpha * self.d))

    @property
    def total_steps(self) -> int:
        """T = 12000·log2(d) salvo que se fije explícitamente."""
        if self.T is not None:
            return self.T
        return int(round(T_PER_LOG2_D * math.log2(self.d)))


@dataclass(slots=True, frozen=True)
class Instance:
    """Datos x_{1..n} y señal θ* (inmutables dentro de una réplica)."""

    x: Array
    theta_star: Array
    seed: int

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def d(self) -> int:
        return int(self.x.shape[1])


@dataclass(slots=True)
class GDRunResult:
    success: bool
    final_overlap: float
    final_energy: float
    overlap_trace: Array
    energy_trace: Array
    trace_steps: NDArray[np.int64]
    theta: Array
    wall_steps: int
    burn_in_energy: float = float("nan")


@dataclass(slots=True)
class HessianSpectrum:
    """Autovalores ordenados de la Hessiana esférica y solapamiento |v_min · w̃|."""

    eigenvalues: Array
    v_min_overlap: float
    t_mean: float

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])


@dataclass(slots=True)
class EmpiricalLaws:
    label_hist: Array
    label_edges: Array
    f_hist: Array
    f_edges: Array
    energy: float
    overlap: float
    y: Array
    y_star: Array
    F: Array


class RunRecord(BaseModel):
    """Registro por corrida del lote."""

    alpha: float
    q0: float
    replicate: int
    seed: int
    success: Optional[bool] = None
    final_overlap: Optional[float] = None
    final_energy: Optional[float] = None
    wall_steps: int = 0
    in_band: bool = False
    min_eigenvalue: Optional[float] = None
    v_min_overlap: Optional[float] = None
    error: Optional[str] = None


class BatchRow(BaseModel):
    alpha: float
    q0: float
    replicates: int
    success_rate: float
    success_err: float
    mean_qT_fail: float
    mean_energy: float
    energy_err: float
    n_trapped: int
    n_errors: int


@dataclass(slots=True)
class PooledObservables:
    """Observables acumulados sobre los mínimos atrapados de una celda (α, q0)."""

    eigenvalues: List[float] = field(default_factory=list)
    F: List[float] = field(default_factory=list)
    y: List[float] = field(default_factory=list)
    y_star: List[float] = field(default_factory=list)
    energies: List[float] = field(default_factory=list)
    outlier_overlaps: List[float] = field(default_factory=list)
    label_hist: Optional[Array] = None
    label_edges: Optional[Array] = None
    f_hist: Optional[Array] = None
    f_edges: Optional[Array] = None
    n_hist: int = 0

    def extend(self, spectrum: Optional[HessianSpectrum], laws: EmpiricalLaws) -> None:
        if spectrum is not None:
            self.eigenvalues.extend(spectrum.eigenvalues.tolist())
            self.outlier_overlaps.append(spectrum.v_min_overlap)
        if self.label_hist is None or self.f_hist is None:
            self.label_hist, self.label_edges = laws.label_hist.copy(), laws.label_edges
            self.f_hist, self.f_edges = laws.f_hist.copy(), laws.f_edges
        else:
            if not (np.array_equal(self.label_edges, laws.label_edges) and np.array_equal(self.f_edges, laws.f_edges)):
                raise ValueError("Los histogramas de una celda deben compartir los bordes")
            self.label_hist += laws.label_hist
            self.f_hist += laws.f_hist
        self.n_hist += 1
        self.F.extend(laws.F.tolist())
        self.y.extend(laws.y.tolist())
        self.y_star.extend(laws.y_star.tolist())
        self.energies.append(laws.energy)

    def histograms(self) -> Dict[str, object]:
        """Densidades promedio sobre las corridas con sus bordes."""
        if self.n_hist == 0 or self.label_hist is None or self.f_hist is None:
            return {"n_hist": 0, "label_edges": [], "label_hist": [], "f_edges": [], "f_hist": []}
        return {
            "n_hist": self.n_hist,
            "label_edges": np.asarray(self.label_edges).tolist(),
            "label_hist": (self.label_hist / self.n_hist).tolist(),
            "f_edges": np.asarray(self.f_edges).tolist(),
            "f_hist": (self.f_hist / self.n_hist).tolist(),
        }

    def as_dict(self) -> Dict[str, object]:
        return {
            "eigenvalues": self.eigenvalues,
            "F": self.F,
            "y": self.y,
            "y_star": self.y_star,
            "energies": self.energies,
            "outlier_overlaps": self.outlier_overlaps,
            **self.histograms(),
        }
