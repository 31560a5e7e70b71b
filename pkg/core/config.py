# Nombre de archivo: config.py
# Ubicación de archivo: core/config.py
# Descripción: Configuración centralizada (entorno) de tolerancias, workers y logging de PAISAJE-KR

"""Settings globales leídos del entorno con prefijo ``PAISAJE_``."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Parámetros numéricos y operativos configurables por entorno."""

    log_level: str = Field(default="INFO", description="Nivel de logging por defecto")
    log_to_file: bool = Field(default=False, description="Escribe además en archivo rotativo")
    logs_dir: Path = Field(default=Path("Logs"), description="Carpeta de logs rotativos")
    workers: int = Field(default=1, ge=1, description="Cantidad de procesos para barridos y réplicas")

    quad_rtol: float = Field(default=1e-7, gt=0, description="Tolerancia relativa de la cuadratura adaptativa")
    quad_atol: float = Field(default=1e-9, gt=0, description="Tolerancia absoluta de la cuadratura adaptativa")
    quad_max_cells: int = Field(default=6000, ge=64, description="Presupuesto de celdas de la subdivisión")
    quad_order: int = Field(default=6, ge=2, description="Puntos Gauss-Legendre por eje en cada celda")

    inner_tol: float = Field(default=1e-7, gt=0, description="Norma de gradiente del problema dual interno")
    outer_tol: float = Field(default=1e-6, gt=0, description="Norma de gradiente del ascenso externo en (log A, log g)")
    outer_max_iter: int = Field(default=60, ge=1, description="Iteraciones máximas del ascenso externo")
    tc_tol: float = Field(default=1e-9, gt=0, description="Cambio sucesivo para el punto fijo de puntos críticos")
    tc_max_iter: int = Field(default=5000, ge=1, description="Presupuesto de iteraciones del punto fijo")
    stieltjes_eps: float = Field(default=1e-6, gt=0, description="Ensanchamiento para la inversión Stieltjes-Perron")
    threshold_tol: float = Field(default=1e-2, gt=0, description="Tolerancia en alpha de las bisecciones de umbral")

    model_config = SettingsConfigDict(env_prefix="PAISAJE_", case_sensitive=False)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Retorna settings cacheados para reutilizar en el proyecto."""

    return Settings()


__all__ = ["Settings", "get_settings"]
