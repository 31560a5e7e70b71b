# Nombre de archivo: __init__.py
# Ubicación de archivo: modules/gd_simulator/__init__.py
# Descripción: Inicializa el paquete del simulador de descenso por gradiente

from .dynamics import generate_instance, run_gd
from .observables import empirical_laws, hessian_at
from .schemas import GDConfig, GDRunResult
from .service import BatchResult, batch_experiment

__all__ = [
    "BatchResult",
    "GDConfig",
    "GDRunResult",
    "batch_experiment",
    "empirical_laws",
    "generate_instance",
    "hessian_at",
    "run_gd",
]
