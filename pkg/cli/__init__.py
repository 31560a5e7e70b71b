# Nombre de archivo: __init__.py
# Ubicación de archivo: cli/__init__.py
# Descripción: Paquete de la línea de comandos (subcomandos, configuraciones y comparación)

"""Línea de comandos ``paisaje``."""

from .main import build_parser, main

__all__ = ["build_parser", "main"]
