# Nombre de archivo: io.py
# Ubicación de archivo: cli/io.py
# Descripción: Carga de archivos de configuración JSON y fusión con los flags de la línea de comandos

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Type, TypeVar

import orjson
from pydantic import BaseModel

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


class ConfigError(ValueError):
    """Configuración ilegible o inválida (código de salida 4)."""


def load_config(path: Optional[Path | str]) -> Dict[str, Any]:
    """Documento JSON de configuración; ``None`` equivale a un documento vacío."""
    if path is None:
        return {}
    path = Path(path)
    try:
        data = orjson.loads(path.read_bytes())
    except FileNotFoundError as exc:
        raise ConfigError(f"No existe el archivo de configuración: {path}") from exc
    except orjson.JSONDecodeError as exc:
        raise ConfigError(f"JSON inválido en {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("La configuración debe ser un objeto JSON")
    return data


def merge_overrides(base: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Los flags explícitos (no ``None``) pisan al archivo; claves ``a.b`` anidan."""
    merged: Dict[str, Any] = {k: (dict(v) if isinstance(v, Mapping) else v) for k, v in base.items()}
    for key, value in overrides.items():
        if value is None:
            continue
        target = merged
        *parents, leaf = key.split(".")
        for part in parents:
            node = target.get(part)
            if not isinstance(node, dict):
                node = {}
                target[part] = node
            target = node
        target[leaf] = value
    return merged


def resolve(model: Type[ModelT], path: Optional[Path | str], overrides: Mapping[str, Any]) -> ModelT:
    """Valida la configuración completa antes de ejecutar nada."""
    data = merge_overrides(load_config(path), overrides)
    resolved = model.model_validate(data)
    logger.debug("action=resolve model=%s config=%s", model.__name__, resolved.model_dump(mode="json"))
    return resolved


def parse_floats(text: Optional[str]) -> Optional[list[float]]:
    """``"1.5,2,2.5"`` → ``[1.5, 2.0, 2.5]``; vacío → lista vacía."""
    if text is None:
        return None
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"Lista de números inválida: {text}") from exc


__all__ = ["ConfigError", "load_config", "merge_overrides", "parse_floats", "resolve"]
