# Nombre de archivo: io.py
# Ubicación de archivo: core/io.py
# Descripción: Escritura y lectura de tablas CSV con encabezado y registros JSON sin pérdida

"""Formatos de salida estables.

* CSV con líneas ``# clave=valor`` de encabezado, orden de columnas fijo y
  floats con 17 cifras significativas.
* Registros JSON (uno por archivo o JSON Lines) serializados con orjson.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import orjson
import pandas as pd
from pydantic import BaseModel

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
FLOAT_FORMAT = "%.17g"
_ORJSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def _header_lines(header: Mapping[str, Any]) -> List[str]:
    merged: Dict[str, Any] = {"schema_version": SCHEMA_VERSION}
    merged.update(header)
    return [f"# {key}={value}\n" for key, value in merged.items()]


def write_table(
    df: pd.DataFrame,
    path: Path | str,
    *,
    columns: Sequence[str],
    header: Mapping[str, Any] | None = None,
) -> Path:
    """Escribe ``df`` con las columnas en el orden dado (faltantes quedan vacías)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = df.reindex(columns=list(columns))
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.writelines(_header_lines(header or {}))
        table.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("action=write_table path=%s rows=%s", path, len(table))
    return path


def read_table(path: Path | str) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """Lee una tabla escrita por ``write_table``; retorna (datos, encabezado)."""
    path = Path(path)
    header: Dict[str, str] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = value.strip()
    df = pd.read_csv(path, comment="#", float_precision="round_trip", keep_default_na=True)
    if "flags" in df.columns:
        df["flags"] = df["flags"].fillna("").astype(str)
    return df, header


def _payload(record: BaseModel | Mapping[str, Any]) -> Mapping[str, Any]:
    return record.model_dump(mode="json") if isinstance(record, BaseModel) else record


def dumps_record(record: BaseModel | Mapping[str, Any]) -> bytes:
    return orjson.dumps(_payload(record), option=_ORJSON_OPTIONS)


def dump_record(record: BaseModel | Mapping[str, Any], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(_payload(record), option=_ORJSON_OPTIONS | orjson.OPT_INDENT_2))
    return path


def load_record(path: Path | str) -> Dict[str, Any]:
    return orjson.loads(Path(path).read_bytes())


def dump_records(records: Iterable[BaseModel | Mapping[str, Any]], path: Path | str) -> Path:
    """JSON Lines: un registro por línea."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        for record in records:
            fh.write(dumps_record(record))
            fh.write(b"\n")
    return path


def load_records(path: Path | str) -> List[Dict[str, Any]]:
    lines = Path(path).read_bytes().splitlines()
    return [orjson.loads(line) for line in lines if line.strip()]


__all__ = [
    "FLOAT_FORMAT",
    "SCHEMA_VERSION",
    "dump_record",
    "dump_records",
    "dumps_record",
    "load_record",
    "load_records",
    "read_table",
    "write_table",
]
