# Nombre de archivo: test_io.py
# Ubicación de archivo: tests/test_io.py
# Descripción: Pruebas de las tablas CSV con encabezado y de los registros JSON

import math

import numpy as np
import pandas as pd

from core.io import (
    SCHEMA_VERSION,
    dump_record,
    dump_records,
    dumps_record,
    load_record,
    load_records,
    read_table,
    write_table,
)
from modules.landscape_scan.schemas import OverlapPoint


def test_tabla_respeta_encabezado_y_orden_de_columnas(tmp_path) -> None:
    df = pd.DataFrame({"sigma": [0.1], "alpha": [2.0], "q": [0.0]})
    path = write_table(df, tmp_path / "sub" / "t.csv", columns=["alpha", "q", "sigma", "flags"], header={"a": 0.01})
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"# schema_version={SCHEMA_VERSION}"
    assert lines[1] == "# a=0.01"
    assert lines[2] == "alpha,q,sigma,flags"
    table, header = read_table(path)
    assert header == {"schema_version": SCHEMA_VERSION, "a": "0.01"}
    assert list(table.columns) == ["alpha", "q", "sigma", "flags"]
    assert table["flags"].tolist() == [""]


def test_floats_sin_perdida_y_nan_vacio(tmp_path) -> None:
    values = [1.0 / 3.0, np.pi * 1e-12, -2.0 / 7.0, float("nan")]
    path = write_table(pd.DataFrame({"x": values}), tmp_path / "x.csv", columns=["x"])
    table, _ = read_table(path)
    assert table["x"].tolist()[:3] == values[:3]
    assert math.isnan(table["x"].iloc[3])


def test_registro_json_ordenado_y_nan_como_null(tmp_path) -> None:
    point = OverlapPoint(a=0.01, alpha=3.0, q=0.5)
    assert dumps_record({"b": 1, "a": np.float64(2.5)}) == b'{"a":2.5,"b":1}'
    path = dump_record(point, tmp_path / "p.json")
    loaded = load_record(path)
    assert loaded["sigma"] is None
    assert loaded["q"] == 0.5


def test_registros_en_json_lines(tmp_path) -> None:
    rows = [{"replicate": k, "overlap": 0.1 * k} for k in range(3)]
    path = dump_records(rows, tmp_path / "runs.jsonl")
    assert path.read_bytes().count(b"\n") == 3
    assert load_records(path) == rows
    assert load_records(dump_records([], tmp_path / "empty.jsonl")) == []
