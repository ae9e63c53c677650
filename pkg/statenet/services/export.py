"""
StateNet-PH Export Module
Deterministic JSON and CSV artifacts
"""
import csv
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

import numpy as np
import orjson
from pydantic import BaseModel

from statenet.schemas.results import SweepResult
from statenet.services.graphdist import DissimilarityMatrix
from statenet.services.homology import PersistenceDiagram

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def to_jsonable(obj: Any) -> Any:
    """Unwrap pydantic models and diagrams into plain containers"""
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="python")
    if isinstance(obj, PersistenceDiagram):
        return obj.to_record()
    if isinstance(obj, DissimilarityMatrix):
        return {"values": obj.values, **obj.provenance()}
    return obj


def dumps(obj: Any, pretty: bool = True) -> bytes:
    """
    Serialize with sorted keys; non-finite floats become null

    Returns:
        UTF-8 bytes, newline terminated when ``pretty``
    """
    options = JSON_OPTIONS if pretty else orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
    data = orjson.dumps(to_jsonable(obj), option=options, default=to_jsonable)
    return data + b"\n" if pretty else data


def write_json(path: PathLike, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(obj))
    logger.debug(f"Wrote {path}")
    return path


def read_json(path: PathLike) -> Any:
    return orjson.loads(Path(path).read_bytes())


def write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.debug(f"Wrote {path}")
    return path


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_matrix_csv(path: PathLike, matrix: Union[np.ndarray, DissimilarityMatrix], labels: Optional[List] = None) -> Path:
    """Square matrix with a header row of node labels"""
    values = matrix.values if isinstance(matrix, DissimilarityMatrix) else np.asarray(matrix, dtype=float)
    labels = labels if labels is not None else list(range(values.shape[0]))
    return write_rows(path, [""] + [str(x) for x in labels], ([lab] + list(row) for lab, row in zip(labels, values)))


def write_diagram_csv(path: PathLike, dgm: PersistenceDiagram) -> Path:
    """One row per finite pair: dimension, birth, death"""
    rows = [(dim, b, d) for dim in (0, 1) for b, d in dgm[dim]]
    return write_rows(path, ["dimension", "birth", "death"], rows)


def write_sweep_csv(path: PathLike, sweep: SweepResult) -> Path:
    """Long format: series, x, entropy, max_lifetime (timings are written separately)"""
    rows = []
    for label, entropy in sweep.entropy_series.items():
        for k, x in enumerate(sweep.x_values):
            rows.append((
                label,
                x,
                entropy[k],
                sweep.max_lifetime_series[label][k],
            ))
    return write_rows(path, ["series", sweep.parameter, "entropy", "max_lifetime"], rows)


def write_points_csv(path: PathLike, points: Sequence[Sequence[float]], labels: Sequence[str], names: Sequence[str]) -> Path:
    rows = ((name, label, x, y) for name, label, (x, y) in zip(names, labels, points))
    return write_rows(path, ["name", "label", "x", "y"], rows)


def write_series_csv(path: PathLike, samples: np.ndarray) -> Path:
    """Single-column signal, readable back by ingest_csv(skip_header=True)"""
    return write_rows(path, ["x"], ([v] for v in np.asarray(samples, dtype=float)))


def write_sweep(directory: PathLike, sweep: SweepResult, stem: str = "sweep") -> List[Path]:
    """
    Sweep JSON and CSV plus a separate timings file

    Wall-clock times go to ``<stem>_timings.json`` only.
    """
    directory = Path(directory)
    return [
        write_json(directory / f"{stem}.json", sweep.model_dump(exclude={"compute_time_series"})),
        write_sweep_csv(directory / f"{stem}.csv", sweep),
        write_json(directory / f"{stem}_timings.json", {
            "x_values": sweep.x_values,
            "seconds": sweep.compute_time_series,
        }),
    ]
