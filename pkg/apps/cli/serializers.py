"""
Artifact writers: JSON documents, CSV tables and CSV field grids.

Every file is written to a temporary sibling, flushed to disk and renamed
over the target, so readers never see a partial artifact.
"""
import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np
import structlog

from apps.core.exceptions import OutputError

logger = structlog.get_logger(__name__)

CSV_FLOAT_FORMAT = '.17g'


def to_jsonable(value):
    """Plain JSON types; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


def dumps(document):
    """Sorted, indented JSON; floats keep their shortest round-trip repr."""
    return json.dumps(to_jsonable(document), indent=2, sort_keys=True, allow_nan=False) + '\n'


def format_csv_value(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), CSV_FLOAT_FORMAT)
    return str(value)


def write_atomic(path, text):
    """Write text as UTF-8 with LF line endings, replacing path atomically."""
    path = Path(path)
    tmp_name = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            mode='w',
            encoding='utf-8',
            newline='\n',
            dir=path.parent,
            prefix=f'.{path.name}.',
            suffix='.tmp',
            delete=False,
        ) as handle:
            tmp_name = handle.name
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except OSError as exc:
        if tmp_name is not None and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        logger.error("artifact_write_failed", path=str(path), error=str(exc))
        raise OutputError(path, exc.strerror or str(exc)) from exc
    logger.info("artifact_written", path=str(path), size=len(text))
    return path


def write_json(path, document):
    return write_atomic(path, dumps(document))


def csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_csv_value(value) for value in row])
    return buffer.getvalue()


def write_csv(path, header, rows):
    return write_atomic(path, csv_text(header, rows))


def write_grid(path, array):
    """Row-major CSV grid, one grid row (fixed y) per line; NaN is written as 'nan'."""
    array = np.asarray(array)
    lines = (','.join(format_csv_value(value) for value in row) for row in array.tolist())
    return write_atomic(path, '\n'.join(lines) + '\n')


def write_fields(out_dir, dom, grids, stem='fields'):
    """
    Write named grids as CSV files plus a JSON sidecar describing the domain.

    Masks are written as 0/1 grids next to the fields.
    """
    out_dir = Path(out_dir)
    masks = {
        'interior_mask': dom.interior_mask.astype(int),
        'boundary_mask': dom.boundary_mask.astype(int),
    }
    files = {}
    for name, array in {**grids, **masks}.items():
        files[name] = write_grid(out_dir / f'{name}.csv', array).name
    sidecar = {
        'domain': dom.describe(),
        'h': dom.h,
        'layout': 'row-major, rows are y from bottom to top, columns are x from left to right',
        'x': dom.x,
        'y': dom.y,
        'files': files,
    }
    return write_json(out_dir / f'{stem}.json', sidecar)
