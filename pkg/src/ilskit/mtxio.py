"""Matrix Market files, CSV tables, JSON reports.

The Matrix Market support covers exactly what the problem sources need:
``coordinate`` and ``array`` formats, ``real`` or ``integer`` fields,
``general`` or ``symmetric`` storage (symmetric files keep the lower
triangle and are expanded on read).  Everything else is rejected with a
typed error.  Writers emit full-precision scientific notation (17
significant digits) so numeric round trips are bit exact.
"""

import contextlib
import csv
import json
import math

import numpy as np

from .errors import MtxFormatError
from .sparse import SparseMatrix

_FORMATS = {"coordinate", "array"}
_FIELDS = {"real", "integer"}
_SYMMETRIES = {"general", "symmetric"}


def fmt_float(x):
    """Full-precision scientific notation; round trips float64 bit exactly."""
    return f"{float(x):.16e}"


def _parse_header(line, path):
    parts = line.strip().split()
    if len(parts) != 5 or parts[0].lower() != "%%matrixmarket":
        raise MtxFormatError(f"{path}: malformed header line: {line.strip()!r}")
    _, obj, fmt, field, sym = (s.lower() for s in parts)
    if obj != "matrix":
        raise MtxFormatError(f"{path}: unsupported object {obj!r}")
    if fmt not in _FORMATS:
        raise MtxFormatError(f"{path}: unsupported format {fmt!r}")
    if field not in _FIELDS:
        raise MtxFormatError(f"{path}: unsupported field {field!r} (need real or integer)")
    if sym not in _SYMMETRIES:
        raise MtxFormatError(f"{path}: unsupported symmetry {sym!r}")
    return fmt, field, sym


def _data_lines(lines, path):
    for lineno, raw in lines:
        s = raw.strip()
        if not s or s.startswith("%"):
            continue
        yield lineno, s


def _read_entries(path):
    with open(path, encoding="ascii") as fh:
        first = fh.readline()
        if not first:
            raise MtxFormatError(f"{path}: empty file")
        fmt, field, sym = _parse_header(first, path)
        numbered = _data_lines(enumerate(fh, start=2), path)

        try:
            lineno, size_line = next(numbered)
        except StopIteration:
            raise MtxFormatError(f"{path}: missing size line") from None
        tokens = size_line.split()

        if fmt == "coordinate":
            if len(tokens) != 3:
                raise MtxFormatError(f"{path}:{lineno}: size line needs 'rows cols nnz'")
            try:
                nrows, ncols, nnz = (int(t) for t in tokens)
            except ValueError:
                raise MtxFormatError(f"{path}:{lineno}: non-integer size line") from None
            rows, cols, vals = [], [], []
            for _ in range(nnz):
                try:
                    lineno, entry = next(numbered)
                except StopIteration:
                    raise MtxFormatError(
                        f"{path}: declared {nnz} entries, found {len(rows)}"
                    ) from None
                parts = entry.split()
                if len(parts) != 3:
                    raise MtxFormatError(f"{path}:{lineno}: entry needs 'i j value'")
                try:
                    i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
                except ValueError:
                    raise MtxFormatError(f"{path}:{lineno}: unparsable entry") from None
                if not (1 <= i <= nrows and 1 <= j <= ncols):
                    raise MtxFormatError(f"{path}:{lineno}: index ({i}, {j}) out of range")
                if not math.isfinite(v):
                    raise MtxFormatError(f"{path}:{lineno}: non-finite value")
                if sym == "symmetric" and i < j:
                    raise MtxFormatError(
                        f"{path}:{lineno}: symmetric files must store the lower triangle"
                    )
                rows.append(i - 1)
                cols.append(j - 1)
                vals.append(v)
            for lineno, _ in numbered:
                raise MtxFormatError(f"{path}:{lineno}: more entries than declared")
            if sym == "symmetric":
                if nrows != ncols:
                    raise MtxFormatError(f"{path}: symmetric matrix must be square")
                extra = [(c, r, v) for r, c, v in zip(rows, cols, vals) if r != c]
                rows += [r for r, _, _ in extra]
                cols += [c for _, c, _ in extra]
                vals += [v for _, _, v in extra]
            return nrows, ncols, rows, cols, vals, None

        # array format: dense column-major values
        if len(tokens) != 2:
            raise MtxFormatError(f"{path}:{lineno}: size line needs 'rows cols'")
        try:
            nrows, ncols = (int(t) for t in tokens)
        except ValueError:
            raise MtxFormatError(f"{path}:{lineno}: non-integer size line") from None
        if sym != "general":
            raise MtxFormatError(f"{path}: symmetric array files are not supported")
        count = nrows * ncols
        values = []
        for _ in range(count):
            try:
                lineno, entry = next(numbered)
            except StopIteration:
                raise MtxFormatError(
                    f"{path}: declared {count} values, found {len(values)}"
                ) from None
            try:
                v = float(entry)
            except ValueError:
                raise MtxFormatError(f"{path}:{lineno}: unparsable value") from None
            if not math.isfinite(v):
                raise MtxFormatError(f"{path}:{lineno}: non-finite value")
            values.append(v)
        for lineno, _ in numbered:
            raise MtxFormatError(f"{path}:{lineno}: more values than declared")
        dense = np.array(values).reshape((ncols, nrows)).T
        return nrows, ncols, None, None, None, dense


def read_mtx(path):
    """Read a Matrix Market file as a SparseMatrix."""
    nrows, ncols, rows, cols, vals, dense = _read_entries(path)
    if dense is not None:
        return SparseMatrix.from_dense(dense)
    return SparseMatrix.from_triplets(nrows, ncols, rows, cols, vals)


def read_mtx_dense(path):
    """Read a Matrix Market file as a dense ndarray."""
    nrows, ncols, rows, cols, vals, dense = _read_entries(path)
    if dense is not None:
        return dense
    return SparseMatrix.from_triplets(nrows, ncols, rows, cols, vals).to_dense()


def read_mtx_vector(path):
    """Read a one-column Matrix Market file as a 1-D array."""
    dense = read_mtx_dense(path)
    if dense.shape[1] != 1:
        raise MtxFormatError(f"{path}: expected a single column, got shape {dense.shape}")
    return dense[:, 0]


def write_mtx(path, mat, comment=None):
    """Write a SparseMatrix in coordinate real general format (1-based)."""
    csr = mat.scipy().tocoo()
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{mat.nrows} {mat.ncols} {mat.nnz}\n")
        order = np.lexsort((csr.col, csr.row))
        for k in order:
            fh.write(f"{csr.row[k] + 1} {csr.col[k] + 1} {fmt_float(csr.data[k])}\n")


def write_mtx_array(path, arr, comment=None):
    """Write a dense vector or matrix in array real general format."""
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"expected 1-D or 2-D array, got shape {arr.shape}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{arr.shape[0]} {arr.shape[1]}\n")
        for j in range(arr.shape[1]):
            for i in range(arr.shape[0]):
                fh.write(fmt_float(arr[i, j]) + "\n")


def _cell(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    if value is None:
        return ""
    return str(value)


@contextlib.contextmanager
def _text_sink(path, newline):
    """Open a path for writing, or pass a ready file object through."""
    if hasattr(path, "write"):
        yield path
    else:
        with open(path, "w", encoding="ascii", newline=newline) as fh:
            yield fh


def write_csv(path, rows, columns=None):
    """Write a list of dict rows; floats in full-precision scientific notation."""
    if columns is None:
        if not rows:
            raise ValueError("cannot infer columns from an empty table")
        columns = list(rows[0].keys())
    with _text_sink(path, newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])


def json_safe(obj):
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.ndarray):
        return [json_safe(v) for v in obj.tolist()]
    return obj


def write_report_json(path, payload):
    """Write a solve report; non-finite floats serialize as null."""
    with _text_sink(path, newline="\n") as fh:
        json.dump(json_safe(payload), fh, indent=2, allow_nan=False)
        fh.write("\n")


def report_payload(report, problem_descriptor, seed=None, extra=None):
    """Canonical JSON payload for a solve: the documented keys first."""
    payload = {
        "method": report.method,
        "alpha": report.alpha,
        "problem": problem_descriptor,
        "it": report.iters,
        "res": report.final_res,
        "err": report.final_err,
        "wall_seconds": report.wall_seconds,
    }
    if seed is not None:
        payload["seed"] = seed
    payload["converged"] = report.converged
    payload["res_normal"] = report.res_normal
    if extra:
        payload.update(extra)
    return payload
