"""File formats: instance containers, report records, experiment tables.

One format per value kind, all text, all deterministic (sorted keys, repr
floats, no timestamps), so identical inputs produce byte-identical files.

  QlspInstance      single file: a one-line JSON header (kappa, d, form,
                    seed, right-hand state) followed by the matrix as a
                    MatrixMarket coordinate block
  SolverReport      indented JSON record
  ExperimentResult  CSV table with declared header, plus a JSON sidecar
                    (path + ".meta.json") holding name and diagnostics

Floats are written with repr (JSON) or 18 significant digits (MatrixMarket),
both exact for doubles, so roundtrips reproduce values bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np
from scipy.io import mmread, mmwrite
from scipy.sparse import coo_matrix

from .numerics import DenseOperator, StateRegister
from .qlsp import QlspInstance
from .report import ExperimentResult, SolverReport

MM_PRECISION = 17  # digits after the point; 18 significant, exact for doubles


class StorageError(ValueError):
    """Parse or format failure, with 1-based line/column when known."""

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column else "")
        super().__init__(message + loc)
        self.line = line
        self.column = column


def _plain(value):
    """JSON-safe copy: numpy scalars and arrays to native types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    return value


def _dump_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _matrix_block(mat: np.ndarray) -> str:
    coo = coo_matrix(mat)
    if coo.nnz == 0:
        raise StorageError("refusing to write an empty matrix")
    buf = io.BytesIO()
    mmwrite(buf, coo, precision=MM_PRECISION)
    return buf.getvalue().decode("ascii")


def _parse_matrix_block(text: str, offset: int) -> np.ndarray:
    """offset = number of file lines before the block (for error reporting)."""
    try:
        mat = mmread(io.BytesIO(text.encode("ascii")))
    except Exception:
        line, col = _locate_matrix_error(text)
        raise StorageError("malformed matrix block", offset + line, col) from None
    dense = np.asarray(mat.todense() if hasattr(mat, "todense") else mat)
    if dense.size == 0 or not np.any(dense):
        raise StorageError("matrix block is empty", offset + 1, 1)
    return dense


def _locate_matrix_error(text: str) -> tuple[int, int]:
    """First line that fails the coordinate-format grammar."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("%%MatrixMarket"):
        return 1, 1
    i = 1
    while i < len(lines) and lines[i].startswith("%"):
        i += 1
    expect = 3  # rows cols nnz
    for j in range(i, len(lines)):
        parts = lines[j].split()
        if not parts:
            continue
        try:
            int(parts[0]), int(parts[1])
            if expect == 3:
                int(parts[2])
                expect = 0
            else:
                float(parts[2])
        except (ValueError, IndexError):
            bad = 1
            for k, p in enumerate(parts):
                try:
                    (int if k < 2 or expect == 3 else float)(p)
                except ValueError:
                    bad = lines[j].index(p) + 1
                    break
            return j + 1, bad
    return len(lines), 1


def save_instance(path, inst: QlspInstance) -> None:
    header = {
        "kind": "qlsp-instance",
        "kappa": inst.kappa, "d": inst.d, "form": inst.form,
        "seed": inst.seed, "n": inst.n,
        "b_real": np.real(inst.b.amps).tolist(),
        "b_imag": np.imag(inst.b.amps).tolist(),
    }
    body = json.dumps(_plain(header), sort_keys=True) + "\n" + _matrix_block(inst.A.mat)
    Path(path).write_text(body, encoding="ascii")


def load_instance(path) -> QlspInstance:
    text = Path(path).read_text(encoding="ascii")
    head, sep, rest = text.partition("\n")
    if not sep:
        raise StorageError("missing matrix block", 2, 1)
    try:
        meta = json.loads(head)
    except json.JSONDecodeError as e:
        raise StorageError("malformed instance header", 1, e.colno) from None
    if not isinstance(meta, dict) or meta.get("kind") != "qlsp-instance":
        raise StorageError("not an instance file", 1, 1)
    mat = _parse_matrix_block(rest, offset=1)
    amps = np.asarray(meta["b_real"], dtype=float)
    imag = np.asarray(meta["b_imag"], dtype=float)
    if np.any(imag):
        amps = amps + 1j * imag
    n = int(meta["n"])
    b = StateRegister(amps, ancilla=0, system=n)
    hermitian = meta["form"] != "general"
    seed = meta["seed"]
    return QlspInstance(DenseOperator(mat, hermitian=hermitian), b,
                        kappa=float(meta["kappa"]), d=int(meta["d"]),
                        form=str(meta["form"]),
                        seed=None if seed is None else int(seed))


def save_report(path, report: SolverReport) -> None:
    record = {"kind": "solver-report", **report.to_dict()}
    Path(path).write_text(_dump_json(record), encoding="ascii")


def load_report(path) -> SolverReport:
    text = Path(path).read_text(encoding="ascii")
    try:
        record = json.loads(text)
    except json.JSONDecodeError as e:
        raise StorageError("malformed report", e.lineno, e.colno) from None
    if record.get("kind") != "solver-report":
        raise StorageError("not a report file", 1, 1)
    return SolverReport(
        method=record["method"], params=record["params"],
        final_fidelity=record["final_fidelity"],
        success_probabilities=record["success_probabilities"],
        query_ledger=record["query_ledger"],
        formula_derived_costs=record["formula_derived_costs"],
        attempts=record["attempts"],
    )


def _cell(value) -> str:
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    raise StorageError(f"unsupported cell type {type(value).__name__}")


def _parse_cell(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _sidecar(path) -> Path:
    return Path(str(path) + ".meta.json")


def save_experiment(path, result: ExperimentResult) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_cell(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="ascii")
    meta = {"kind": "experiment-meta", "name": result.name,
            "columns": list(result.columns), "diagnostics": result.diagnostics}
    _sidecar(path).write_text(_dump_json(meta), encoding="ascii")


def load_experiment(path) -> ExperimentResult:
    text = Path(path).read_text(encoding="ascii")
    lines = text.splitlines()
    if not lines:
        raise StorageError("empty table", 1, 1)
    reader = csv.reader(lines)
    columns = next(reader)
    rows = []
    for i, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(columns):
            raise StorageError(f"expected {len(columns)} cells, got {len(row)}",
                               i, 1)
        rows.append(tuple(_parse_cell(c) for c in row))
    name = Path(path).stem
    diagnostics = {}
    side = _sidecar(path)
    if side.exists():
        try:
            meta = json.loads(side.read_text(encoding="ascii"))
        except json.JSONDecodeError as e:
            raise StorageError("malformed experiment sidecar", e.lineno, e.colno) from None
        name = meta.get("name", name)
        diagnostics = meta.get("diagnostics", {})
    return ExperimentResult(name, columns, rows, diagnostics)


def save(path, value) -> None:
    if isinstance(value, QlspInstance):
        save_instance(path, value)
    elif isinstance(value, SolverReport):
        save_report(path, value)
    elif isinstance(value, ExperimentResult):
        save_experiment(path, value)
    else:
        raise StorageError(f"unsupported value type {type(value).__name__}")


def load(path):
    """Dispatch on file shape: instance header, JSON record, or CSV table."""
    text = Path(path).read_text(encoding="ascii")
    first = text.partition("\n")[0].strip()
    if first.startswith("{"):
        if '"qlsp-instance"' in first:
            return load_instance(path)
        return load_report(path)
    return load_experiment(path)


def io_roundtrip(path, value):
    """Write value to path, read it back, and return the reloaded value."""
    save(path, value)
    return load(path)
