"""JSON file formats for matrices, states, schedules, datasets and reports.

Floats are written with Python's shortest round-trip repr, so reading a file
back gives bit-identical values.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ArgumentError
from .qmat import check_density_matrix, n_qubits_of
from .states import NoiseSchedule, NoiseTerm, pauli_term
from .tomography import TomographyDataset


def matrix_to_dict(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ArgumentError("only 2-D matrices can be serialized")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def matrix_from_dict(d: dict) -> np.ndarray:
    try:
        rows, cols = int(d["rows"]), int(d["cols"])
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ArgumentError(f"malformed matrix: {exc}") from exc
    if rows < 1 or cols < 1 or re.size != rows * cols or im.size != rows * cols:
        raise ArgumentError("matrix entry count does not match rows x cols")
    m = (re + 1j * im).reshape(rows, cols)
    if not np.all(np.isfinite(m)):
        raise ArgumentError("matrix has non-finite entries")
    return m


def state_to_dict(rho: np.ndarray) -> dict:
    return {"n_qubits": n_qubits_of(rho), "matrix": matrix_to_dict(rho)}


def state_from_dict(d: dict) -> np.ndarray:
    if not isinstance(d, dict) or "matrix" not in d:
        raise ArgumentError("state file needs a 'matrix' entry")
    rho = check_density_matrix(matrix_from_dict(d["matrix"]), atol=1e-9)
    if "n_qubits" in d and int(d["n_qubits"]) != n_qubits_of(rho):
        raise ArgumentError("n_qubits does not match the matrix size")
    return rho


def schedule_to_list(s: NoiseSchedule) -> list[dict]:
    return [{"weight": t.weight, "op_b": matrix_to_dict(t.op_b), "op_bprime": matrix_to_dict(t.op_bprime)}
            for t in s.terms]


def schedule_from_list(items: list) -> NoiseSchedule:
    """Parse terms given either as matrices or as ``pauli_b``/``pauli_bprime`` labels."""
    if not isinstance(items, list):
        raise ArgumentError("schedule must be a JSON list")
    terms = []
    for it in items:
        try:
            w = float(it["weight"])
            if "pauli_b" in it:
                terms.append(pauli_term(w, str(it["pauli_b"]).upper(), str(it["pauli_bprime"]).upper()))
            else:
                terms.append(NoiseTerm(w, matrix_from_dict(it["op_b"]), matrix_from_dict(it["op_bprime"])))
        except (KeyError, TypeError) as exc:
            raise ArgumentError(f"malformed schedule term: {exc}") from exc
    return NoiseSchedule(tuple(terms))


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"{path}: invalid JSON ({exc})") from exc


def save_state(path, rho) -> None:
    write_json(path, state_to_dict(rho))


def load_state(path) -> np.ndarray:
    return state_from_dict(read_json(path))


def save_dataset(path, d: TomographyDataset) -> None:
    write_json(path, d.to_dict())


def load_dataset(path) -> TomographyDataset:
    return TomographyDataset.from_dict(read_json(path))


def load_schedule(path) -> NoiseSchedule:
    return schedule_from_list(read_json(path))
