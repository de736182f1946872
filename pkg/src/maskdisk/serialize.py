"""JSON encoding of states, machines, claimed sets and reports.

Complex numbers are ``[re, im]`` pairs and matrices are row-major lists of
rows. Floats are rounded before writing so repeated runs give identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .hyperdisk import Hyperdisk
from .linalg import fix_phase
from .masking import MarginalSpec, MaskableSet, MaskingMachine

LOAD_NORM_TOL = 1e-6


class InputError(ValueError):
    """Malformed or inconsistent input document."""


def number(x) -> float:
    """Scalar diagnostic, ten significant digits, no negative zero."""
    return float(f"{float(x):.10g}") + 0.0


def _amp(x) -> float:
    return round(float(x), 12) + 0.0


def encode_vector(vec) -> list:
    return [[_amp(z.real), _amp(z.imag)] for z in np.asarray(vec, dtype=complex).reshape(-1)]


def encode_matrix(mat) -> list:
    return [encode_vector(row) for row in np.asarray(mat, dtype=complex)]


def _decode_vector(data, what) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{what}: amplitudes must be [re, im] pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InputError(f"{what}: amplitudes must be a list of [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what}: non-finite amplitude")
    return arr[:, 0] + 1j * arr[:, 1]


class Loader:
    """Decodes documents and records how far loaded states were from unit norm."""

    def __init__(self):
        self.max_norm_error = 0.0

    def state(self, doc, what="state", dim=None) -> np.ndarray:
        if not isinstance(doc, dict) or "amplitudes" not in doc or "dim" not in doc:
            raise InputError(f"{what}: expected an object with 'dim' and 'amplitudes'")
        vec = _decode_vector(doc["amplitudes"], what)
        if vec.size != doc["dim"]:
            raise InputError(f"{what}: {vec.size} amplitudes but dim {doc['dim']}")
        if dim is not None and vec.size != dim:
            raise InputError(f"{what}: dimension {vec.size}, expected {dim}")
        if "dims" in doc and int(np.prod(doc["dims"])) != vec.size:
            raise InputError(f"{what}: dims {doc['dims']} do not factor {vec.size}")
        err = abs(np.linalg.norm(vec) - 1)
        if err > LOAD_NORM_TOL:
            raise InputError(f"{what}: norm {np.linalg.norm(vec):.8g} is not 1 within {LOAD_NORM_TOL}")
        self.max_norm_error = max(self.max_norm_error, float(err))
        return vec / np.linalg.norm(vec)

    def spec(self, doc) -> MarginalSpec:
        try:
            return MarginalSpec(tuple((float(lam), int(g)) for lam, g in doc["blocks"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"marginal spec: {exc}") from exc

    def machine(self, doc) -> MaskingMachine:
        try:
            dims = tuple(int(x) for x in doc["dims"])
            rows = doc["matrix"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("machine: expected 'dims' and 'matrix'") from exc
        if not isinstance(rows, list) or not rows:
            raise InputError("machine: matrix must be a non-empty list of rows")
        mat = np.array([_decode_vector(r, f"machine row {i}") for i, r in enumerate(rows)])
        if "n" in doc and mat.shape[1] != doc["n"]:
            raise InputError(f"machine: matrix has {mat.shape[1]} columns but n = {doc['n']}")
        spec = self.spec(doc["marginal"]) if doc.get("marginal") is not None else None
        try:
            return MaskingMachine(mat, dims, spec)
        except ValueError as exc:
            raise InputError(f"machine: {exc}") from exc

    def claimed(self, doc, dim: int) -> MaskableSet:
        if not isinstance(doc, dict):
            raise InputError("claimed set: expected an object")
        disks = []
        for i, d in enumerate(doc.get("disks", [])):
            if not isinstance(d, dict) or not isinstance(d.get("basis"), list) or "coeffs" not in d:
                raise InputError(f"disk {i}: expected 'basis' and 'coeffs'")
            basis = np.column_stack([self.state(s, f"disk {i} basis", dim) for s in d["basis"]])
            try:
                disks.append(Hyperdisk(basis, np.asarray(d["coeffs"], dtype=float)))
            except (TypeError, ValueError) as exc:
                raise InputError(f"disk {i}: {exc}") from exc
        states = [self.state(s, f"claimed state {i}", dim) for i, s in enumerate(doc.get("states", []))]
        return MaskableSet(disks, states)

    def subspace(self, doc):
        """``(columns, dims)`` from a subspace document or a machine document."""
        if "matrix" in doc:
            m = self.machine(doc)
            return m.matrix, m.dims
        try:
            dims = tuple(int(x) for x in doc["dims"])
            states = doc["states"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("subspace: expected 'dims' and 'states'") from exc
        cols = np.column_stack([self.state(s, f"subspace state {i}", dims[0] * dims[1]) for i, s in enumerate(states)])
        return cols, dims


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path, doc):
    Path(path).write_text(dumps(doc), encoding="utf-8")


# -- encoders ----------------------------------------------------------------------


def encode_state(vec, dims=None) -> dict:
    vec = fix_phase(np.asarray(vec, dtype=complex).reshape(-1))[0]
    doc = {"dim": int(vec.size), "amplitudes": encode_vector(vec)}
    if dims is not None:
        doc["dims"] = [int(x) for x in dims]
    return doc


def encode_spec(spec: MarginalSpec) -> dict:
    return {"blocks": [[number(lam), int(g)] for lam, g in spec.blocks]}


def encode_machine(machine: MaskingMachine) -> dict:
    doc = {"dims": list(machine.dims), "n": machine.n, "matrix": encode_matrix(machine.matrix)}
    if machine.marginal is not None:
        doc["marginal"] = encode_spec(machine.marginal)
    return doc


def encode_disk(disk: Hyperdisk, dims=None) -> dict:
    return {
        "basis": [encode_state(disk.basis[:, j], dims) for j in range(disk.dim)],
        "coeffs": [number(r) for r in disk.coeffs],
    }


def encode_claimed(claimed: MaskableSet) -> dict:
    return {"disks": [encode_disk(d) for d in claimed.disks], "states": [encode_state(s) for s in claimed.states]}


def encode_subspace(cols, dims) -> dict:
    cols = np.asarray(cols)
    return {"dims": list(dims), "states": [encode_state(cols[:, j], dims) for j in range(cols.shape[1])]}


def disk_witness(disk: Hyperdisk, space: str, dims=None) -> dict:
    return {"kind": "disk", "space": space, **encode_disk(disk, dims)}


def state_witness(vec, space: str, dims=None) -> dict:
    return {"kind": "state", "space": space, **encode_state(vec, dims)}


def report(verdict: str, witnesses, diagnostics: dict, **extra) -> dict:
    doc = {"verdict": verdict, "witnesses": list(witnesses), "diagnostics": _clean(diagnostics)}
    doc.update(_clean(extra))
    return doc


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return number(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj
