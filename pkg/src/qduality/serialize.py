"""JSON interchange formats for states, channels, measurements and tables.

Matrices travel as {"rows", "cols", "data"} with row-major [re, im] pairs.
Floats are emitted in shortest round-trip form, so save -> load -> save is
byte-identical and values survive exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .classical import Distribution
from .correlations import JointTable
from .errors import ValidationError
from .qobjects import DensityOperator, Ensemble, KrausChannel, Povm


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValidationError("matrix payload must be two-dimensional")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(x.real), float(x.imag)] for x in m.reshape(-1)],
    }


def json_to_matrix(obj) -> np.ndarray:
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= set(obj):
        raise ValidationError("matrix object must carry rows, cols and data")
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise ValidationError(
            f"matrix data length {len(data)} does not match rows*cols = {rows * cols}"
        )
    flat = np.array(
        [complex(float(re), float(im)) for re, im in data], dtype=complex
    )
    if not np.all(np.isfinite(flat.real)) or not np.all(np.isfinite(flat.imag)):
        raise ValidationError("matrix entries must be finite")
    return flat.reshape(rows, cols)


def state_to_json(rho: DensityOperator) -> dict:
    return {"dim": rho.dim, "matrix": matrix_to_json(rho.matrix)}


def state_from_json(obj) -> DensityOperator:
    mat = json_to_matrix(obj["matrix"])
    if mat.shape != (int(obj["dim"]), int(obj["dim"])):
        raise ValidationError("state matrix shape does not match declared dim")
    return DensityOperator(mat)


def channel_to_json(e: KrausChannel) -> dict:
    return {
        "din": e.din,
        "dout": e.dout,
        "kraus": [matrix_to_json(k) for k in e.kraus],
    }


def channel_from_json(obj) -> KrausChannel:
    din, dout = int(obj["din"]), int(obj["dout"])
    kraus = tuple(json_to_matrix(k) for k in obj["kraus"])
    return KrausChannel(kraus, din, dout)


def povm_to_json(m: Povm) -> dict:
    return {
        "dim": m.dim,
        "elements": [matrix_to_json(e) for e in m.elements],
        "labels": list(m.labels),
    }


def povm_from_json(obj) -> Povm:
    elements = tuple(json_to_matrix(e) for e in obj["elements"])
    labels = tuple(str(s) for s in obj.get("labels", range(len(elements))))
    dim = int(obj["dim"])
    if any(e.shape != (dim, dim) for e in elements):
        raise ValidationError("measurement element shape does not match declared dim")
    return Povm(elements, labels)


def ensemble_to_json(ens: Ensemble) -> dict:
    return {
        "members": [
            {"weight": float(w), "state": state_to_json(s)} for w, s in ens.members

        ]
    }


def ensemble_from_json(obj) -> Ensemble:
    members = tuple(
        (float(m["weight"]), state_from_json(m["state"])) for m in obj["members"]
    )
    return Ensemble(members)


def table_to_json(t: JointTable) -> dict:
    return {
        "probs": matrix_to_json(t.probs.astype(complex)),
        "m_labels": list(t.m_labels),
        "n_labels": list(t.n_labels),
    }


def table_from_json(obj) -> JointTable:
    probs = json_to_matrix(obj["probs"])
    if np.max(np.abs(probs.imag)) > 0:
        raise ValidationError("probability table entries must be real")
    m_labels = tuple(str(s) for s in obj.get("m_labels", range(probs.shape[0])))
    n_labels = tuple(str(s) for s in obj.get("n_labels", range(probs.shape[1])))
    return JointTable(probs.real, m_labels, n_labels)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def load(path):
    return json.loads(Path(path).read_text())
