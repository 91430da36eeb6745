"""State envelopes (JSON) and trajectory CSV files."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

import numpy as np

from .dynamics import Diagnostics, Ensemble
from .errors import InvalidParameterError
from .groups import parse_group_spec
from .ring import FieldMode

ENVELOPE_KEYS = ("group_spec", "field_mode", "kappa", "agents")


def envelope(ens: Ensemble, meta: dict | None = None) -> dict:
    if not ens.group.spec:
        raise InvalidParameterError("ensemble group has no spec string to record")
    if ens.mode is FieldMode.REAL:
        agents = [[float(c) for c in row.real] for row in ens.states]
    else:
        agents = [[[float(c.real), float(c.imag)] for c in row] for row in ens.states]
    return {
        "group_spec": ens.group.spec,
        "field_mode": ens.mode.value,
        "kappa": ens.kappa,
        "agents": agents,
        "meta": dict(meta or {}),
    }


def ensemble_from_envelope(doc: dict) -> Ensemble:
    missing = [k for k in ENVELOPE_KEYS if k not in doc]
    if missing:
        raise InvalidParameterError(f"state envelope is missing keys: {', '.join(missing)}")
    group = parse_group_spec(str(doc["group_spec"]))
    mode = FieldMode(doc["field_mode"]) if doc["field_mode"] in ("real", "complex") else None
    if mode is None:
        raise InvalidParameterError(f"unknown field_mode {doc['field_mode']!r}")
    agents = doc["agents"]
    if not isinstance(agents, list) or not agents:
        raise InvalidParameterError("state envelope needs a non-empty agents list")
    try:
        arr = np.array(agents, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(f"malformed agents array: {exc}") from exc
    if mode is FieldMode.COMPLEX:
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise InvalidParameterError("complex agents must be lists of [re, im] pairs")
        states = arr[..., 0] + 1j * arr[..., 1]
    else:
        if arr.ndim != 2:
            raise InvalidParameterError("real agents must be lists of numbers")
        states = arr.astype(np.complex128)
    if states.shape[1] != group.order:
        raise InvalidParameterError(
            f"coefficient arrays have length {states.shape[1]}, group order is {group.order}"
        )
    return Ensemble(group, states, float(doc["kappa"]), mode)


def write_state(path: str | Path, ens: Ensemble, meta: dict | None = None) -> None:
    # json writes floats with repr(), the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(envelope(ens, meta), indent=1) + "\n")


def read_state(path: str | Path) -> tuple[Ensemble, dict]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidParameterError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"state file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidParameterError("state file must hold a JSON object")
    return ensemble_from_envelope(doc), doc


def write_trajectory_csv(path: str | Path, records: Iterable[Diagnostics]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(Diagnostics.CSV_COLUMNS)
        for d in records:
            w.writerow([repr(float(v)) for v in d.row()])


def read_trajectory_csv(path: str | Path) -> list[Diagnostics]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != Diagnostics.CSV_COLUMNS:
            raise InvalidParameterError(f"unexpected trajectory header {header}")
        return [Diagnostics(*(float(v) for v in row)) for row in r]
