"""JSON serialization for operators, states, and result records.

Operators are stored as ``{"labels": [{"name": "A", "dim": 2}, ...],
"re": [[...]], "im": [[...]]}``; vectors use flat "amp_re"/"amp_im" lists.
Floats are written with 17 significant digits, enough for an exact float64
round trip; the stdlib encoder's shortest-repr output is not used so the
emitted byte strings stay stable across interpreter versions.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .tensor import LabeledSpace, Operator, PureState


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x}")
    return format(float(x), ".17g")


def dumps(value: Any, indent: int | None = None) -> str:
    """JSON text with floats at 17 significant digits.

    Handles dict / list / tuple / str / bool / None / int / float and numpy
    scalars.  Dict keys must be strings; insertion order is preserved, so a
    fixed input gives byte-identical output.
    """
    out: list[str] = []
    _emit(value, out, indent, 0)
    return "".join(out)


def _emit(v: Any, out: list[str], indent: int | None, depth: int) -> None:
    nl = "" if indent is None else "\n" + " " * (indent * (depth + 1))
    nl_close = "" if indent is None else "\n" + " " * (indent * depth)
    sep = "," if indent is None else ","
    if isinstance(v, dict):
        out.append("{")
        for i, (k, item) in enumerate(v.items()):
            if not isinstance(k, str):
                raise TypeError(f"JSON object keys must be str, got {type(k)}")
            if i:
                out.append(sep)
            out.append(nl)
            out.append(json.dumps(k))
            out.append(": " if indent is not None else ":")
            _emit(item, out, indent, depth + 1)
        out.append(nl_close)
        out.append("}")
    elif isinstance(v, (list, tuple)):
        out.append("[")
        for i, item in enumerate(v):
            if i:
                out.append(sep)
            out.append(nl)
            _emit(item, out, indent, depth + 1)
        out.append(nl_close)
        out.append("]")
    elif isinstance(v, bool) or isinstance(v, np.bool_):
        out.append("true" if v else "false")
    elif v is None:
        out.append("null")
    elif isinstance(v, (int, np.integer)):
        out.append(str(int(v)))
    elif isinstance(v, (float, np.floating)):
        out.append(format_float(float(v)))
    elif isinstance(v, str):
        out.append(json.dumps(v))
    else:
        raise TypeError(f"cannot serialize {type(v)}")


def loads(text: str) -> Any:
    return json.loads(text)


def _labels_to_json(sp: LabeledSpace) -> list[dict]:
    return [{"name": n, "dim": d} for n, d in sp.labels]


def _labels_from_json(labels: list[dict]) -> LabeledSpace:
    return LabeledSpace(tuple((l["name"], int(l["dim"])) for l in labels))


def operator_to_json(op: Operator) -> dict:
    return {
        "labels": _labels_to_json(op.space),
        "re": [[float(x) for x in row] for row in op.mat.real],
        "im": [[float(x) for x in row] for row in op.mat.imag],
    }


def operator_from_json(data: dict) -> Operator:
    sp = _labels_from_json(data["labels"])
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    return Operator(sp, re + 1j * im)


def state_to_json(st: PureState) -> dict:
    return {
        "labels": _labels_to_json(st.space),
        "amp_re": [float(x) for x in st.amplitudes.real],
        "amp_im": [float(x) for x in st.amplitudes.imag],
    }


def state_from_json(data: dict) -> PureState:
    sp = _labels_from_json(data["labels"])
    re = np.asarray(data["amp_re"], dtype=float)
    im = np.asarray(data.get("amp_im", np.zeros_like(re)), dtype=float)
    return PureState(sp, re + 1j * im)


def write_json(path: str, value: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(value, indent=2))
        fh.write("\n")


def read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.loads(fh.read())
