"""Stable JSON emission and operator/state round trips."""
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrealize.jsonio import (
    dumps,
    format_float,
    loads,
    operator_from_json,
    operator_to_json,
    read_json,
    state_from_json,
    state_to_json,
    write_json,
)
from qrealize.tensor import Operator, PureState, space


def test_format_float_exact_17_digits():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(1.0) == "1"
    assert format_float(-2.5e-8) == "-2.4999999999999999e-08"


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_format_float_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        format_float(bad)
    with pytest.raises(ValueError):
        dumps({"x": bad})


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trips_float64(x):
    assert float(format_float(x)) == x


def test_dumps_matches_stdlib_semantics():
    doc = {"a": [1, 2.5, None, True, False, "s"], "b": {"c": -3}}
    assert json.loads(dumps(doc)) == doc
    assert json.loads(dumps(doc, indent=2)) == doc


def test_dumps_is_byte_stable_and_order_preserving():
    doc = {"z": 1, "a": 2}
    assert dumps(doc) == '{"z":1,"a":2}'
    assert dumps(doc) == dumps({"z": 1, "a": 2})


def test_dumps_handles_numpy_scalars():
    doc = {"i": np.int64(4), "f": np.float64(0.5), "b": np.bool_(True)}
    assert dumps(doc) == '{"i":4,"f":0.5,"b":true}'


def test_dumps_rejects_unserializable():
    with pytest.raises(TypeError):
        dumps({"x": object()})
    with pytest.raises(TypeError):
        dumps({1: "non-string key"})


def test_loads_reports_position_on_malformed_text():
    with pytest.raises(json.JSONDecodeError) as err:
        loads('{"a": 1,}')
    assert err.value.lineno == 1


def test_operator_round_trip():
    sp = space(("A", 2), ("B", 2))
    rng = np.random.default_rng(8)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    op = Operator(sp, m)
    back = operator_from_json(json.loads(dumps(operator_to_json(op))))
    assert back.space == sp
    assert np.array_equal(back.mat, op.mat)


def test_operator_from_json_defaults_imaginary_to_zero():
    doc = {"labels": [{"name": "A", "dim": 2}], "re": [[1.0, 0.0], [0.0, 0.0]]}
    op = operator_from_json(doc)
    assert np.array_equal(op.mat, np.diag([1.0, 0.0]).astype(complex))


def test_state_round_trip():
    sp = space(("A", 2), ("B", 2))
    amp = np.array([1.0, 1j, -1.0, -1j]) / 2.0
    st_obj = PureState(sp, amp)
    back = state_from_json(json.loads(dumps(state_to_json(st_obj))))
    assert back.space == sp
    assert np.array_equal(back.amplitudes, st_obj.amplitudes)


def test_write_and_read_json(tmp_path):
    path = tmp_path / "doc.json"
    doc = {"verdict": "CONSISTENT", "gap": -1.25e-17}
    write_json(str(path), doc)
    text = path.read_text()
    assert text.endswith("\n")
    assert read_json(str(path)) == doc
    # indented, parseable by the stdlib
    assert json.loads(text) == doc
