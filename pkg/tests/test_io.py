import json

import numpy as np
import pytest

from fantappie import io
from fantappie.funcalc import OperatorTuple
from fantappie.measures import DiscreteMeasure
from fantappie.series import TruncatedSeries


def test_series_round_trip():
    f = TruncatedSeries(2, 3, {(1, 0): 1.5, (0, 3): -2j})
    doc = io.series_to_json(f)
    assert io.series_from_json(json.loads(json.dumps(doc))).max_abs_difference(f) == 0


def test_empty_series():
    f = io.series_from_json({"dim": 2, "max_degree": 0, "coeffs": []})
    assert f.is_zero()


@pytest.mark.parametrize(
    "doc, pointer",
    [
        ({"dim": 2, "coeffs": []}, ""),
        ({"dim": 2, "max_degree": 1, "coeffs": [{"alpha": [1]}]}, "/coeffs/0/alpha"),
        ({"dim": 2, "max_degree": 1, "coeffs": [{"alpha": [1, 1]}]}, "/coeffs/0/alpha"),
        ({"dim": 2, "max_degree": 1, "coeffs": [{"alpha": [1, -1]}]}, "/coeffs/0/alpha/1"),
        ({"dim": 2, "max_degree": 1, "coeffs": [{"alpha": [1, 0], "re": "x"}]}, "/coeffs/0/re"),
        ({"dim": 2, "max_degree": 1, "coeffs": [{"alpha": [1, 0]}, {"alpha": [1, 0]}]}, "/coeffs/1/alpha"),
    ],
)
def test_series_schema_errors_point_at_field(doc, pointer):
    with pytest.raises(io.SchemaError) as exc:
        io.series_from_json(doc)
    assert exc.value.pointer == pointer


def test_measure_and_tuple_round_trip():
    mu = DiscreteMeasure(np.array([[1, 0], [0, 1j]]), np.array([0.5, 2.0]))
    back = io.measure_from_json(io.measure_to_json(mu))
    assert np.array_equal(back.points, mu.points) and np.array_equal(back.weights, mu.weights)
    T = OperatorTuple((np.array([[0, 1.5], [2j, 0]]),))
    assert np.array_equal(io.tuple_from_json(io.tuple_to_json(T))[0], T[0])
    with pytest.raises(io.SchemaError):
        io.measure_from_json({"dim": 2, "atoms": [{"point": [[1, 0]], "weight": 1}]})
    with pytest.raises(io.SchemaError):
        io.measure_from_json({"dim": 2, "atoms": [{"point": [[1, 0], [0, 0]], "weight": -1}]})
    with pytest.raises(io.SchemaError):
        io.tuple_from_json({"n": 2, "d": 1, "matrices": [[[[0, 0]]]]})
    with pytest.raises(io.SchemaError):
        io.tuple_from_json({"n": 1, "d": 2, "matrices": [[[[0, 0]]]]})


def test_dumps_is_deterministic_with_17_digits():
    text = io.dumps({"x": 0.1, "z": 1 + 2j, "a": np.array([1.0, 2.0]), "b": True, "n": None})
    assert '"x": 0.10000000000000001' in text
    assert '"re": 1' in text
    assert json.loads(text)["a"] == [1.0, 2.0]
    assert io.format_float(float("nan")) == '"NaN"'
    assert io.format_float(float("-inf")) == '"-Infinity"'


def test_write_csv():
    text = io.write_csv(["a", "b"], [[[1, 0], 0.5], ["x", {"k": 1}]])
    assert text.splitlines() == ["a,b", '"[1,0]",0.5', 'x,"{""k"":1}"']
