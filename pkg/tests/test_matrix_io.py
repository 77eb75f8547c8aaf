import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gpptkit.matrix_io import (
    MatrixParseError,
    format_scalar,
    matrix_from_json,
    matrix_to_json,
    parse_scalar,
    read_csv,
    read_matrix,
    write_csv,
    write_matrix,
)

finite = st.floats(allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("text,value", [
    ("1", 1.0), (" -2.5 ", -2.5), ("1e-3", 1e-3), (".5", 0.5),
    ("1+2i", 1 + 2j), ("1 - 2i", 1 - 2j), ("-3.5e2+1e-1j", -350 + 0.1j),
    ("2i", 2j), ("-i", -1j), ("i", 1j), ("0+i", 1j), ("4-j", 4 - 1j),
])
def test_parse_scalar(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1+", "1++2i", "i2", "1 2", "nan", "inf"])
def test_parse_scalar_rejects(text):
    with pytest.raises(MatrixParseError):
        parse_scalar(text)


@given(finite)
def test_real_scalar_roundtrip(x):
    assert parse_scalar(format_scalar(x)) == x


@given(finite, finite)
def test_complex_scalar_roundtrip(re_, im):
    z = complex(re_, im)
    back = parse_scalar(format_scalar(z))
    assert complex(back) == z


@given(st.integers(1, 5), st.integers(1, 5), st.booleans(), st.integers(0, 2**32 - 1))
def test_csv_roundtrip_exact(m, n, cplx, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, n)) * 10.0 ** rng.integers(-20, 20, size=(m, n))
    if cplx:
        a = a + 1j * rng.standard_normal((m, n))
    assert np.array_equal(read_csv(write_csv(a)), a)


@given(st.integers(1, 5), st.integers(1, 5), st.booleans(), st.integers(0, 2**32 - 1))
def test_json_roundtrip_exact(m, n, cplx, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, n))
    if cplx:
        a = a + 1j * rng.standard_normal((m, n))
    text = json.dumps(matrix_to_json(a, split=1))
    back, split = matrix_from_json(json.loads(text))
    assert np.array_equal(back, a) and split == 1


def test_csv_errors():
    with pytest.raises(MatrixParseError):
        read_csv("")
    with pytest.raises(MatrixParseError):
        read_csv("1,2\n3\n")
    with pytest.raises(MatrixParseError):
        read_csv("1e400\n")


def test_csv_tolerates_blank_lines_and_spaces():
    a = read_csv("\n 1 , 2+i \n\n3,4\n")
    assert np.array_equal(a, [[1, 2 + 1j], [3, 4]])


def test_json_errors():
    with pytest.raises(MatrixParseError):
        matrix_from_json({"rows": 2, "cols": 2, "entries": [1, 2, 3]})
    with pytest.raises(MatrixParseError):
        matrix_from_json({"rows": 1, "cols": 1})
    with pytest.raises(MatrixParseError):
        matrix_from_json({"rows": 1, "cols": 1, "entries": ["x"]})
    with pytest.raises(MatrixParseError):
        matrix_from_json({"rows": 1, "cols": 1, "entries": [[1, 2, 3]]})
    with pytest.raises(MatrixParseError):
        matrix_from_json({"rows": 1, "cols": 1, "entries": [True]})


def test_files(tmp_path):
    a = np.array([[1.0, -2.0], [0.5, 3.0]])
    for name in ("m.csv", "m.json"):
        path = str(tmp_path / name)
        write_matrix(path, a, split=1)
        back, split = read_matrix(path)
        assert np.array_equal(back, a)
        assert split == (1 if name.endswith(".json") else None)
    # content sniffing for JSON without the extension
    p = tmp_path / "m.txt"
    p.write_text(json.dumps(matrix_to_json(a)))
    assert np.array_equal(read_matrix(str(p))[0], a)
    with pytest.raises(MatrixParseError):
        read_matrix(str(p), fmt="xml")
    p.write_text("{broken")
    with pytest.raises(MatrixParseError):
        read_matrix(str(p))
