import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from detpath import io
from detpath.surgery import build_path


@given(arrays(np.float64, (3, 3), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_matrix_text_round_trip(A):
    np.testing.assert_array_equal(io.parse_matrix_text(io.format_matrix(A)), A)


def test_read_file_and_inline(tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("2\n1 2\n3   4\n")
    np.testing.assert_array_equal(io.read_matrix(str(f)), [[1, 2], [3, 4]])
    np.testing.assert_array_equal(io.read_matrix("1,2;3,4"), [[1, 2], [3, 4]])
    np.testing.assert_array_equal(io.read_matrix("1 2; 3 4", n=2), [[1, 2], [3, 4]])


@pytest.mark.parametrize("text", ["", "x\n1\n", "2\n1 2\n3\n", "2\n1 2\n"])
def test_bad_matrix_text(text):
    with pytest.raises(ValueError):
        io.parse_matrix_text(text)


def test_size_mismatch(tmp_path):
    with pytest.raises(ValueError):
        io.read_matrix("1,0;0,1", n=3)
    with pytest.raises(ValueError):
        io.read_matrix(str(tmp_path / "missing.txt"))


def test_certificate_record_is_json(tmp_path):
    cert = build_path(np.eye(2), np.diag([2.0, 3.0]))
    rec = io.certificate_record(cert)
    assert list(rec)[:3] == ["n", "endpoints", "nodes"]
    out = tmp_path / "c.json"
    io.write_json(rec, out)
    assert out.read_text() == io.dumps(rec)
