import struct

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from adrexp.fileio import (SnapshotFormatError, read_indicators, read_snapshot,
                           snapshot_name, write_indicators, write_snapshot)

shapes = st.lists(st.integers(1, 6), min_size=1, max_size=4).map(tuple)


@settings(max_examples=50, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(arrays(np.float64, shapes, elements=st.floats(allow_nan=False, width=64)))
def test_snapshot_round_trip_is_bitwise(tmp_path, T):
    path = tmp_path / "x.adrf"
    write_snapshot(path, T)
    back = read_snapshot(path)
    assert back.shape == T.shape
    assert back.tobytes() == np.ascontiguousarray(T).tobytes()


def test_snapshot_round_trip_keeps_nan_payload(tmp_path):
    T = np.array([[np.nan, -0.0], [np.inf, 5e-324]])
    write_snapshot(tmp_path / "a.adrf", T)
    assert read_snapshot(tmp_path / "a.adrf").tobytes() == T.tobytes()


def test_snapshot_byte_layout(tmp_path):
    T = np.array([[1.0, 3.0], [2.0, 4.0], [5.0, 6.0]])
    path = tmp_path / "u_7.adrf"
    write_snapshot(path, T)
    raw = path.read_bytes()
    assert raw[:4] == b"ADRF"
    assert struct.unpack("<4I", raw[4:20]) == (1, 2, 3, 2)
    assert struct.unpack("<6d", raw[20:]) == (1.0, 2.0, 5.0, 3.0, 4.0, 6.0)


def test_snapshot_rejects_foreign_files(tmp_path):
    p = tmp_path / "bad.adrf"
    p.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(SnapshotFormatError):
        read_snapshot(p)
    p.write_bytes(b"ADRF" + struct.pack("<III", 1, 1, 4) + bytes(8))
    with pytest.raises(SnapshotFormatError):
        read_snapshot(p)
    p.write_bytes(b"ADRF" + struct.pack("<III", 9, 1, 1) + bytes(8))
    with pytest.raises(SnapshotFormatError, match="version"):
        read_snapshot(p)


def test_snapshot_names():
    assert snapshot_name("u", 4000) == "u_4000.adrf"
    assert snapshot_name("v", 0) == "v_0.adrf"


def test_indicator_csv_round_trip(tmp_path):
    t = [0.1, 0.2, 0.30000000000000004]
    m = [1.0, 1.0000001, 0.99]
    inc = [3.5e-7, 1e-300, 0.0]
    path = tmp_path / "indicators.csv"
    write_indicators(path, t, m, inc)
    assert path.read_text().splitlines()[0] == "t,mean_u,increment_u_fro"
    back = read_indicators(path)
    np.testing.assert_array_equal(back, np.column_stack([t, m, inc]))
