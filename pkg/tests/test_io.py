import json

import numpy as np
import pytest

from sympinf import io
from sympinf.fourier import FourierVector
from sympinf.lie_algebra import CovarianceSpec
from sympinf.suites import random_symplectic


def test_matrix_round_trip(tmp_path, rng):
    A = random_symplectic(4, rng)
    path = io.save_matrix(tmp_path / "A.json", A)
    assert np.array_equal(io.load_matrix(path), A)
    assert json.loads(path.read_text())["schema"] == "sympinf.matrix/1"


def test_vector_round_trip(tmp_path, rng):
    u = FourierVector(rng.standard_normal(6) + 1j * rng.standard_normal(6))
    path = io.save_vector(tmp_path / "u.json", u)
    assert np.array_equal(io.load_vector(path).coeffs, u.coeffs)


def test_report_round_trip(tmp_path):
    io.save_report(tmp_path / "r.json", "drift", {"x": np.float64(1.5), "ok": np.bool_(True)})
    doc = io.load_report(tmp_path / "r.json", "drift")
    assert doc == {"schema": "sympinf.drift/1", "x": 1.5, "ok": True}
    with pytest.raises(io.SchemaError):
        io.load_report(tmp_path / "r.json", "simulate")


@pytest.mark.parametrize("token", ["NaN", "Infinity", "-Infinity", "1e999"])
def test_non_finite_rejected(tmp_path, token):
    text = '{"schema": "sympinf.matrix/1", "N": 1, "real": [[%s, 0], [0, 1]], "imag": [[0, 0], [0, 0]]}' % token
    (tmp_path / "bad.json").write_text(text)
    with pytest.raises(ValueError, match="non-finite|overflows"):
        io.load_matrix(tmp_path / "bad.json")


def test_nan_refused_on_write(tmp_path):
    with pytest.raises(ValueError):
        io.save_report(tmp_path / "x.json", "drift", {"v": float("nan")})
    with pytest.raises(ValueError):
        io.write_csv(tmp_path / "x.csv", ["a"], [[float("inf")]])


def test_schema_and_shape_mismatch(tmp_path):
    with pytest.raises(io.SchemaError):
        io.matrix_from_dict({"schema": "sympinf.matrix/2", "N": 1, "real": [[1]], "imag": [[0]]})
    with pytest.raises(io.SchemaError):
        io.matrix_from_dict({"schema": "sympinf.matrix/1", "N": 2, "real": [[1, 0], [0, 1]],
                             "imag": [[0, 0], [0, 0]]})
    with pytest.raises(io.SchemaError):
        io.vector_from_dict({"schema": "sympinf.vector/1", "N": 1, "real": [1, 2]})


def test_write_once(tmp_path):
    io.write_json(tmp_path / "a.json", {"schema": "sympinf.x/1"})
    with pytest.raises(FileExistsError):
        io.write_json(tmp_path / "a.json", {"schema": "sympinf.x/1"})
    io.write_json(tmp_path / "a.json", {"schema": "sympinf.x/1", "v": 2}, overwrite=True)
    assert io.read_json(tmp_path / "a.json")["v"] == 2


def test_diffeo_and_covariance_inputs(tmp_path):
    (tmp_path / "d.json").write_text('{"a": [0.1], "b": [0.2, 0.05], "shift": 0.3}')
    psi = io.load_diffeo(tmp_path / "d.json")
    assert psi.a == (0.1,) and psi.b == (0.2, 0.05) and psi.shift == 0.3
    (tmp_path / "bad.json").write_text('{"b": [1.5]}')
    with pytest.raises(ValueError):
        io.load_diffeo(tmp_path / "bad.json")
    Q = CovarianceSpec(p=1.0, c=2.0, overrides={("im", 1, -2): 0.5})
    io.write_json(tmp_path / "q.json", io.covariance_to_dict(Q))
    back = io.load_covariance(tmp_path / "q.json")
    assert np.array_equal(back.weights(3), Q.weights(3))
    with pytest.raises(io.SchemaError):
        io.covariance_from_dict({"p": 1, "extra": 2})
    with pytest.raises(io.SchemaError):
        io.covariance_from_dict({"overrides": [{"tag": "re", "m": 1}]})


def test_csv_output(tmp_path):
    io.write_csv(tmp_path / "t.csv", ["m", "v"], [(1, 0.1), (np.int64(2), np.float64(0.25))])
    assert (tmp_path / "t.csv").read_text().splitlines() == ["m,v", "1,0.1", "2,0.25"]
