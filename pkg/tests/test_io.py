import locale

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ftcal import io
from ftcal.core import CalibrationModel, Dataset
from ftcal.errors import ConfigError, FileFormatError

floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_dataset_round_trip(tmp_path, sinusoid_data):
    p = tmp_path / "d.csv"
    io.write_dataset(sinusoid_data, p)
    d = io.read_dataset(p)
    assert d.name == "sine" and d.kind == "custom"
    np.testing.assert_array_equal(d.raw, sinusoid_data.raw)
    np.testing.assert_array_equal(d.wrench, sinusoid_data.wrench)
    np.testing.assert_array_equal(d.t, sinusoid_data.t)
    p2 = tmp_path / "d2.csv"
    io.write_dataset(d, p2)
    assert p.read_bytes() == p2.read_bytes()


def test_dataset_header_checked(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,r0,r1,r2,r3,r4,r5,w0,w1,w2,w3,w4,w5,temp\n0,1,2,3,4,5,6,7,8,9,10,11,12,13\n")
    with pytest.raises(FileFormatError, match="temp"):
        io.read_dataset(p)
    p.write_text("# name=x\n" + io.DATASET_HEADER + "\n0,1,2,3,4,5,6,7,8,9,10,11,nan\n")
    with pytest.raises(FileFormatError):
        io.read_dataset(p)
    p.write_text(io.DATASET_HEADER + "\n1,1,2,3,4,5,6,7,8,9,10,11,12\n0,1,2,3,4,5,6,7,8,9,10,11,12\n")
    with pytest.raises(FileFormatError, match="increasing"):
        io.read_dataset(p)


def test_dataset_comments_and_defaults(tmp_path):
    p = tmp_path / "plain.csv"
    p.write_text("# recorded on the bench\n" + io.DATASET_HEADER + "\n0,1,2,3,4,5,6,7,8,9,10,11,12\n")
    d = io.read_dataset(p)
    assert d.name == "plain" and d.kind == "custom" and len(d) == 1


@given(arrays(float, (6, 6), elements=st.floats(-10, 10)), arrays(float, 6, elements=floats))
def test_calibration_bit_exact(tmp_path_factory, M, o):
    model = CalibrationModel(M + 25 * np.eye(6), o, "x")
    path = tmp_path_factory.mktemp("cal") / "m.cal"
    io.write_calibration(io.CalibrationFile(model, 1.5, ["a"]), path)
    back = io.read_calibration(path)
    np.testing.assert_array_equal(back.model.matrix, model.matrix)
    np.testing.assert_array_equal(back.model.offset, model.offset)
    assert back.lam == 1.5 and back.trained_on == ["a"]


def test_calibration_bytes_round_trip(tmp_path, truth):
    cf = io.CalibrationFile(truth, np.array([0.5, 1, 1, 2, 2, 10]), ["a", "b"],
                            {"a": np.arange(6.0), "b": -np.arange(6.0) / 3})
    p1, p2 = tmp_path / "1.cal", tmp_path / "2.cal"
    io.write_calibration(cf, p1)
    io.write_calibration(io.read_calibration(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()
    back = io.read_calibration(p1)
    np.testing.assert_array_equal(back.dataset_offsets["b"], -np.arange(6.0) / 3)
    np.testing.assert_array_equal(back.lam, [0.5, 1, 1, 2, 2, 10])


def test_calibration_rejects_singular(tmp_path):
    p = tmp_path / "s.cal"
    rows = ["1 0 0 0 0 0"] * 6 + ["0 0 0 0 0 0"]
    p.write_text("\n".join(rows) + "\n")
    with pytest.raises(FileFormatError, match="singular"):
        io.read_calibration(p)
    p.write_text("\n".join(rows[:5]) + "\n")
    with pytest.raises(FileFormatError):
        io.read_calibration(p)


def test_seventeen_digits(tmp_path):
    model = CalibrationModel(np.eye(6) * 0.1, np.full(6, 1 / 3), "x")
    text = io.format_calibration(io.CalibrationFile(model))
    assert "0.10000000000000001" in text and "0.33333333333333331" in text


def test_locale_independent(tmp_path, sinusoid_data):
    p1 = tmp_path / "a.csv"
    io.write_dataset(sinusoid_data, p1)
    old = locale.setlocale(locale.LC_ALL)
    for name in ("de_DE.UTF-8", "fr_FR.UTF-8"):
        try:
            locale.setlocale(locale.LC_ALL, name)
            break
        except locale.Error:
            continue
    else:
        pytest.skip("no comma-decimal locale installed")
    try:
        p2 = tmp_path / "b.csv"
        io.write_dataset(io.read_dataset(p1), p2)
    finally:
        locale.setlocale(locale.LC_ALL, old)
    assert p1.read_bytes() == p2.read_bytes()


CONFIG = """
# comment
name = demo
trajectory = static-grid
grid_quaternions = 1 0 0 0; 0 1 0 0 ; 0.7071067811865476 0 0.7071067811865476 0
mass = 1.5   # kg
com = 0.01 0.02 0.03
inertia = 0.01 0.02 0.015
noise_std = 0.1
seed = 4
"""


def test_config_parses():
    cfg = io.build_config(io.parse_config_text(CONFIG))
    assert cfg.name == "demo" and cfg.body.mass == 1.5
    assert len(cfg.spec.orientations) == 3
    np.testing.assert_array_equal(cfg.truth.true_model.matrix, np.eye(6))
    np.testing.assert_array_equal(cfg.truth.noise_std_raw, np.full(6, 0.1))
    assert cfg.truth.seed == 4


def test_config_unknown_key():
    with pytest.raises(ConfigError, match="masss") as exc:
        io.parse_config_text(CONFIG + "masss = 2\n")
    assert exc.value.key == "masss"


def test_config_bad_mass():
    text = CONFIG.replace("mass = 1.5", "mass = -1")
    with pytest.raises(ConfigError, match="mass") as exc:
        io.build_config(io.parse_config_text(text))
    assert exc.value.key == "mass"


def test_config_duplicate_and_missing():
    with pytest.raises(ConfigError, match="duplicate"):
        io.parse_config_text("mass = 1\nmass = 2\n")
    with pytest.raises(ConfigError, match="inertia"):
        io.build_config(io.parse_config_text("mass = 1\ngrid_random = 3\n"))


def test_config_matrix_file(tmp_path, truth):
    io.write_calibration(io.CalibrationFile(truth), tmp_path / "truth.cal")
    cfg_path = tmp_path / "c.cfg"
    cfg_path.write_text("mass = 1\ninertia = 0.01 0.01 0.01\ngrid_random = 12\ntrue_matrix_file = truth.cal\n")
    cfg = io.read_config(cfg_path)
    np.testing.assert_array_equal(cfg.truth.true_model.matrix, truth.matrix)
    np.testing.assert_array_equal(cfg.truth.true_model.offset, truth.offset)
    assert len(cfg.spec.orientations) == 12


def test_config_sinusoid_and_lambda_grid():
    text = ("trajectory = sinusoid\nduration = 2\nsample_rate = 5\namplitude = 0.5\n"
            "frequency = 0.2 0.3 0.4\nmass = 1\ninertia = 0.01 0.01 0.01\nlambda_grid = 0.5, 1, 2\n")
    cfg = io.build_config(io.parse_config_text(text))
    np.testing.assert_array_equal(cfg.spec.amplitude, [0.5, 0.5, 0.5])
    assert cfg.lambda_grid == (0.5, 1.0, 2.0)


def test_text_table_alignment():
    text = io.format_text_table(["dataset", "a", "bb"], [["x", 1.0, None], ["longer", 100.0, 2.5]], ".2f")
    lines = text.splitlines()
    assert lines[0].split() == ["dataset", "a", "bb"]
    assert lines[2].split() == ["x", "1.00", "NA"]
    assert len({len(line) for line in lines[1:]}) == 1
