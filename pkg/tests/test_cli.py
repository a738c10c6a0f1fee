import csv
import json
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from retinex_pso.cli import COMPARE_COLUMNS, EVAL_COLUMNS, main, parse_params, ConfigError
from retinex_pso.image_io import load_image
from retinex_pso.objective import FitnessReport
from retinex_pso.pso import TuneResult
from retinex_pso.wavelet import WEComparison

FAST = ["--particles", "3", "--iterations", "2", "--no-resize"]


def png(path, arr):
    Image.fromarray(np.asarray(arr, dtype=np.uint8)).save(path)
    return str(path)


@pytest.fixture
def dark(tmp_path, rng):
    return png(tmp_path / "dark.png", rng.integers(0, 60, size=(12, 12, 3)))


def files(d):
    return sorted(p.name for p in d.iterdir()) if d.exists() else []


def test_enhance_msrmcr_single_pixel(tmp_path):
    src = png(tmp_path / "px.png", [[[10, 20, 30]]])
    out = tmp_path / "out"
    assert main(["enhance", src, "--method", "msrmcr", "--out", str(out), "--no-resize"]) == 0
    assert files(out) == ["px_msrmcr.json", "px_msrmcr.png"]
    side = json.loads((out / "px_msrmcr.json").read_text())
    assert side["params"] == {"variant": "msrmcr", "sigma1": 15.0, "sigma2": 120.0, "sigma3": 250.0,
                              "c_strength": 100.0, "gain": 2.25, "offset": -30.0}
    FitnessReport.from_dict(side["fitness"])


def test_enhance_he_constant(tmp_path):
    src = png(tmp_path / "flat.png", np.full((4, 4, 3), 37))
    out = tmp_path / "out"
    assert main(["enhance", src, "--method", "he", "--out", str(out)]) == 0
    img = load_image(out / "flat_he.png")
    assert (img.width, img.height) == (256, 256)
    assert np.all(img.to_array() == 255)


def test_enhance_param_overrides(tmp_path, dark):
    out = tmp_path / "out"
    assert main(["enhance", dark, "--out", str(out), "--no-resize", "--params", "C=110,G=4,b=-1"]) == 0
    p = json.loads((out / "dark_msrmcr.json").read_text())["params"]
    assert (p["c_strength"], p["gain"], p["offset"]) == (110.0, 4.0, -1.0)


@pytest.mark.parametrize("argv", [
    ["--method", "gamma"],
    ["--params", "sigma1=500"],
    ["--params", "bogus=1"],
    ["--params", "C"],
    ["--method", "he", "--params", "G=1"],
])
def test_enhance_invalid_writes_nothing(tmp_path, dark, argv):
    out = tmp_path / "out"
    assert main(["enhance", dark, "--out", str(out), *argv]) == 1
    assert files(out) == []


def test_missing_input_is_io_error(tmp_path):
    out = tmp_path / "out"
    assert main(["enhance", str(tmp_path / "none.png"), "--out", str(out)]) == 2
    assert files(out) == []


def test_tune_outputs_and_determinism(tmp_path, dark):
    runs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["tune", dark, "--out", str(out), "--seed", "5", *FAST]) == 0
        assert files(out) == ["dark_msrmcr.png", "dark_msrmcr_tune.json", "tuned_msrmcr.csv"]
        runs.append((out / "dark_msrmcr_tune.json").read_bytes())
    assert runs[0] == runs[1]
    result = TuneResult.from_json(runs[0].decode())
    assert result.seed == 5 and len(result.history) == 2
    rows = list(csv.reader(open(tmp_path / "a" / "tuned_msrmcr.csv")))
    assert rows[0] == ["Image", "Resolution", "sigma1", "sigma2", "sigma3", "C", "G", "b"]
    assert rows[1][:2] == ["dark", "12x12"]


def test_tune_msrcr_columns(tmp_path, dark):
    out = tmp_path / "o"
    assert main(["tune", dark, "--method", "msrcr", "--out", str(out), *FAST]) == 0
    header = next(csv.reader(open(out / "tuned_msrcr.csv")))
    assert header == ["Image", "Resolution", "sigma1", "sigma2", "sigma3", "G", "alpha", "beta", "b"]


def test_tune_pinned_parameter(tmp_path, dark):
    out = tmp_path / "o"
    assert main(["tune", dark, "--out", str(out), "--params", "C=110", *FAST]) == 0
    result = TuneResult.from_json((out / "dark_msrmcr_tune.json").read_text())
    assert result.best_params.c_strength == 110.0
    assert main(["tune", dark, "--out", str(out), "--params", "C=90", *FAST]) == 1


@pytest.mark.parametrize("argv", [["--particles", "0"], ["--iterations", "0"], ["--method", "he"]])
def test_tune_config_errors(tmp_path, dark, argv):
    out = tmp_path / "o"
    assert main(["tune", dark, "--out", str(out), *argv]) == 1
    assert files(out) == []


def test_eval_identity_json(tmp_path, dark, capsys):
    assert main(["eval", dark, dark]) == 0
    report = json.loads(capsys.readouterr().out)
    we = WEComparison.from_dict(report[0]["wavelet_energy"])
    assert we.awe_ratio == 1.0 and we.dwe_ratio == 1.0


def test_eval_black_enhanced(tmp_path, dark, capsys):
    black = png(tmp_path / "black.png", np.zeros((12, 12, 3)))
    assert main(["eval", dark, black, "--report", "json"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["fitness"]["fitness"] == 0.0


def test_eval_csv_rows(tmp_path, dark):
    other = png(tmp_path / "o.png", np.full((12, 12, 3), 90))
    out = tmp_path / "rep"
    assert main(["eval", dark, other, other, dark, "--report", "csv", "--out", str(out)]) == 0
    rows = list(csv.reader(open(out / "eval.csv")))
    assert rows[0] == EVAL_COLUMNS and len(rows) == 3


def test_eval_size_mismatch(tmp_path, dark):
    small = png(tmp_path / "s.png", np.zeros((4, 4, 3)))
    assert main(["eval", dark, small, "--no-resize"]) == 1
    assert main(["eval", dark, small]) == 0
    assert main(["eval", dark]) == 1


def test_compare_rows(tmp_path, dark):
    out = tmp_path / "cmp"
    assert main(["compare", dark, "--out", str(out), *FAST]) == 0
    rows = list(csv.DictReader(open(out / "compare.csv")))
    assert [r["method"] for r in rows] == ["he", "msrcr", "msrmcr"]
    assert list(rows[0]) == COMPARE_COLUMNS
    records = json.loads((out / "compare.json").read_text())
    assert [r["method"] for r in records] == ["he", "msrcr", "msrmcr"]
    for r in records:
        FitnessReport.from_dict(r["fitness"])
        WEComparison.from_dict(r["wavelet_energy"])
    assert {"dark_he.png", "dark_msrcr.png", "dark_msrmcr.png"} <= set(files(out))


def test_config_file_precedence(tmp_path, dark):
    conf = tmp_path / "run.conf"
    conf.write_text("# settings\nmethod = he\nresize = false\nout = %s\n" % (tmp_path / "from_conf"))
    assert main(["enhance", dark, "--config", str(conf)]) == 0
    assert files(tmp_path / "from_conf") == ["dark_he.json", "dark_he.png"]
    assert main(["enhance", dark, "--config", str(conf), "--method", "msrmcr"]) == 0
    assert "dark_msrmcr.png" in files(tmp_path / "from_conf")
    conf.write_text("colour = red\n")
    assert main(["enhance", dark, "--config", str(conf), "--out", str(tmp_path / "x")]) == 1


def test_parse_params_aliases():
    assert parse_params("C=1, G=2,b=-3,sigma1=4") == {"c_strength": 1.0, "gain": 2.0, "offset": -3.0,
                                                     "sigma1": 4.0}
    with pytest.raises(ConfigError):
        parse_params("G=abc")


def test_module_entry_point(tmp_path, dark):
    proc = subprocess.run([sys.executable, "-m", "retinex_pso", "enhance", dark, "--method", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "invalid choice" in proc.stderr
