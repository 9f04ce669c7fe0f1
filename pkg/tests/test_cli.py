import csv
import io
import json
import subprocess
import sys

import pytest

from orbifold.cli import main, parse_config, to_csv, validate
from orbifold.errors import ConfigInvalid


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_repeated_keys_and_vectors():
    cfg = parse_config("command = count  # comment\nm = 2,2,3\nc=1,1,-1\nB = 10\nB = 20\n")
    assert cfg == {"command": "count", "m": (2, 2, 3), "c": (1, 1, -1), "B": [10, 20]}
    assert parse_config("command=count; m=2,2; c=1,1; B=5")["m"] == (2, 2)


def test_validation_names_field():
    with pytest.raises(ConfigInvalid, match="^m:"):
        validate(parse_config("command = count\nm = 1,2\nc = 1,1\nB = 10"))
    with pytest.raises(ConfigInvalid, match="^c:"):
        validate(parse_config("command = count\nm = 2,2\nc = 1\nB = 10"))
    with pytest.raises(ConfigInvalid, match="unknown key"):
        parse_config("colour = blue")


def test_exit_codes(tmp_path, monkeypatch, capsys):
    assert main(["--config", write(tmp_path, "command = count\nm = 1,2\nc = 1,1\nB = 10\n")]) == 2
    assert "m:" in capsys.readouterr().err
    monkeypatch.setenv("ORBIFOLD_MAX_OPS", "1000")
    assert main(["--config", write(tmp_path, "command = count\nm = 2,2,2\nc = 1,1,-1\nB = 100000000\n")]) == 3
    assert main(["--config", str(tmp_path / "missing.cfg")]) == 2


def test_compare_waring_ratio_trend(tmp_path):
    cfg = write(tmp_path, "command = compare\nproblem = waring\nm = 2,2,2,2,2\nB_range = 1000:100000:10\nwindow = 20\n")
    assert main(["--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 0
    rows = read_csv(tmp_path / "o" / "compare.csv")
    ratios = [float(r["ratio"]) for r in rows]
    assert [int(r["B"]) for r in rows] == [1000, 10000, 100000]
    assert [abs(1 - x) for x in ratios] == sorted((abs(1 - x) for x in ratios), reverse=True)
    assert all(r["schema"] == "orbifold-output/1" for r in rows)
    data = json.loads((tmp_path / "o" / "compare.json").read_text())
    assert len(data["rows"]) == 3 and "elapsed" in data["rows"][0]


def test_fit_campana(tmp_path):
    cfg = write(tmp_path, "command = fit\nproblem = campana\nm = 2,2,2,2\nc = 1,1,1\nB = 1000\nB = 4000\nB = 16000\n")
    assert main(["--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 0
    rows = read_csv(tmp_path / "o" / "fit.csv")
    fit = [r for r in rows if r["kind"] == "fit"][0]
    assert 1.0 <= float(fit["slope"]) <= 1.2


def test_replay_is_byte_identical_and_round_trips(tmp_path):
    text = "command = compare\nm = 2,2,2\nc = 1,1,-1\nN = 0\nB = 200\nB = 800\nQ = 30\n"
    cfg = write(tmp_path, text)
    main(["--config", cfg, "--out", str(tmp_path / "a"), "--quiet"])
    main(["--config", cfg, "--out", str(tmp_path / "b"), "--quiet"])
    a = (tmp_path / "a" / "compare.csv").read_bytes()
    assert a == (tmp_path / "b" / "compare.csv").read_bytes()
    base = validate(parse_config(text))
    for row in read_csv(tmp_path / "a" / "compare.csv"):
        for key in ("m", "c", "N", "B"):
            parsed = parse_config(f"{key} = {row[key]}")[key]
            want = base[key]
            assert parsed == ([int(row["B"])] if key == "B" else want)
        assert int(row["B"]) in base["B"]


def test_other_commands(tmp_path):
    for text, name in (
        ("command = omega-table\nm = 2,2\n", "omega-table"),
        ("command = arcs\nm = 2,2,2,2,2\nc = 1,1,1,1,1\nB = 1000\nB = 10000\n", "arcs"),
        ("command = meanvalue\nX = 25\nX = 50\nk = 2\ns = 6\n", "meanvalue"),
        ("command = predict\nproblem = campana\nm = 2,2,2\nc = 1,1\nV = 10\np_max = 5\nB = 1000\n", "predict"),
        ("command = count\nproblem = campana\nm = 2,2,2\nc = 1,1,-1\nB = 100\n", "count"),
    ):
        assert main(["--config", write(tmp_path, text, name + ".cfg"), "--out", str(tmp_path / name),
                     "--quiet"]) == 0
        rows = read_csv(tmp_path / name / f"{name}.csv")
        assert rows
    omega_rows = read_csv(tmp_path / "omega-table" / "omega-table.csv")
    assert len(omega_rows) == 16
    assert sum(1 for r in omega_rows if r["omega"] != "0") == 9


def test_csv_formatting():
    text = to_csv([{"schema": "s", "x": 1.0 / 3, "name": 'a "b", c', "elapsed": 9.0}])
    assert text.splitlines()[0] == "schema,x,name"
    assert '0.333333333333,"a ""b"", c"' in text


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, "command = meanvalue\nX = 3\nk = 2\ns = 2\n")
    out = subprocess.run([sys.executable, "-m", "orbifold", "--config", cfg], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout.splitlines()[0])["count"] == 3
