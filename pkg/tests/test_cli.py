import csv
import json
import subprocess
import sys

import pytest

from geocentroid.cli import main
from helpers import pub_line, write_lines

HEADER = "org_id,name,latitude,longitude\n"


@pytest.fixture
def inputs(tmp_path):
    reg = tmp_path / "g.csv"
    reg.write_text(HEADER + "g1,A,10,20\ng2,B,20,40\ncam,Cambridge,52.2053,0.1218\n")
    pubs = write_lines(tmp_path / "p.jsonl", [
        pub_line("a", 2000, [["g1"], ["g2"]], times_cited=2, month=1),
        pub_line("b", 2000, [["g1"]], times_cited=0, month=2),
        pub_line("c", 2001, [["g2"]], times_cited=5, month=1),
        pub_line("d", 2002, [["zzz"]], times_cited=5),
    ])
    return tmp_path, str(pubs), str(reg)


def test_compute_geojson_happy_path(inputs):
    d, pubs, reg = inputs
    out = d / "t.geojson"
    rc = main(["compute", "--pubs", pubs, "--registry", reg, "--weight", "citations",
               "--granularity", "year", "--format", "geojson", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    pts = [f for f in doc["features"] if f["geometry"]["type"] == "Point"]
    assert [f["properties"]["period"] for f in pts] == ["2000", "2001"]
    assert pts[0]["geometry"]["coordinates"] == [30.0, 15.0]
    assert doc["properties"]["scheme"] == "citations"
    assert doc["properties"]["mode"] == "planar"


def test_compute_csv_writes_stats_sibling(inputs, capsys):
    d, pubs, reg = inputs
    out = d / "t.csv"
    assert main(["compute", "--pubs", pubs, "--registry", reg, "--out", str(out), "--deterministic"]) == 0
    rows = list(csv.DictReader(open(out)))
    assert [r["period"] for r in rows] == ["2000", "2001"]
    stats = (d / "t.stats.csv").read_text().splitlines()
    assert stats == ["period,total,contributing,skipped", "2000,2,2,0", "2001,1,1,0", "2002,1,0,1"]
    err = capsys.readouterr().err
    assert "read 4 records" in err and "trajectory points" in err


def test_compute_stdout_svg(inputs, capsysbinary):
    _, pubs, reg = inputs
    assert main(["compute", "--pubs", pubs, "--registry", reg, "--format", "svg"]) == 0
    out = capsysbinary.readouterr().out
    assert out.startswith(b"<?xml") and out.count(b'<circle class="marker') == 2


def test_compute_plot(inputs):
    d, pubs, reg = inputs
    png = d / "t.png"
    assert main(["compute", "--pubs", pubs, "--registry", reg, "--out", str(d / "x.csv"), "--plot", str(png)]) == 0
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


@pytest.mark.parametrize("args", [
    ["compute", "--weight", "citations-window:0"],
    ["compute", "--bogus"],
    ["compute", "--mode", "conic"],
    ["compute", "--from", "2020", "--to", "2010"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(inputs, args):
    _, pubs, reg = inputs
    if args and args[0] == "compute":
        args = args + ["--pubs", pubs, "--registry", reg]
    assert main(args) == 2


def test_missing_registry_flag_is_usage_error(inputs, monkeypatch):
    _, pubs, _ = inputs
    monkeypatch.delenv("GEOCENTROID_REGISTRY", raising=False)
    assert main(["compute", "--pubs", pubs]) == 2


def test_missing_input_file_is_fatal(inputs, capsys):
    d, _, reg = inputs
    missing = str(d / "missing.jsonl")
    assert main(["compute", "--pubs", missing, "--registry", reg]) == 1
    assert missing in capsys.readouterr().err
    assert main(["compute", "--pubs", str(d / "p.jsonl"), "--registry", str(d / "nope.csv")]) == 1


def test_strict_makes_bad_record_fatal(inputs, capsys):
    d, _, reg = inputs
    pubs = write_lines(d / "bad.jsonl", [pub_line("a", 2000, [["g1"]]), '{"id":"x","year":2000,"month":13}'])
    assert main(["compute", "--pubs", str(pubs), "--registry", reg, "--out", str(d / "o.csv")]) == 0
    assert "line 2: month out of range" in capsys.readouterr().err
    assert main(["compute", "--pubs", str(pubs), "--registry", reg, "--strict", "--out", str(d / "o.csv")]) == 1


def test_strict_registry(inputs):
    d, pubs, _ = inputs
    reg = d / "bad.csv"
    reg.write_text(HEADER + "g1,A,10,20\ng2,B,99,40\n")
    assert main(["stats", "--pubs", pubs, "--registry", str(reg), "--out", str(d / "s.csv")]) == 0
    assert main(["stats", "--pubs", pubs, "--registry", str(reg), "--strict", "--out", str(d / "s.csv")]) == 1


def test_stats_month(inputs):
    d, pubs, reg = inputs
    out = d / "s.csv"
    assert main(["stats", "--pubs", pubs, "--registry", reg, "--granularity", "month", "--out", str(out)]) == 0
    assert out.read_text().splitlines() == [
        "period,total,contributing,skipped", "2000-01,1,1,0", "2000-02,1,1,0", "2001-01,1,1,0"]


def test_validate(inputs, capsys):
    d, _, reg = inputs
    pubs = write_lines(d / "v.jsonl", [pub_line("a", 2000, []), "nope", '{"id":"b","year":2000,"times_cited":-1}'])
    assert main(["validate", "--pubs", str(pubs), "--registry", reg]) == 0
    out = capsys.readouterr().out
    assert "3 records, 1 valid, 2 invalid" in out
    assert "line 3: negative citation count" in out
    assert "registry: 3 rows, 3 accepted, 0 rejected" in out
    assert main(["validate", "--pubs", str(pubs), "--strict"]) == 1


def test_env_and_config_precedence(inputs, monkeypatch):
    d, pubs, reg = inputs
    cfg = d / "run.conf"
    cfg.write_text(f"# reproducible run\npubs = {pubs}\nregistry = {reg}\nweight = citations\n"
                   f"granularity = month\nformat = geojson\nout = {d / 'from-config.geojson'}\n")
    assert main(["--config", str(cfg), "compute"]) == 0
    doc = json.loads((d / "from-config.geojson").read_text())
    assert doc["properties"]["granularity"] == "month"

    monkeypatch.setenv("GEOCENTROID_OUT", str(d / "from-env.geojson"))
    assert main(["--config", str(cfg), "compute"]) == 0
    assert (d / "from-env.geojson").exists()

    assert main(["--config", str(cfg), "compute", "--out", str(d / "from-flag.geojson"), "--granularity", "year"]) == 0
    doc = json.loads((d / "from-flag.geojson").read_text())
    assert doc["properties"]["granularity"] == "year"


def test_unknown_config_key_is_usage_error(inputs):
    d, _, _ = inputs
    cfg = d / "bad.conf"
    cfg.write_text("colour = red\n")
    assert main(["--config", str(cfg), "compute"]) == 2


def test_synth_then_stats(tmp_path):
    out = tmp_path / "ds"
    assert main(["synth", "--plan", "2020-01:30,2020-02:0,2020-03:12", "--seed", "3", "--out-dir", str(out)]) == 0
    stats = tmp_path / "s.csv"
    assert main(["stats", "--pubs", str(out / "pubs.jsonl"), "--registry", str(out / "registry.csv"),
                 "--granularity", "month", "--out", str(stats)]) == 0
    rows = list(csv.DictReader(open(stats)))
    assert [(r["period"], r["total"]) for r in rows] == [("2020-01", "30"), ("2020-03", "12")]


def test_synth_requires_plan(tmp_path):
    assert main(["synth", "--out-dir", str(tmp_path)]) == 2


def test_module_entry_point(inputs):
    _, pubs, reg = inputs
    proc = subprocess.run(
        [sys.executable, "-m", "geocentroid", "compute", "--pubs", pubs, "--registry", reg],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "period,latitude,longitude,n_pubs,total_weight,robust"
    bad = subprocess.run([sys.executable, "-m", "geocentroid", "compute", "--nope"], capture_output=True)
    assert bad.returncode == 2
