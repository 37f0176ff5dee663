import csv
import io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hadwiger.cli import ValidationError, run, schema_for, validate_config
from hadwiger.fileio import (
    ConfigFileError,
    canonical_json,
    config_hash,
    dumps_configuration,
    loads_configuration,
    read_configuration,
    write_configuration,
)
from hadwiger.functionals import Configuration
from hadwiger.hexlattice import make_torus
from hadwiger.model import CONVENTION


@given(st.integers(3, 7), st.integers(3, 7), st.data())
def test_configuration_round_trip(w, h, data):
    bits = data.draw(st.lists(st.integers(0, 1), min_size=w * h, max_size=w * h))
    c = Configuration(make_torus(w, h), bits)
    back = loads_configuration(dumps_configuration(c))
    assert back.region == c.region and (back.values == c.values).all()


def test_configuration_file(tmp_path):
    c = Configuration(make_torus(3, 3), [1, 0, 0, 0, 1, 0, 0, 0, 1])
    write_configuration(tmp_path / "a.hexcfg", c)
    text = (tmp_path / "a.hexcfg").read_text()
    assert text.splitlines() == ["hexconfig v1 width=3 height=3 wrap=xy", "100", "010", "001"]
    assert (read_configuration(tmp_path / "a.hexcfg").values == c.values).all()


@pytest.mark.parametrize(
    "text",
    [
        "",
        "hexconfig v2 width=3 height=3 wrap=xy\n000\n000\n000\n",
        "hexconfig v1 width=3 height=3 wrap=xy\n000\n000\n",
        "hexconfig v1 width=3 height=3 wrap=xy\n000\n020\n000\n",
        "hexconfig v1 width=3 height=3 wrap=xy\n0000\n000\n000\n",
        "hexconfig v1 width=3 height=3 wrap=none\n000\n000\n000\n",
        "hexconfig v1 width=2 height=3 wrap=xy\n00\n00\n00\n",
    ],
)
def test_corrupt_configuration_files(text):
    with pytest.raises(ConfigFileError):
        loads_configuration(text)


def test_hash_stability():
    a = {"version": 1, "T": 1.0, "model": {"preset": "ising_ferro"}}
    b = {"model": {"preset": "ising_ferro"}, "T": 1.0, "version": 1}
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({**a, "T": 2.0})
    assert canonical_json(a) == canonical_json(b)
    assert len(config_hash(a)) == 64


def test_schema_rejects_unknown_fields():
    cfg = {"version": 1, "lattice": {"width": 3, "height": 3}, "model": {"preset": "ising_ferro"}, "T": 1.0}
    validate_config("enumerate", cfg)
    for bad in (
        {**cfg, "colour": "red"},
        {**cfg, "version": 2},
        {**cfg, "T": -1},
        {**cfg, "model": {"preset": "ising_ferro", "x": 1}},
        {**cfg, "lattice": {"width": 3}},
    ):
        with pytest.raises(ValidationError):
            validate_config("enumerate", bad)
    assert schema_for("sample")["additionalProperties"] is False


def _write(path, cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


def _csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config_hash=") and CONVENTION in lines[0]
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


ENUM = {"version": 1, "lattice": {"width": 3, "height": 3}, "model": {"preset": "ising_ferro"}, "T": 1.0}


def test_enumerate_command(tmp_path):
    cfg = _write(tmp_path / "run.json", ENUM)
    assert run(["enumerate", "--config", cfg, "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config_hash"] == config_hash({**ENUM, "command": "enumerate"})
    assert summary["convention"] == CONVENTION
    assert summary["expectations"]["filled_density"] == pytest.approx(0.5)
    rows = _csv(tmp_path / "marginals.csv")
    assert len(rows) == 9 and set(rows[0]) == {"face", "i", "j", "p_filled"}


def test_enumerate_domain_and_fractions(tmp_path):
    cfg = {
        "version": 1,
        "lattice": {"width": 9, "height": 9},
        "domain": {"center": [4, 4], "radius": 1, "boundary": "full"},
        "model": {"vertex_energies": {"e_C": "1/3", "e_H": "-1/2", "e_F": 0}},
        "T": 0.7,
    }
    assert run(["enumerate", "--config", _write(tmp_path / "r.json", cfg), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["model"]["vertex_energies"]["e_C"] == "1/3"
    assert len(_csv(tmp_path / "marginals.csv")) == 7


def test_exit_codes(tmp_path):
    out = str(tmp_path)
    big = {**ENUM, "lattice": {"width": 6, "height": 6}}
    assert run(["enumerate", "--config", _write(tmp_path / "a.json", big), "--out", out]) == 3
    bad_lattice = {**ENUM, "lattice": {"width": 2, "height": 3}}
    assert run(["enumerate", "--config", _write(tmp_path / "b.json", bad_lattice), "--out", out]) == 2
    assert run(["enumerate", "--config", _write(tmp_path / "c.json", ENUM), "--out", out + "/missing"]) == 2
    unknown = {**ENUM, "model": {"preset": "nope"}}
    assert run(["enumerate", "--config", _write(tmp_path / "d.json", unknown), "--out", out]) == 2
    assert run(["phase-scan", "--config", _write(tmp_path / "e.json", {"version": 1, "resolution": 4}), "--out", out]) == 2
    assert run(["enumerate", "--config", str(tmp_path / "nofile.json"), "--out", out]) == 2
    (tmp_path / "bad.hexcfg").write_text("garbage")
    assert run(["render", "--input", str(tmp_path / "bad.hexcfg"), "--out", out]) == 2
    assert run(["enumerate", "--out", out]) == 2
    assert run(["enumerate", "--config", _write(tmp_path / "f.json", ENUM), "--threads", "0", "--out", out]) == 2


def test_sample_command(tmp_path):
    cfg = {
        "version": 1,
        "lattice": {"width": 6, "height": 6},
        "model": {"vertex_energies": {"e_C": 1, "e_H": 1, "e_F": -1}},
        "T": 0.3,
        "chain": {"sweeps": 300, "burn_in": 50, "initial": "full"},
    }
    assert run(["sample", "--config", _write(tmp_path / "s.json", cfg), "--seed", "5", "--out", str(tmp_path)]) == 0
    rows = _csv(tmp_path / "series.csv")
    assert len(rows) == 250
    meta = json.loads((tmp_path / "series.json").read_text())
    assert meta["settings"]["seed"] == 5 and meta["verdict"]["dominant"] == "F"
    assert meta["config_hash"] == config_hash({**cfg, "command": "sample", "seed": 5})
    final = read_configuration(tmp_path / "final.hexcfg")
    assert final.region == make_torus(6, 6)


def test_phase_scan_commands(tmp_path):
    cfg = {"version": 1, "resolution": 10}
    assert run(["phase-scan", "--config", _write(tmp_path / "z.json", cfg), "--out", str(tmp_path)]) == 0
    rows = _csv(tmp_path / "diagram.csv")
    assert {r["label"] for r in rows} >= {"E", "C", "H", "F", "E-C"}
    svg = (tmp_path / "diagram.svg").read_text()
    assert svg.startswith("<?xml") or svg.startswith("<svg")
    assert "config_hash=" in svg and "#7a7a7a" in svg
    meta = json.loads((tmp_path / "diagram.json").read_text())
    assert sum(meta["histogram"].values()) == len(rows)
    cfg = {"version": 1, "resolution": 10, "beta": 4.0}
    assert run(["phase-scan", "--config", _write(tmp_path / "l.json", cfg), "--out", str(tmp_path)]) == 0
    rows = _csv(tmp_path / "diagram.csv")
    assert {"dominant", "offset", "annotation"} <= set(rows[0])


def test_uniqueness_command(tmp_path, capsys):
    cfg = {"version": 1, "model": {"preset": "ec_line"}, "betas": [0, 2, 4], "convergence_betas": [1, 4]}
    assert run(["uniqueness", "--config", _write(tmp_path / "u.json", cfg), "--out", str(tmp_path)]) == 0
    certs = _csv(tmp_path / "certificates.csv")
    assert all(r["unique"] == "true" for r in certs)
    for name in ("no_domination.csv", "decay.csv", "convergence.csv"):
        assert _csv(tmp_path / name)
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["on_uniqueness_line"] and rep["boundary_independence"]["decreasing"]
    off = {"version": 1, "model": {"vertex_energies": {"e_C": 1, "e_H": 1, "e_F": 1}}}
    (tmp_path / "o").mkdir()
    assert run(["uniqueness", "--config", _write(tmp_path / "o.json", off), "--out", str(tmp_path / "o")]) == 0
    assert "warning" in capsys.readouterr().err
    assert not (tmp_path / "o" / "decay.csv").exists()


def test_render_commands(tmp_path):
    for ident in ("C0", "H1", "F"):
        cfg = {"version": 1, "lattice": {"width": 6, "height": 6}, "ground": ident, "overlay": True}
        assert run(["render", "--config", _write(tmp_path / "r.json", cfg), "--out", str(tmp_path)]) == 0
        svg = (tmp_path / "render.svg").read_text()
        assert svg.count("<polygon") == 36 and "config_hash=" in svg
    c = Configuration(make_torus(3, 3), [1, 0, 0, 0, 0, 0, 0, 0, 0])
    write_configuration(tmp_path / "x.hexcfg", c)
    assert run(["render", "--input", str(tmp_path / "x.hexcfg"), "--overlay", "--out", str(tmp_path)]) == 0
    bad = {"version": 1, "lattice": {"width": 6, "height": 6}, "ground": "C7"}
    assert run(["render", "--config", _write(tmp_path / "b.json", bad), "--out", str(tmp_path)]) == 2


def test_byte_identical_reruns(tmp_path):
    cfgs = {
        "enumerate": ENUM,
        "sample": {**ENUM, "lattice": {"width": 6, "height": 6}, "chain": {"sweeps": 200, "burn_in": 20}},
        "phase-scan": {"version": 1, "resolution": 8, "beta": 3.0},
        "uniqueness": {"version": 1, "model": {"preset": "ec_line"}, "betas": [1, 2]},
        "render": {"version": 1, "lattice": {"width": 3, "height": 3}, "ground": "C1"},
    }
    for cmd, cfg in cfgs.items():
        snaps = []
        for k in range(2):
            d = tmp_path / f"{cmd}{k}"
            d.mkdir()
            assert run([cmd, "--config", _write(tmp_path / f"{cmd}.json", cfg), "--seed", "3", "--out", str(d)]) == 0
            snaps.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        assert snaps[0] == snaps[1], cmd


def test_console_script(tmp_path):
    cfg = _write(tmp_path / "run.json", ENUM)
    proc = subprocess.run(
        [sys.executable, "-m", "hadwiger.cli", "enumerate", "--config", cfg, "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert math.isfinite(json.loads((tmp_path / "summary.json").read_text())["log_Z"])
