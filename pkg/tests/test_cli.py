import json

import pytest

from cadefects.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 else None), out.err


def test_spectrum_62(capsys):
    code, doc, _ = run(capsys, "spectrum", "--subshift", "D62", "--ca", "eca62")
    assert code == 0
    assert (doc["P"], doc["rotation"], doc["group"]) == (3, 1, "Z/3")
    assert list(doc)[0] == "manifest"
    assert doc["manifest"]["command"] == "spectrum"


def test_spectrum_110(capsys):
    _, doc, _ = run(capsys, "spectrum", "--subshift", "E110", "--ca", "eca110")
    assert (doc["P"], doc["rotation"], doc["group"]) == (14, 4, "Z/14")


def test_spectrum_full_shift(capsys):
    _, doc, _ = run(capsys, "spectrum", "--subshift", "full")
    assert doc["P"] == 1


def test_classify_gamma_and_alpha(capsys):
    _, doc, _ = run(capsys, "classify", "--subshift", "D62", "--ca", "eca62", "--config", "eca62_gamma")
    assert (doc["displacement"], doc["essential"], doc["removable"]) == (1, True, False)
    _, doc, _ = run(capsys, "classify", "--subshift", "D62", "--ca", "eca62", "--config", "eca62_alpha")
    assert (doc["displacement"], doc["removable"]) == (0, True)


def test_classify_interface(capsys):
    _, doc, _ = run(capsys, "classify", "--subshift", "G184", "--config", "eca184_beta")
    assert doc["classification"] == "interface"
    assert [s["word"] for s in doc["signature"]] == ["0", "1"]


def test_classify_from_files(capsys, tmp_path):
    sub = tmp_path / "d.json"
    sub.write_text(json.dumps({"type": "sft", "alphabet": ["0", "1"], "orbits": ["110"]}))
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"type": "ep", "left": "110", "center": "00", "right": "110"}))
    code, doc, _ = run(capsys, "classify", "--subshift", str(sub), "--config", str(cfg))
    assert code == 0 and doc["displacement"] == 2
    assert doc["manifest"]["inputs"]["config"] == str(cfg)


def test_parse_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "spectrum", "--subshift", str(bad))[0] == 2
    assert run(capsys, "spectrum", "--subshift", "no-such-thing")[0] == 2
    assert run(capsys, "spectrum")[0] == 2
    bad.write_text(json.dumps({"type": "sft", "alphabet": ["0"], "orbits": ["2"]}))
    assert run(capsys, "spectrum", "--subshift", str(bad))[0] == 2


def test_unsupported(capsys):
    assert run(capsys, "spectrum", "--subshift", "D62", "--ca", "antiferro")[0] == 3
    assert run(capsys, "spectrum", "--subshift", "D62", "--ca", "eca110")[0] == 3


def test_inadmissible(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"type": "ep", "left": "11", "center": "", "right": "110"}))
    assert run(capsys, "classify", "--subshift", "D62", "--config", str(cfg))[0] == 4


def test_no_condensation(capsys):
    code, _, err = run(capsys, "track", "--ca", "eca54", "--subshift", "B54", "--width", "64",
                       "--steps", "60", "--seed", "1")
    assert code == 5 and "condens" in err


def test_track_seeded_pair(capsys):
    code, doc, _ = run(capsys, "track", "--ca", "eca184", "--subshift", "G184",
                       "--init", "torus_eca184_gamma_pair", "--steps", "100", "--burn-in", "0")
    assert code == 0
    (ev,) = doc["events"]
    assert ev["verdict"] == "PASS" and ev["outgoing"] == []
    assert doc["manifest"]["seed"] is None


def test_track_54_pair_gives_beta(capsys):
    _, doc, _ = run(capsys, "track", "--ca", "eca54", "--subshift", "B54",
                    "--init", "torus_eca54_gamma_pair", "--steps", "100", "--burn-in", "0")
    (ev,) = doc["events"]
    labels = {t["id"]: t["label"] for t in doc["tracks"]}
    assert ev["verdict"] == "PASS"
    assert [labels[i] for i in ev["outgoing"]] == [[0, 2]]


def test_track_width_checked(capsys):
    assert run(capsys, "track", "--ca", "eca62", "--subshift", "D62", "--width", "8")[0] == 2


def test_track_pgm(capsys, tmp_path):
    prefix = tmp_path / "run"
    code, doc, _ = run(capsys, "track", "--ca", "eca62", "--subshift", "D62", "--width", "64",
                       "--steps", "80", "--seed", "5", "--pgm", str(prefix))
    assert code == 0
    for suffix in ("_spacetime.pgm", "_overlay.pgm"):
        lines = (tmp_path / f"run{suffix}").read_text().splitlines()
        assert lines[:3] == ["P2", "64 80", "255"] and len(lines) == 83


def test_verify(capsys):
    _, doc, _ = run(capsys, "verify", "--ca", "eca62", "--subshift", "D62")
    assert doc["invariant"] is True
    _, doc, _ = run(capsys, "verify", "--ca", "eca110", "--subshift", "golden_mean")
    assert doc["invariant"] is False and "witness" in doc


def test_field(capsys, tmp_path):
    pgm = tmp_path / "f.pgm"
    _, doc, _ = run(capsys, "field", "--subshift", "S18", "--config", "eca18_s", "--pgm", str(pgm))
    assert doc["defect_set"] == [8, 9]
    assert pgm.read_text().startswith("P2\n")


@pytest.mark.parametrize("cmd", ["spectrum", "classify", "field", "track", "verify"])
def test_help(cmd, capsys):
    assert main([cmd, "--help"]) == 0
