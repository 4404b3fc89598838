import json
import math
from pathlib import Path

import pytest

from hillbasis.cli import main

SAWTOOTH_M = 256


def _write_sawtooth(tmp_path: Path) -> Path:
    rows = [f"{j / SAWTOOTH_M},{j / SAWTOOTH_M - 0.5},0.0" for j in range(SAWTOOTH_M)]
    (tmp_path / "q.csv").write_text("\n".join(rows) + "\n")
    pot = tmp_path / "pot.json"
    pot.write_text(json.dumps({"kind": "sampled", "samples_file": "q.csv"}))
    return pot


def _write_config(tmp_path: Path, pot: Path, **kw) -> Path:
    doc = {"potential": str(pot), "alpha": 0, "trunc": 32, "window": [1, 6],
           "smooth": 0, "out_dir": str(tmp_path / "out")}
    doc.update(kw)
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(doc))
    return cfg


class TestSpectrumCommand:
    def test_writes_outputs_and_agrees(self, tmp_path):
        pot = _write_sawtooth(tmp_path)
        cfg = _write_config(tmp_path, pot)
        assert main(["spectrum", "--config", str(cfg)]) == 0
        out = tmp_path / "out"
        spectrum = (out / "spectrum.csv").read_text().splitlines()
        assert spectrum[0].startswith("# config_hash=")
        agree = (out / "agreement.csv").read_text().splitlines()[2:]
        worst = max(float(line.split(",")[1]) for line in agree)
        assert worst <= 1e-6

    def test_gnuplot_reorders_class_column(self, tmp_path):
        pot = _write_sawtooth(tmp_path)
        cfg = _write_config(tmp_path, pot)
        assert main(["spectrum", "--config", str(cfg),
                     "--gnuplot-compatible"]) == 0
        lines = (tmp_path / "out" / "spectrum.csv").read_text().splitlines()
        header = [l for l in lines if l.startswith("n,")][0]
        assert header.endswith(",class")

    def test_dump_matrix(self, tmp_path):
        pot = _write_sawtooth(tmp_path)
        cfg = _write_config(tmp_path, pot)
        assert main(["spectrum", "--config", str(cfg), "--dump-matrix"]) == 0
        dump = (tmp_path / "out" / "matrix.csv").read_text().splitlines()
        dim = 2 * 32 + 1
        assert len(dump) == dim + 1  # hash header + rows
        assert len(dump[1].split(",")) == 2 * dim

    def test_malformed_potential_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "pot.json"
        bad.write_text('{"kind": "trig", }')
        cfg = _write_config(tmp_path, bad)
        assert main(["spectrum", "--config", str(cfg)]) == 1
        assert "byte offset" in capsys.readouterr().err

    def test_missing_potential_exit_1(self, tmp_path):
        cfg = _write_config(tmp_path, tmp_path / "nowhere.json")
        assert main(["spectrum", "--config", str(cfg)]) == 1

    def test_window_violating_trust_exit_1(self, tmp_path):
        pot = _write_sawtooth(tmp_path)
        cfg = _write_config(tmp_path, pot, window=[1, 20])
        assert main(["spectrum", "--config", str(cfg)]) == 1


class TestCriteriaCommand:
    def test_sawtooth_verdicts(self, tmp_path):
        pot = _write_sawtooth(tmp_path)
        cfg = _write_config(tmp_path, pot, trunc=64, window=[5, 16],
                            jump={"re": 1.0, "im": 0.0})
        assert main(["criteria", "--config", str(cfg)]) == 0
        doc = json.loads((tmp_path / "out" / "criteria.json").read_text())
        verdicts = {c["theorem"]: c for c in doc["criteria"]}
        for tid in ("T1", "T2", "T3", "C1", "C2", "T4b", "T4c"):
            assert verdicts[tid]["verdict"] == "basis", tid
        assert (tmp_path / "out" / "series.csv").exists()
        assert (tmp_path / "out" / "diagnostics.csv").exists()
        gram = json.loads((tmp_path / "out" / "gram.json").read_text())
        assert gram["bounded"] is True

    def test_single_mode_verdicts(self, tmp_path):
        pot = tmp_path / "pot.json"
        pot.write_text(json.dumps(
            {"kind": "trig", "coeffs": [{"n": 1, "re": 1.0, "im": 0.0}]}))
        cfg = _write_config(tmp_path, pot, trunc=64, window=[1, 2])
        assert main(["criteria", "--config", str(cfg)]) == 0
        doc = json.loads((tmp_path / "out" / "criteria.json").read_text())
        verdicts = {c["theorem"]: c for c in doc["criteria"]}
        assert verdicts["T1"]["verdict"] == "no-basis"
        assert not verdicts["T3"]["applicable"]

    def test_zero_potential_all_inconclusive(self, tmp_path):
        pot = tmp_path / "pot.json"
        pot.write_text(json.dumps({"kind": "trig", "coeffs": []}))
        cfg = _write_config(tmp_path, pot, trunc=64, window=[5, 16])
        assert main(["criteria", "--config", str(cfg)]) == 0
        doc = json.loads((tmp_path / "out" / "criteria.json").read_text())
        for c in doc["criteria"]:
            assert c["verdict"] in ("inconclusive",), c["theorem"]
            assert not c["applicable"]


class TestVerifyCommand:
    def test_tiny_truncation_exit_3(self, tmp_path, capsys):
        code = main(["verify", "--trunc", "8", "--window", "1:10",
                     "--out", str(tmp_path / "v")])
        assert code == 3
        assert "truncation-trust" in capsys.readouterr().out
        doc = json.loads((tmp_path / "v" / "verify.json").read_text())
        assert doc["passed"] is False

    def test_missing_potential_file_exit_1(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"potential": str(tmp_path / "gone.json"),
                                   "out_dir": str(tmp_path / "v")}))
        assert main(["verify", "--config", str(cfg)]) == 1


class TestScanCommand:
    def test_zero_potential_scan(self, tmp_path):
        pot = tmp_path / "pot.json"
        pot.write_text(json.dumps({"kind": "trig", "coeffs": []}))
        cfg = _write_config(tmp_path, pot)
        assert main(["scan", "--config", str(cfg), "--lo", "0", "--hi", "50",
                     "--count", "11", "--steps", "512"]) == 0
        lines = (tmp_path / "out" / "scan.csv").read_text().splitlines()
        assert lines[1] == "re_lambda,im_lambda,re_delta,im_delta"
        for line in lines[2:]:
            re_l, im_l, re_d, im_d = map(float, line.split(","))
            assert re_d == pytest.approx(2 * math.cos(math.sqrt(re_l)), abs=1e-8)


class TestDeterminism:
    def test_spectrum_byte_identical(self, tmp_path):
        pot = _write_sawtooth(tmp_path)
        blobs = []
        for tag in ("a", "b"):
            cfg = _write_config(tmp_path, pot, out_dir=str(tmp_path / tag))
            assert main(["spectrum", "--config", str(cfg)]) == 0
            blobs.append((tmp_path / tag / "spectrum.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_config_hash_in_every_output(self, tmp_path):
        pot = _write_sawtooth(tmp_path)
        cfg = _write_config(tmp_path, pot)
        assert main(["spectrum", "--config", str(cfg)]) == 0
        for name in ("spectrum.csv", "oracle.csv", "agreement.csv"):
            first = (tmp_path / "out" / name).read_text().splitlines()[0]
            assert first.startswith("# config_hash=")
