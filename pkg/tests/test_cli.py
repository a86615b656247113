import json
import os

import pytest

from khintype.cli import build_config, main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCatalog:
    def test_documented_verdict_lines(self, capsys):
        code, out, _ = run_cli(["catalog"], capsys)
        assert code == 0
        assert "veronese5: surjective=yes det1=no rank2=no" in out
        assert "tracefree2: rank2=yes drv=no" in out
        assert "posdef-pad" in out and "tracefree-basis" in out

    def test_no_args_prints_usage(self, capsys):
        code, out, _ = run_cli([], capsys)
        assert code == 0
        assert "usage" in out.lower()

    def test_unknown_manifold_errors(self, capsys):
        code, _, err = run_cli(["count", "--manifold", "nope", "--q", "8"], capsys)
        assert code == 1
        assert "error" in err


class TestCountCommand:
    def test_csv_written_with_meta(self, tmp_path, capsys):
        out_path = tmp_path / "sweep.csv"
        code, out, _ = run_cli(
            ["count", "--manifold", "tracefree2", "--k", "2", "--q", "16,32",
             "--kappa", "1/4", "--theta", "0", "--output", str(out_path),
             "--threads", "1"], capsys)
        assert code == 0
        text = out_path.read_text()
        lines = text.splitlines()
        assert lines[0].startswith("# khintype=") and "config_hash=" in lines[0]
        assert lines[1] == "q,kappa_num,kappa_den,theta_id,A,envelope,ratio"
        assert len(lines) == 2 + 2
        assert "max ratio" in out

    def test_byte_reproducible(self, tmp_path, capsys):
        args = ["count", "--manifold", "tracefree2", "--q", "16,32",
                "--kappa", "1/4,1/8", "--theta", "0", "--threads", "1"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--output", str(a)]) == 0
        assert main(args + ["--output", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_parallel_run_identical_bytes(self, tmp_path, capsys):
        base = ["count", "--manifold", "tracefree2", "--q", "64",
                "--kappa", "1/4", "--theta", "0"]
        a, b = tmp_path / "serial.csv", tmp_path / "par.csv"
        assert main(base + ["--threads", "1", "--output", str(a)]) == 0
        assert main(base + ["--threads", "2", "--output", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_threads_env_cap(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("KHINTYPE_THREADS", "1")
        out_path = tmp_path / "c.csv"
        code, _, _ = run_cli(["count", "--manifold", "parabola", "--k", "1",
                              "--q", "16", "--kappa", "1/4", "--theta", "0",
                              "--output", str(out_path), "--threads", "8"], capsys)
        assert code == 0 and out_path.exists()


class TestConfigFile:
    def test_config_and_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[run]\nmanifold = tracefree2\nq = 16\nkappa = 1/4\n"
                       "theta = 0\nk = 2\n")
        parsed = build_config(["count", "--config", str(cfg), "--q", "32"])
        assert parsed.manifold == "tracefree2"
        assert parsed.q == "32"  # flag wins
        assert parsed.kappa == "1/4"

    def test_bad_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[run]\nbogus = 1\n")
        code, _, err = run_cli(["count", "--config", str(cfg)], capsys)
        assert code == 1 and "bogus" in err

    def test_missing_config(self, capsys):
        code, _, err = run_cli(["count", "--config", "/nonexistent.ini"], capsys)
        assert code == 1


class TestJsonCommands:
    def test_typicality_json(self, tmp_path, capsys):
        out_path = tmp_path / "phase.json"
        code, _, _ = run_cli(["typicality", "--dmax", "2", "--n", "20",
                              "--seed", "5", "--budget", "512",
                              "--output", str(out_path)], capsys)
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["meta"]["tool"] == "khintype"
        assert "config_hash" in payload["meta"]
        cells = payload["cells"]
        assert {(c["d"], c["m"]) for c in cells} == {(2, 1), (2, 2), (2, 3)}
        for c in cells:
            assert set(c) >= {"freq_U", "freq_Utilde", "n_inconclusive",
                              "predicted_U", "predicted_Utilde", "agree"}

    def test_typicality_reproducible(self, tmp_path, capsys):
        args = ["typicality", "--dmax", "2", "--n", "10", "--seed", "3",
                "--budget", "256"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(args + ["--output", str(a)]) == 0
        assert main(args + ["--output", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_series_text_and_json(self, tmp_path, capsys):
        out_path = tmp_path / "series.json"
        code, out, _ = run_cli(["series", "--d", "4", "--m", "1", "--k", "1",
                                "--s", "5", "--output", str(out_path)], capsys)
        assert code == 0
        assert "Case 1 applies" in out and "CONVERGES" in out
        payload = json.loads(out_path.read_text())
        assert payload["series"] == "CONVERGES"

    def test_nondegen_json(self, tmp_path, capsys):
        out_path = tmp_path / "nd.json"
        code, _, _ = run_cli(["nondegen", "--manifold", "tracefree2",
                              "--samples", "3", "--budget", "512", "--seed", "1",
                              "--output", str(out_path)], capsys)
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["manifold"] == "tracefree2"
        assert len(payload["samples"]) == 3
        assert payload["samples"][0]["rank2"]["verdict"] == "PASS"
        assert payload["samples"][0]["drv"]["verdict"] == "FAIL"

    def test_inconclusive_dominated_exit_2(self, tmp_path, capsys):
        # Hessian pencil with margin ~6e-8, inside the inconclusive band
        code, _, _ = run_cli(
            ["nondegen", "--map", "3/100000000*a1^2 + 3/100000000*a2^2",
             "--d", "2", "--m", "1", "--samples", "2", "--budget", "256",
             "--output", str(tmp_path / "inc.json")], capsys)
        assert code == 2


class TestExpsumCommand:
    def test_csv_columns(self, tmp_path, capsys):
        out_path = tmp_path / "maj.csv"
        code, _, _ = run_cli(
            ["expsum", "--manifold", "tracefree2", "--q", "512", "--kappa", "1/4",
             "--theta", "0", "--delta", "0.1", "--grid", "16",
             "--output", str(out_path), "--threads", "1"], capsys)
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[1] == "q,kappa_num,kappa_den,theta_id,A,majorant,ratio,H,r,delta"
        assert len(lines) == 3
