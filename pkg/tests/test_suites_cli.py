import json
import subprocess
import sys

import pytest

from declab.cli import main as cli_main
from declab.config import DEFAULTS, SuiteSpec, load_spec, parse_config_text
from declab.errors import ConfigError
from declab.report import emit_report, payload_bytes
from declab.suites import run_suite


def test_config_parsing(tmp_path):
    text = """
    # comment
    seed = 3
    congruencing.x_values = 10, 20
    certify = false
    nu = 1/4
    """
    opts = parse_config_text(text)
    assert opts["seed"] == 3
    assert opts["congruencing.x_values"] == (10, 20)
    assert opts["certify"] is False


def test_config_unknown_key():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text("bogus = 1")


def test_config_unknown_suite():
    with pytest.raises(ConfigError, match="valid suites"):
        SuiteSpec("nonsense")


def test_spec_digest_changes_with_options():
    a = SuiteSpec("recursion-pipeline")
    b = SuiteSpec("recursion-pipeline", {"seed": 9})
    assert a.digest() != b.digest()


def test_recursion_suite_green():
    rec = run_suite(load_spec("recursion-pipeline"))
    assert rec.tallies["fail"] == 0 and rec.tallies["error"] == 0


def test_empty_grid_is_a_passing_record():
    spec = load_spec("congruencing-ratios",
                     overrides={"congruencing.x_values": (),
                                "congruencing.primes": ()})
    rec = run_suite(spec)
    assert rec.items == []
    assert rec.all_green


def test_determinism_bytes():
    spec = load_spec("congruencing-ratios",
                     overrides={"congruencing.x_values": (20, 50)})
    a = payload_bytes(run_suite(spec))
    b = payload_bytes(run_suite(spec))
    assert a == b


def test_report_shapes():
    spec = load_spec("congruencing-ratios",
                     overrides={"congruencing.x_values": (20,)})
    rec = run_suite(spec)
    blob = json.loads(emit_report(rec, "json"))
    assert {"suite", "config_digest", "backend", "items", "pass", "fail",
            "flag", "error", "timestamp"} <= set(blob)
    csv_text = emit_report(rec, "csv").decode()
    lines = csv_text.strip().splitlines()
    assert lines[0] == "key,status,lhs,rhs,ratio,value,note"
    assert len(lines) == 1 + len(rec.items)


def test_empty_record_json():
    spec = load_spec("congruencing-ratios",
                     overrides={"congruencing.x_values": ()})
    blob = json.loads(emit_report(run_suite(spec), "json"))
    assert blob["items"] == [] and blob["pass"] == 0 and blob["fail"] == 0
    assert blob["flag"] == 0


def test_floats_serialized_at_17_digits():
    spec = load_spec("congruencing-ratios",
                     overrides={"congruencing.x_values": (20,)})
    rec = run_suite(spec)
    blob = emit_report(rec, "json").decode()
    row = json.loads(blob)["items"][0]
    ratio = row["metrics"]["ratio"]
    assert isinstance(ratio, float)


def test_cli_count_j(capsys):
    assert cli_main(["count", "j", "--x", "3"]) == 0
    assert "J(3) = 93" in capsys.readouterr().out


def test_cli_count_i1(capsys):
    assert cli_main(["count", "i1", "--x", "4", "--p", "2", "--a", "1",
                     "--b", "1", "--xi", "1", "--eta", "0"]) == 0
    assert "= 12" in capsys.readouterr().out


def test_cli_count_i1_max(capsys):
    assert cli_main(["count", "i1", "--x", "20", "--p", "2", "--a", "1",
                     "--b", "1"]) == 0
    out = capsys.readouterr().out
    assert "at (xi, eta)" in out


def test_cli_bound_theorem(capsys):
    assert cli_main(["bound", "theorem", "--log-inv-delta", "1.0,461"]) == 0
    out = capsys.readouterr().out
    assert "ln bound" in out and "gates" in out


def test_cli_bound_below_threshold(capsys):
    assert cli_main(["bound", "theorem", "--log-inv-delta", "1.0,100"]) == 1


def test_cli_ratio_linear(capsys):
    assert cli_main(["ratio", "linear", "--delta", "1/4", "--g", "one"]) == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["functional"] == "linear"
    assert blob["ratio"] > 0


def test_cli_ratio_l2l2(capsys):
    assert cli_main(["ratio", "l2l2", "--g", "uni:3:16", "--i1", "0,1/4",
                     "--square-side", "16"]) == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["functional"] == "l2l2"


def test_cli_run_exit_codes(tmp_path):
    out = tmp_path / "rec.json"
    code = cli_main(["run", "recursion-pipeline", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["fail"] == 0


def test_cli_run_csv(tmp_path):
    out = tmp_path / "rec.csv"
    code = cli_main(["run", "recursion-pipeline", "--out", str(out),
                     "--format", "csv"])
    assert code == 0
    assert out.read_text().startswith("key,status")


def test_cli_bad_config(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nope = 1\n")
    assert cli_main(["run", "recursion-pipeline", "--config", str(cfg)]) == 2


def test_cli_entrypoint_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "declab.cli", "count", "j", "--x", "2"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "J(2) = 20" in proc.stdout
