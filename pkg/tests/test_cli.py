import csv
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from moranspec.cli import (ConfigError, RunConfig, config_from_dict, emit_config, main,
                           parse_config)

from conftest import CANTOR, LOG2, LOG3


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def error_record(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


# worked examples

def test_spectrum_cantor(tmp_path):
    rc = main(["spectrum", "--preset", "middle-third", "--theta-grid", "0.1:1.0:0.1",
               "--tol", "5e-3", "--out", str(tmp_path)])
    assert rc == 0
    rows = read_csv(tmp_path / "spectrum.csv")
    assert len(rows) == 10
    for row in rows:
        assert float(row["s_upper"]) == pytest.approx(CANTOR, abs=3 * 5e-3)
        assert float(row["s_lower"]) == pytest.approx(CANTOR, abs=3 * 5e-3)


def test_moran_e1(tmp_path):
    assert main(["moran", "--preset", "E1", "--k", "2000", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "moran.csv")
    assert len(rows) == 2000
    assert float(rows[-1]["s_k"]) == pytest.approx(LOG2 / LOG3, abs=2e-3)


def test_diagnose_e3(tmp_path):
    assert main(["diagnose", "--preset", "E3", "--out", str(tmp_path)]) == 0
    rows = {r["condition"]: r for r in read_csv(tmp_path / "diagnose_verdicts.csv")}
    row = rows["max_ratio_cardinality"]
    assert float(row["last"]) == pytest.approx(0.5, abs=0.01)
    assert row["verdict"] == "plausibly-fails"


@pytest.mark.parametrize("argv,files", [
    (["pressure", "--preset", "middle-third", "--t", "0,0.5", "--k-max", "100",
      "--window", "20"], ["pressure.csv", "pressure_samples.csv"]),
    (["jump", "--preset", "E2", "--k-max", "200", "--window", "50"], ["jump.csv"]),
    (["realize", "--preset", "middle-third", "--depth", "3"], ["realize.csv"]),
    (["boxdim", "--preset", "full-interval", "--depth", "10"], ["boxdim.csv",
                                                                 "boxdim_counts.csv"]),
    (["massdim", "--preset", "middle-third", "--depth", "8", "--mass-t", "0.63",
      "--k-max", "100", "--window", "20"], ["massdim.csv"]),
    (["truncate", "--preset", "geometric-infinite", "--k-max", "16"],
     ["truncate.csv", "truncate_coverage.csv", "subsystem.toml"]),
])
def test_commands_write_artifacts(tmp_path, argv, files):
    assert main(argv + ["--out", str(tmp_path)]) == 0
    for name in files:
        assert (tmp_path / name).exists()
        meta = json.loads((tmp_path / (name + ".meta.json")).read_text())
        assert meta["file"] == name and len(meta["spec_hash"]) == 64


def test_truncate_subsystem_loads(tmp_path):
    main(["truncate", "--preset", "geometric-infinite", "--k-max", "8", "--out", str(tmp_path)])
    rc = main(["jump", "--spec", str(tmp_path / "subsystem.toml"), "--k-max", "200",
               "--window", "50", "--out", str(tmp_path / "sub")])
    assert rc == 0
    assert float(read_csv(tmp_path / "sub" / "jump.csv")[0]["s_lower"]) == 0.0
    assert all(r["holds"] == "true" for r in read_csv(tmp_path / "truncate_coverage.csv"))


# configuration documents

def test_minimal_config_defaults():
    cfg = parse_config('command = "jump"\npreset = "E1"\n')
    assert cfg.params == {"k_max": 2000, "window": 500, "tol": 1e-4}
    assert cfg.output_dir == "." and cfg.format == "csv"


def test_duplicate_key():
    with pytest.raises(ConfigError) as exc:
        parse_config('command = "jump"\ncommand = "moran"\npreset = "E1"\n')
    assert exc.value.code == "duplicate-key"
    assert exc.value.line == 2


@pytest.mark.parametrize("text,code", [
    ('command = "jump"\npreset = "E1"\ncolour = 1\n', "unknown-key"),
    ('command = "jump"\npreset = "E1"\n[params]\nwindow = 0\n', "out-of-range"),
    ('command = "jump"\npreset = "E1"\n[params]\nk_max = 100\n', "out-of-range"),
    ('command = "jump"\npreset = "koch"\n', "unknown-preset"),
    ('command = "jump"\npreset = "E1"\n[params]\ntol = "small"\n', "bad-type"),
    ('preset = "E1"\n', "missing-key"),
    ('command = "jump"\n', "missing-key"),
    ('command = "jump"\npreset = "E1"\n[params]\nsamples = 5\n', "unknown-key"),
    ('command = "jump" preset', "syntax"),
    ('command = "spectrum"\npreset = "E1"\n[params]\ntheta_grid = [0.0, 0.5]\n',
     "theta-zero"),
])
def test_config_errors(text, code):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.code == code


def test_theta_zero_points_to_jump():
    with pytest.raises(ConfigError, match="jump"):
        config_from_dict({"command": "spectrum", "preset": "E1",
                          "params": {"theta_grid": "0.0:1.0:0.5"}})


def test_cli_errors_are_json(tmp_path, capsys):
    rc = main(["spectrum", "--preset", "E1", "--theta-grid", "0,0.5", "--out", str(tmp_path)])
    assert rc == 2
    assert error_record(capsys)["error"] == "theta-zero"


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["jump", "--preset", "E1", "--k-max", "many"])
    assert exc.value.code == 2
    assert error_record(capsys)["error"] == "usage"


def test_computation_error_exit(tmp_path, capsys):
    rc = main(["jump", "--preset", "E3", "--out", str(tmp_path)])
    assert rc == 3
    rec = error_record(capsys)
    assert rec["error"] == "computation" and "representable" in rec["message"]


def test_run_command(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(f'command = "moran"\npreset = "middle-third"\noutput_dir = "{tmp_path}"\n'
                   '[params]\nk = 50\n')
    assert main(["run", str(cfg)]) == 0
    assert read_csv(tmp_path / "moran.csv")[-1]["k"] == "50"


def test_emit_config(capsys):
    assert main(["jump", "--preset", "E1", "--k-max", "400", "--window", "100",
                 "--emit-config"]) == 0
    cfg = parse_config(capsys.readouterr().out)
    assert cfg.params["k_max"] == 400 and cfg.command == "jump"


@settings(max_examples=50, deadline=None)
@given(k_max=st.integers(2, 5000), window=st.integers(1, 1000), tol=st.floats(1e-9, 0.5),
       fmt=st.sampled_from(["csv", "jsonl"]))
def test_config_round_trip(k_max, window, tol, fmt):
    if k_max < 2 * window:
        return
    cfg = config_from_dict({"command": "jump", "preset": "E2", "format": fmt,
                            "params": {"k_max": k_max, "window": window, "tol": tol}})
    assert parse_config(emit_config(cfg)) == cfg


def test_spectrum_config_round_trip():
    cfg = config_from_dict({"command": "spectrum", "preset": "middle-third",
                            "params": {"theta_grid": "0.2:1.0:0.2", "trace": True}})
    assert cfg.params["theta_grid"] == [0.2, 0.4, 0.6, 0.8, 1.0]
    assert parse_config(emit_config(cfg)) == cfg


# reproducibility and reporting

def test_byte_identical_outputs(tmp_path, monkeypatch):
    argv = ["spectrum", "--preset", "block-alternating", "--theta-grid", "0.25,0.5,1",
            "--k-max", "400", "--window", "100"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("MORANSPEC_THREADS", "3")
    assert main(argv + ["--out", str(tmp_path / "b")]) == 0
    for name in ("spectrum.csv", "spectrum_anchors.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_header_and_jsonl(tmp_path):
    main(["jump", "--preset", "middle-third", "--k-max", "100", "--window", "20",
          "--format", "jsonl", "--out", str(tmp_path)])
    head, row = (json.loads(ln) for ln in (tmp_path / "jump.jsonl").read_text().splitlines())
    assert head["#"]["spec"] == "middle-third" and head["#"]["k_max"] == 100
    assert row["s_lower"] == pytest.approx(CANTOR, abs=1e-4)


def test_report(tmp_path, capsys):
    main(["moran", "--preset", "E1", "--k", "40", "--out", str(tmp_path)])
    (tmp_path / "moran_limits.csv").write_text("tampered\n")
    assert main(["report", str(tmp_path)]) == 0
    text = (tmp_path / "report.md").read_text()
    assert "## moran.csv" in text and "- rows: 40" in text
    assert "file changed since it was written" in text


def test_bad_thread_setting(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MORANSPEC_THREADS", "lots")
    rc = main(["spectrum", "--preset", "middle-third", "--k-max", "100", "--window", "20",
               "--out", str(tmp_path)])
    assert rc == 2 and error_record(capsys)["error"] == "bad-type"
