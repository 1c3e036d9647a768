"""Command-line workflow: config parsing, result tables, manifests, replay,
and exit codes.  Everything runs in-process through main()."""

import csv
import hashlib
import json

import pytest

from cellcache import cov_mf_exact
from cellcache.cli import EXIT_CONFIG_ERROR, EXIT_OK, main

from conftest import db, mk_params


def run_cli(*argv):
    return main(list(argv))


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# coverage scenario and output formats
# ---------------------------------------------------------------------------

def test_coverage_default_run(tmp_path):
    out = tmp_path / "run"
    assert run_cli("coverage", "--out", str(out)) == EXIT_OK
    assert (out / "results.csv").exists()
    assert (out / "manifest.json").exists()
    rows = read_rows(out / "results.csv")
    assert len(rows) == 5 * 3                  # default sweep x ranks
    assert all(r["status"] == "ok" for r in rows)
    assert "coverage:exact" in rows[0] and "cov_lower:bound" in rows[0]


def test_coverage_row_matches_library(tmp_path):
    out = tmp_path / "run"
    run_cli("coverage", "--out", str(out))
    rows = read_rows(out / "results.csv")
    row = next(r for r in rows if r["gamma_db"] == "-10.0" and r["k"] == "1")
    # repr round-trips floats exactly through the CSV
    expect = cov_mf_exact(1, mk_params(gamma=db(-10.0)))
    assert float(row["coverage:exact"]) == expect
    lo, up = float(row["cov_lower:bound"]), float(row["cov_upper:bound"])
    assert lo <= expect <= up


def test_json_results_format(tmp_path):
    out = tmp_path / "run"
    assert run_cli("coverage", "--out", str(out), "--format", "json") == EXIT_OK
    data = json.loads((out / "results.json").read_text())
    assert data["columns"][0] == "scheme"
    assert len(data["rows"]) == 15
    assert 0.0 <= data["rows"][0]["coverage:exact"] <= 1.0


def test_quantized_coverage_reports_bounds_only(tmp_path):
    cfg = tmp_path / "exp.toml"
    cfg.write_text('[network]\nfeedback_bits = 6\n[sweep]\ngamma_db = [0.0]\n')
    out = tmp_path / "run"
    assert run_cli("coverage", "--config", str(cfg), "--out", str(out)) == 0
    rows = read_rows(out / "results.csv")
    assert len(rows) == 3
    for row in rows:
        assert row["coverage:exact"] == ""
        assert 0.0 <= float(row["cov_lower:bound"]) \
            <= float(row["cov_upper:bound"]) <= 1.0


# ---------------------------------------------------------------------------
# manifests and replay
# ---------------------------------------------------------------------------

def test_manifest_hashes_written_files(tmp_path):
    out = tmp_path / "run"
    run_cli("coverage", "--out", str(out))
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["artifact"] == "cellcache"
    digest = hashlib.sha256((out / "results.csv").read_bytes()).hexdigest()
    assert manifest["files"]["results.csv"] == digest


def test_manifest_replay_is_byte_identical(tmp_path):
    first = tmp_path / "a"
    second = tmp_path / "b"
    run_cli("coverage", "--out", str(first), "--seed", "9")
    rc = run_cli("coverage", "--config", str(first / "manifest.json"),
                 "--out", str(second))
    assert rc == EXIT_OK
    assert (first / "results.csv").read_bytes() == \
        (second / "results.csv").read_bytes()
    assert (first / "manifest.json").read_bytes() == \
        (second / "manifest.json").read_bytes()


def test_seed_is_part_of_config_identity(tmp_path):
    hashes = []
    for seed in ("5", "6"):
        out = tmp_path / seed
        run_cli("coverage", "--out", str(out), "--seed", seed)
        hashes.append(json.loads((out / "manifest.json").read_text())
                      ["config_sha256"])
    assert hashes[0] != hashes[1]


# ---------------------------------------------------------------------------
# optimizer scenarios
# ---------------------------------------------------------------------------

def test_optimize_prob_from_toml(tmp_path):
    cfg = tmp_path / "exp.toml"
    cfg.write_text(
        '[network]\nscheme = "zf"\nL = 4\n'
        '[catalog]\nN = 30\nM = 5\ndelta = 0.8\n'
        '[sweep]\ngamma_db = [0.0]\n'
    )
    out = tmp_path / "run"
    assert run_cli("optimize-prob", "--config", str(cfg),
                   "--out", str(out)) == EXIT_OK
    rows = read_rows(out / "results.csv")
    by_policy = {r["policy"]: r for r in rows}
    assert set(by_policy) == {"opc", "mpc"}
    assert float(by_policy["opc"]["afot:exact"]) > \
        float(by_policy["mpc"]["afot:exact"])
    assert float(by_policy["opc"]["cache_load"]) == pytest.approx(5.0, abs=1e-7)


def test_optimize_coded_with_exhaustive_check(tmp_path):
    cfg = tmp_path / "exp.toml"
    cfg.write_text(
        '[catalog]\nN = 12\nM = 4\ndelta = 0.6\n[sweep]\ngamma_db = [0.0]\n'
    )
    out = tmp_path / "run"
    assert run_cli("optimize-coded", "--config", str(cfg),
                   "--out", str(out)) == EXIT_OK
    row, = read_rows(out / "results.csv")
    assert row["scheme"] == "no-mf"
    assert float(row["cache_load"]) == pytest.approx(4.0, abs=1e-9)
    afot = float(row["afot:approx"])
    assert afot >= 0.99 * float(row["afot_exhaustive:approx"])


def test_compare_marks_infeasible_delivery(tmp_path):
    # with L < K zero-forcing cannot null the cluster, so the o-zf column
    # is reported as failed rather than silently dropped
    cfg = tmp_path / "exp.toml"
    cfg.write_text(
        '[network]\nL = 2\n[catalog]\nN = 20\nM = 4\n'
        '[sweep]\ngamma_db = [0.0]\n'
    )
    out = tmp_path / "run"
    assert run_cli("compare", "--config", str(cfg), "--out", str(out)) == 0
    row, = read_rows(out / "results.csv")
    assert row["afot_cc_ozf:bound"] == ""
    assert row["status"].startswith("failed:") and "o-zf" in row["status"]
    assert float(row["afot_cc_nomf:approx"]) > 0.0
    assert float(row["adv_opc_mpc:exact"]) >= 0.0


# ---------------------------------------------------------------------------
# simulation scenario
# ---------------------------------------------------------------------------

def test_simulate_reports_joint_decode_row(tmp_path):
    cfg = tmp_path / "exp.toml"
    cfg.write_text(
        '[network]\nscheme = "no-mf"\n[sweep]\ngamma_db = [0.0]\n'
    )
    out = tmp_path / "run"
    assert run_cli("simulate", "--config", str(cfg), "--out", str(out),
                   "--trials", "20000") == EXIT_OK
    rows = read_rows(out / "results.csv")
    assert len(rows) == 4                      # three ranks + joint decode
    cov = [r for r in rows if r["statistic"] == "coverage"]
    for row in cov:
        slack = 5 * float(row["sim_se"]) + 0.01
        assert abs(float(row["sim_mean"]) - float(row["coverage:exact"])) \
            < slack
        assert int(row["trials"]) == 20000
    joint, = (r for r in rows if r["statistic"] == "sic-fot")
    assert float(joint["sic_fot:approx"]) > 0.0
    assert float(joint["truncation_bound"]) < 0.02


# ---------------------------------------------------------------------------
# config errors and exit codes
# ---------------------------------------------------------------------------

def test_missing_scenario_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


@pytest.mark.parametrize("body,needle", [
    ('[network]\nalpha = 1.5\n', "[network"),
    ('[network]\nwidth = 3\n', "unknown key"),
    ('[networks]\nalpha = 4.0\n', "unknown section"),
    ('[network]\nL = true\n', "expected a number"),
    ('[network]\nscheme = "no-mf"\n', "scheme"),          # not for optimize-prob
    ('[simulation]\ntrials = 0\n', "trials"),
    ('[catalog]\nN = 5\nM = 5\n', "M"),
    ('[sweep]\ngamma_db = []\n', "nonempty list"),
])
def test_invalid_configs_exit_2(tmp_path, capsys, body, needle):
    cfg = tmp_path / "exp.toml"
    cfg.write_text(body)
    rc = run_cli("optimize-prob", "--config", str(cfg),
                 "--out", str(tmp_path / "run"))
    assert rc == EXIT_CONFIG_ERROR
    assert needle in capsys.readouterr().err


def test_unreadable_and_malformed_configs(tmp_path, capsys):
    assert run_cli("coverage", "--config", str(tmp_path / "nope.toml")) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("[network\nalpha=")
    assert run_cli("coverage", "--config", str(bad)) == 2
    capsys.readouterr()
