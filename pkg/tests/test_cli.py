"""Command-line interface: parsing, exit codes, reports, determinism."""

import json
import os

import pytest

from deltasum.cli import (
    EXIT_BAD_CONFIG,
    EXIT_MISSING_PARAM,
    EXIT_OK,
    EXIT_SUITE_FAILURE,
    EXIT_TIME_CAP,
    EXIT_TYPE_MISMATCH,
    EXIT_UNKNOWN_PARAM,
    Assertion,
    CliError,
    check,
    main,
    parse,
    report_json,
)


# ---------------------------------------------------------------------------
# parsing


def test_parse_defaults_and_flag_forms():
    cfg = parse(["gauss"])
    assert cfg.subcommand == "gauss"
    assert cfg["qmax"] == 999 and cfg["per-q"] == 10 and cfg["tol"] == 1e-6
    # --name value and --name=value are interchangeable
    assert parse(["gauss", "--qmax", "99"]).params == parse(["gauss", "--qmax=99"]).params
    assert parse(["gauss", "--qmax=99"])["qmax"] == 99


def test_parse_skips_leading_verify_token():
    assert parse(["verify", "gauss", "--qmax", "99"])["qmax"] == 99
    # "verify" alone still leaves the subcommand missing
    with pytest.raises(CliError) as ei:
        parse(["verify"])
    assert ei.value.code == EXIT_MISSING_PARAM


def test_parse_list_and_flag_kinds():
    cfg = parse(["osc", "--ym", "1e3,2e4", "--quick"])
    assert cfg["ym"] == (1000.0, 20000.0)
    assert cfg["quick"] is True
    assert parse(["osc"])["quick"] is False
    assert parse(["osc", "--quick=false"])["quick"] is False
    with pytest.raises(CliError) as ei:
        parse(["osc", "--quick=maybe"])
    assert ei.value.code == EXIT_TYPE_MISMATCH


@pytest.mark.parametrize("argv,code", [
    ([], EXIT_MISSING_PARAM),
    (["frobnicate"], EXIT_UNKNOWN_PARAM),
    (["gauss", "--frobnicate", "1"], EXIT_UNKNOWN_PARAM),
    (["gauss", "stray-token"], EXIT_UNKNOWN_PARAM),
    (["gauss", "--qmax", "banana"], EXIT_TYPE_MISMATCH),
    (["gauss", "--qmax", "-5"], EXIT_TYPE_MISMATCH),
    (["gauss", "--tol", "0"], EXIT_TYPE_MISMATCH),
    (["gauss", "--qmax"], EXIT_TYPE_MISMATCH),
    (["fit"], EXIT_MISSING_PARAM),
])
def test_parse_error_codes(argv, code):
    with pytest.raises(CliError) as ei:
        parse(argv)
    assert ei.value.code == code


def test_config_file_resolution(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"qmax": 39, "per-q": 2, "subcommand": "gauss"}))
    cfg = parse(["gauss", "--config", str(path)])
    assert cfg["qmax"] == 39 and cfg["per-q"] == 2
    # explicit flags override config values
    assert parse(["gauss", "--config", str(path), "--qmax", "19"])["qmax"] == 19


def test_config_file_type_coercion(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"qmax": "77"}))
    assert parse(["gauss", "--config", str(path)])["qmax"] == 77

    path.write_text(json.dumps({"ym": [1.0, 2.0]}))
    assert parse(["osc", "--config", str(path)])["ym"] == (1.0, 2.0)

    for bad in ({"qmax": 3.5}, {"qmax": True}):
        path.write_text(json.dumps(bad))
        with pytest.raises(CliError) as ei:
            parse(["gauss", "--config", str(path)])
        assert ei.value.code == EXIT_TYPE_MISMATCH


def test_config_file_error_codes(tmp_path):
    with pytest.raises(CliError) as ei:
        parse(["gauss", "--config", str(tmp_path / "absent.json")])
    assert ei.value.code == EXIT_BAD_CONFIG

    path = tmp_path / "cfg.json"
    for text in ("{ not json", json.dumps([1, 2])):
        path.write_text(text)
        with pytest.raises(CliError) as ei:
            parse(["gauss", "--config", str(path)])
        assert ei.value.code == EXIT_BAD_CONFIG

    path.write_text(json.dumps({"no-such-key": 1}))
    with pytest.raises(CliError) as ei:
        parse(["gauss", "--config", str(path)])
    assert ei.value.code == EXIT_UNKNOWN_PARAM


# ---------------------------------------------------------------------------
# assertion rows and report encoding


def test_check_relations():
    assert check("a", 1.0, "<=", 2.0).passed
    assert not check("a", 1.0, ">=", 2.0).passed
    assert check("a", 0.25, "==", 0.25).passed
    assert not check("a", 0.25, "==", 0.2500001).passed
    row = check("a", 1, "<=", 2, note="n")
    assert isinstance(row.observed, float) and isinstance(row.bound, float)
    with pytest.raises(AttributeError):
        row.passed = False  # frozen


def test_report_json_round_trips_floats():
    awkward = {"b": 0.1 + 0.2, "a": 1.0 / 3.0, "tiny": 1e-300,
               "nested": [1.0 / 7.0, {"x": 2.0 ** -52}]}
    text = report_json(awkward)
    assert text.endswith("\n")
    back = json.loads(text)
    assert back["b"] == 0.1 + 0.2 and back["a"] == 1.0 / 3.0
    assert back["tiny"] == 1e-300 and back["nested"][1]["x"] == 2.0 ** -52
    # keys come out sorted so the report is diffable
    keys = [line.split('"')[1] for line in text.splitlines() if line.startswith(' "')]
    assert keys == sorted(keys)


# ---------------------------------------------------------------------------
# end-to-end runs (small parameter ranges keep these fast)


def test_main_error_exit_codes_and_stderr(capsys):
    assert main(["frobnicate"]) == EXIT_UNKNOWN_PARAM
    assert main(["gauss", "--qmax", "banana"]) == EXIT_TYPE_MISMATCH
    assert main([]) == EXIT_MISSING_PARAM
    assert "error:" in capsys.readouterr().err


def test_main_sieve_ok_json_report(capsys):
    assert main(["sieve", "--nmax", "300"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["subcommand"] == "sieve"
    assert report["failed"] == 0 and report["passed"] == len(report["assertions"])
    assert report["passed"] >= 4
    for row in report["assertions"]:
        assert set(row) == {"anchor", "observed", "bound", "relation", "passed", "note"}


def test_main_verify_prefix_accepted(capsys):
    assert main(["verify", "sieve", "--nmax", "100"]) == EXIT_OK
    capsys.readouterr()


def test_main_suite_failure_exit(capsys):
    # an impossible tolerance forces assertion failures, not a crash
    assert main(["gauss", "--qmax", "19", "--per-q", "2", "--tol", "1e-30"]) == EXIT_SUITE_FAILURE
    report = json.loads(capsys.readouterr().out)
    assert report["failed"] > 0


def test_main_time_cap_exit(capsys):
    # verify-all checks the cap before each suite, so a tiny cap stops at once
    assert main(["verify-all", "--time-cap", "1e-9"]) == EXIT_TIME_CAP
    report = json.loads(capsys.readouterr().out)
    assert report["assertions"] == []
    # ordinary suites check the cap after running: report is complete, code is 2
    assert main(["sieve", "--nmax", "100", "--time-cap", "1e-9"]) == EXIT_TIME_CAP
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] > 0


def test_json_report_deterministic_up_to_timing(tmp_path):
    paths = [tmp_path / "r1.json", tmp_path / "r2.json"]
    for p in paths:
        assert main(["gauss", "--qmax", "29", "--per-q", "3", "--out", str(p)]) == EXIT_OK
    r1, r2 = (json.loads(p.read_text()) for p in paths)
    for r in (r1, r2):
        r.pop("elapsed_s")
        r["config"].pop("out")  # the two runs wrote to different paths
    assert r1 == r2


def test_csv_report_byte_identical_across_runs(tmp_path):
    paths = [tmp_path / "r1.csv", tmp_path / "r2.csv"]
    for p in paths:
        code = main(["gauss", "--qmax", "29", "--per-q", "3",
                     "--format", "csv", "--out", str(p)])
        assert code == EXIT_OK
    b1, b2 = (p.read_bytes() for p in paths)
    assert b1 == b2
    lines = b1.decode().splitlines()
    assert lines[0] == "anchor,observed,relation,bound,passed,note"
    assert len(lines) > 1
    assert all(line.split(",")[4] == "true" for line in lines[1:])


def test_sum_command_csv_identical_across_threads(tmp_path, monkeypatch):
    monkeypatch.setitem(os.environ, "DELTASUM_THREADS", "1")
    outs = []
    for nt, name in ((1, "t1.csv"), (3, "t3.csv")):
        p = tmp_path / name
        code = main(["sum", "--X", "256,1024", "--k", "3", "--weight", "mobius",
                     "--threads", str(nt), "--format", "csv", "--out", str(p)])
        assert code == EXIT_OK
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    header = outs[0].decode().splitlines()[0]
    assert header == "X,k_or_theta,source,weight,value,trivial_ratio"
    # the threads flag is exported for worker pools spawned further down
    assert os.environ["DELTASUM_THREADS"] == "3"


def test_fit_command_reads_series_csv(tmp_path, capsys):
    series = tmp_path / "series.csv"
    rows = ["# X,value", "X,value"] + [f"{10.0 ** e:.17g},{(10.0 ** e) ** 1.5:.17g}"
                                       for e in range(1, 6)]
    series.write_text("\n".join(rows) + "\n")
    assert main(["fit", "--series", str(series)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["details"]["points"] == 5
    assert abs(report["details"]["slope"] - 1.5) < 1e-9


def test_fit_command_bad_series_files(tmp_path, capsys):
    assert main(["fit", "--series", str(tmp_path / "absent.csv")]) == EXIT_BAD_CONFIG
    short = tmp_path / "short.csv"
    short.write_text("10,100\n20,400\n")
    assert main(["fit", "--series", str(short)]) == EXIT_BAD_CONFIG
    assert "error:" in capsys.readouterr().err
