"""Researcher acceptance tests for the hecke-moments command line"""

import json

import pytest

from hecke_moments.cli import app
from tests.helpers.cj_validator import (
    is_valid_collection_json_response,
    item_values,
    read_moments_csv,
)


@pytest.mark.parametrize(
    "a, n, expected",
    [("i", "-1-2i", "-1"), ("1+i", "-1-2i", "-1"), ("2", "-3", "1"), ("5", "-1-2i", "0")],
)
def test_researcher_can_print_a_residue_symbol(runner, a, n, expected):
    """As a researcher, I want (a/n) from the shell
    so that single values can be checked without writing Python"""
    result = runner.invoke(app, ["symbol", f"--a={a}", f"--n={n}"])
    assert result.exit_code == 0, result.output
    assert result.stdout.strip() == expected


def test_symbol_rejects_even_and_malformed_moduli(runner):
    """As a researcher, I want invalid input to exit with the domain-error code
    so that scripts can tell bad input from failed identities"""
    assert runner.invoke(app, ["symbol", "--a=1", "--n=2"]).exit_code == 2
    assert runner.invoke(app, ["symbol", "--a=1", "--n=1+2j"]).exit_code == 2


def test_researcher_can_run_a_suite_with_a_json_report(runner, tmp_path):
    """As a researcher, I want a suite's rows on screen and in a JSON file
    so that verification runs can be archived"""
    report_path = tmp_path / "gauss.json"
    result = runner.invoke(
        app, ["verify", "gauss", "--nmax", "20", "--dmax", "20", "--json", str(report_path)]
    )
    assert result.exit_code == 0, result.output
    assert "verify gauss" in result.stdout
    data = json.loads(report_path.read_text(encoding="utf-8"))
    assert is_valid_collection_json_response(data)
    assert "error" not in data
    assert item_values(data["template"][0])["nmax"] == 20
    assert any(item_values(item)["identity"] == "g(k, p^l) closed form" for item in data["collection"]["items"])


def test_failed_identities_exit_with_code_one(runner, tmp_path):
    """As a researcher, I want a failing identity to set exit code 1
    so that continuous checks go red"""
    report_path = tmp_path / "gauss.json"
    result = runner.invoke(
        app,
        ["verify", "gauss", "--nmax", "10", "--dmax", "5", "--tolerance", "1e-300", "--json", str(report_path)],
    )
    assert result.exit_code == 1
    data = json.loads(report_path.read_text(encoding="utf-8"))
    assert data["error"]["code"] == 1


def test_verify_rejects_unknown_kernels(runner):
    """As a researcher, I want an unknown Poisson weight rejected
    so that a typo does not silently fall back to the bump"""
    result = runner.invoke(app, ["verify", "poisson", "--kernel", "box"])
    assert result.exit_code == 2


def test_researcher_can_verify_poisson_with_the_gaussian_weight(runner):
    """As a researcher, I want the quick gaussian-weight Poisson check from the shell
    so that the dual sums are validated in seconds"""
    result = runner.invoke(app, ["verify", "poisson", "--kernel", "gaussian", "--x", "20"])
    assert result.exit_code == 0, result.output


def _scan(runner, out, *extra):
    return runner.invoke(
        app,
        ["moments", "--grid", "20,40", "--tolerance", "1e-9", "--workers", "1", "--out", str(out), *extra],
    )


def test_researcher_can_scan_moments_and_get_artefacts(runner, tmp_path, fast_settings):
    """As a researcher, I want the moments command to leave a CSV, a JSON report,
    a replayable config and a plot script so that results can be shared"""
    result = _scan(runner, tmp_path)
    assert result.exit_code == 0, result.output
    rows = read_moments_csv((tmp_path / "moments.csv").read_text(encoding="utf-8"))
    assert [row["X"] for row in rows] == ["20", "40"]
    assert all(row["ratio4"] for row in rows)

    data = json.loads((tmp_path / "moments.json").read_text(encoding="utf-8"))
    assert is_valid_collection_json_response(data)
    assert {link["rel"] for link in data["collection"]["links"]} == {"csv", "config", "plot"}
    assert item_values(data["template"][0])["grid"] == [20, 40]
    assert (tmp_path / "ratio_plot.gp").is_file()
    assert "grid=20,40" in (tmp_path / "moments.cfg").read_text(encoding="utf-8")


def test_replaying_a_config_reproduces_the_table(runner, tmp_path, fast_settings):
    """As a researcher, I want --config to replay a run exactly
    so that published tables can be regenerated"""
    first, second = tmp_path / "first", tmp_path / "second"
    assert _scan(runner, first, "--no-plot").exit_code == 0
    result = runner.invoke(app, ["moments", "--config", str(first / "moments.cfg"), "--out", str(second)])
    assert result.exit_code == 0, result.output
    assert (first / "moments.csv").read_bytes() == (second / "moments.csv").read_bytes()
    assert not (first / "ratio_plot.gp").exists()


def test_timings_reach_the_csv_only_on_request(runner, tmp_path, fast_settings):
    """As a researcher, I want the seconds column filled only with --timings
    so that default tables stay byte-identical between reruns"""
    assert _scan(runner, tmp_path / "plain", "--no-plot").exit_code == 0
    assert _scan(runner, tmp_path / "timed", "--no-plot", "--timings").exit_code == 0
    plain = read_moments_csv((tmp_path / "plain" / "moments.csv").read_text(encoding="utf-8"))
    timed = read_moments_csv((tmp_path / "timed" / "moments.csv").read_text(encoding="utf-8"))
    assert all(row["seconds"] == "" for row in plain)
    assert all(float(row["seconds"]) >= 0 for row in timed)
    data = json.loads((tmp_path / "plain" / "moments.json").read_text(encoding="utf-8"))
    assert all(item_values(item)["seconds"] >= 0 for item in data["collection"]["items"])


def test_scans_beyond_the_ceiling_leave_an_error_document(runner, tmp_path, fast_settings):
    """As a researcher, I want oversized scans refused with a JSON error
    so that an accidental multi-day run never starts"""
    result = runner.invoke(app, ["moments", "--grid", "20000", "--out", str(tmp_path)])
    assert result.exit_code == 2
    data = json.loads((tmp_path / "moments.json").read_text(encoding="utf-8"))
    assert data["error"]["title"] == "DomainError"
    assert data["error"]["code"] == 2


def test_researcher_can_print_the_constants(runner, fast_settings):
    """As a researcher, I want a_4, zeta_K(2) and C_4 with their provenance
    so that quoted constants can be traced"""
    result = runner.invoke(app, ["moments", "--constants"])
    assert result.exit_code == 0, result.output
    for name in ("a_4", "zeta_K(2)", "C_4"):
        assert name in result.stdout


def test_researcher_can_check_density(runner):
    """As a researcher, I want the square-free count against its prediction from the shell
    so that the family size is visible at a glance"""
    result = runner.invoke(app, ["density", "--x", "1000"])
    assert result.exit_code == 0, result.output
    assert "count=" in result.stdout
    assert runner.invoke(app, ["density", "--x", "0"]).exit_code == 2
