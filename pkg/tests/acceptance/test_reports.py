"""Researcher acceptance tests for Collection+JSON reports, CSV tables and plot scripts"""

import json

from pydantic import BaseModel, Field

from hecke_moments import cj_models
from hecke_moments.config import RunConfig
from hecke_moments.errors import ToleranceError
from hecke_moments.moments import MomentReport, MomentRow
from hecke_moments.reports import (
    CSV_HEADER,
    LinkDef,
    ReportBuilder,
    error_document,
    moments_csv,
    moments_document,
    verification_document,
)
from hecke_moments.suites import Suite, SuiteOptions, VerificationReport, VerificationRow
from hecke_moments.templating import render_ratio_plot, write_ratio_plot
from tests.helpers.cj_validator import (
    MOMENTS_HEADER,
    is_valid_collection_json_response,
    item_values,
    read_moments_csv,
)


def _report() -> MomentReport:
    rows = [
        MomentRow(x=100, count=80, s1=50.5, s2=120.25, s3=None, s4=900.0, ratio4=0.75, seconds=1.5),
        MomentRow(x=1000, count=760, s1=600.0, s2=1500.0, s3=None, s4=12000.0, ratio4=0.5, seconds=9.0),
    ]
    return MomentReport(
        rows=rows,
        ks=(1, 2, 4),
        tolerance=1e-8,
        max_tail_bound=5e-9,
        even_source="afe2",
        primary_only=False,
        leading_constant=0.001,
    )


def _verification(passed: bool) -> VerificationReport:
    row = VerificationRow(
        identity="zeta_K(0) = -1/4",
        parameters="s=0",
        direct=-0.25,
        closed=-0.25 if passed else 0.0,
        difference=0.0 if passed else 0.25,
        tolerance=1e-12,
        passed=passed,
    )
    return VerificationReport(suite=Suite.ZSERIES, options=SuiteOptions(), rows=[row])


def test_researcher_can_convert_a_model_to_an_item():
    """As a researcher, I want any result model rendered as Collection+JSON data
    so that reports carry field names, prompts and JSON types"""

    class Sample(BaseModel):
        x: int = Field(title="X")
        value: float | None = None
        label: str = "run"

    item = cj_models.model_to_item(Sample(x=5, value=None), href="sample:5")
    data = {entry.name: entry for entry in item.data}
    assert item.href == "sample:5"
    assert data["x"].value == 5
    assert data["x"].prompt == "X"
    assert data["x"].type == "integer"
    assert data["value"].type == "number"
    assert data["value"].value is None
    assert data["label"].prompt == "Label"
    assert data["label"].type == "string"


def test_researcher_can_build_a_collection():
    """As a researcher, I want rows, artefacts and the replay template in one document
    so that every run is self-describing"""
    doc = ReportBuilder().create_collection_json(
        title="Moments",
        items=_report().rows,
        item_href=lambda row: f"moments:X={row.x}",
        links=[LinkDef("moments.csv", "csv", "text/csv", "Moment table")],
        templates=[("run-config", RunConfig())],
    )
    data = json.loads(doc.to_json())
    assert is_valid_collection_json_response(data)
    assert data["collection"]["href"] == "hecke-moments:moments"
    assert data["collection"]["items"][1]["href"] == "moments:X=1000"
    assert data["collection"]["links"] == [
        {"rel": "csv", "href": "moments.csv", "prompt": "Moment table", "media_type": "text/csv"}
    ]
    template = data["template"][0]
    assert template["name"] == "run-config"
    assert template["prompt"] == "Replay this run"
    assert item_values(template)["grid"] == [100, 1000, 10000]


def test_moments_document_echoes_the_configuration():
    """As a researcher, I want the moments report to carry its configuration
    so that the run can be replayed from the JSON alone"""
    config = RunConfig(grid=(100, 1000), workers=3)
    doc = json.loads(moments_document(_report(), config, [LinkDef("moments.csv", "csv")]).to_json())
    assert is_valid_collection_json_response(doc)
    rows = [item_values(item) for item in doc["collection"]["items"]]
    assert [row["x"] for row in rows] == [100, 1000]
    assert rows[0]["s3"] is None
    assert rows[1]["ratio4"] == 0.5
    assert item_values(doc["template"][0])["workers"] == 3
    assert "error" not in doc


def test_moments_csv_has_a_fixed_header_and_empty_cells_for_skipped_orders():
    """As a researcher, I want a plain CSV with blank cells for orders not computed
    so that spreadsheets and gnuplot read it directly"""
    text = moments_csv(_report())
    assert tuple(MOMENTS_HEADER) == CSV_HEADER
    rows = read_moments_csv(text)
    assert len(rows) == 2
    assert rows[0]["X"] == "100"
    assert rows[0]["S3"] == ""
    assert float(rows[0]["S2"]) == 120.25
    assert text.endswith("\n")


def test_verification_document_reports_failures():
    """As a researcher, I want failed suites flagged in the JSON error block
    so that automation can tell pass from fail without parsing rows"""
    ok = json.loads(verification_document(_verification(True)).to_json())
    assert is_valid_collection_json_response(ok)
    assert "error" not in ok
    assert item_values(ok["collection"]["items"][0])["identity"] == "zeta_K(0) = -1/4"

    failed = json.loads(verification_document(_verification(False)).to_json())
    assert is_valid_collection_json_response(failed)
    assert failed["error"]["code"] == 1
    assert "1 of 1 rows failed" in failed["error"]["message"]


def test_error_document_names_the_exception():
    """As a researcher, I want aborted runs to leave an error document
    so that a batch system records why the run stopped"""
    doc = json.loads(error_document("Moments", 3, ToleranceError("tail too large")).to_json())
    assert is_valid_collection_json_response(doc)
    assert doc["error"] == {"title": "ToleranceError", "code": 3, "message": "tail too large"}
    assert doc["collection"]["items"] == []


def test_plot_script_reads_only_the_csv(tmp_path):
    """As a researcher, I want a gnuplot script next to the CSV
    so that the ratio column can be plotted without extra tooling"""
    script = render_ratio_plot("moments.csv")
    assert 'plot "moments.csv" using (log($1)):7' in script
    assert 'set datafile separator ","' in script
    assert script.endswith("\n")
    path = write_ratio_plot(tmp_path / "moments.csv", tmp_path / "ratio_plot.gp")
    assert path.read_text(encoding="utf-8") == script
