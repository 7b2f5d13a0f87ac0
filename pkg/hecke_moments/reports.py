"""Run artefacts: Collection+JSON documents for moments and verification runs, and moments.csv."""

import csv
import io
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from .cj_models import (
    Collection,
    CollectionJson,
    Error,
    Item,
    Link,
    Template,
    model_to_item,
    model_to_template,
)
from .config import RunConfig
from .moments import MomentReport
from .suites import VerificationReport

CSV_HEADER = ("X", "count", "S1", "S2", "S3", "S4", "ratio4", "seconds")


@dataclass
class LinkDef:
    """An artefact written next to the report, addressed relative to it."""

    path: str
    rel: str
    media_type: str | None = None
    prompt: str | None = None

    def to_link(self) -> Link:
        return Link(rel=self.rel, href=self.path, prompt=self.prompt, media_type=self.media_type)


class ReportBuilder:
    """Assembles result rows, artefact links and the replay template into one document."""

    def __init__(self, base_href: str = "hecke-moments:"):
        self.base_href = base_href

    def create_collection_json(
        self,
        title: str,
        href: str | None = None,
        items: Sequence[BaseModel | Item] | None = None,
        item_href: Callable[[Any], str] | None = None,
        links: Sequence[Link | LinkDef] | None = None,
        templates: Sequence[Template | tuple[str, BaseModel]] | None = None,
        error: Error | None = None,
    ) -> CollectionJson:
        """
        Build the report for one run.

        `items` are table rows, as result models or finished items; `item_href`
        names each row. `templates` holds configurations to echo, either as
        ready templates or as (name, model) pairs. The collection href defaults
        to the base href followed by the slugged title.
        """
        collection = Collection(
            href=href or f"{self.base_href}{title.lower().replace(' ', '-')}",
            title=title,
            items=self._rows(items or [], item_href),
            links=[link if isinstance(link, Link) else link.to_link() for link in links or []],
        )
        replay = self._replay_templates(templates or [])
        return CollectionJson(collection=collection, template=replay or None, error=error)

    @staticmethod
    def _rows(rows: Sequence[BaseModel | Item], name_row: Callable[[Any], str] | None) -> list[Item]:
        return [
            row if isinstance(row, Item) else model_to_item(row, href=name_row(row) if name_row else "")
            for row in rows
        ]

    @staticmethod
    def _replay_templates(templates: Sequence[Template | tuple[str, BaseModel]]) -> list[Template]:
        replay: list[Template] = []
        for template in templates:
            if isinstance(template, Template):
                replay.append(template)
                continue
            name, config = template
            replay.append(model_to_template(config, name=name, prompt="Replay this run"))
        return replay


def _cell(value: float | int | None) -> str:
    # str() of a float is its shortest round-tripping repr.
    return "" if value is None else str(value)


def moments_csv(report: MomentReport, timings: bool = False) -> str:
    """The grid as CSV; seconds stay blank unless `timings` is set (the JSON report always has them)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        writer.writerow(
            [_cell(v) for v in (row.x, row.count, row.s1, row.s2, row.s3, row.s4, row.ratio4, row.seconds if timings else None)]
        )
    return buffer.getvalue()


def write_moments_csv(report: MomentReport, path: Path, timings: bool = False) -> Path:
    path.write_text(moments_csv(report, timings), encoding="utf-8")
    return path


def moments_document(
    report: MomentReport, config: RunConfig, artefacts: Sequence[LinkDef] = ()
) -> CollectionJson:
    """Grid rows as items, the run configuration as template, artefacts as links."""
    return ReportBuilder().create_collection_json(
        title="Moments",
        items=report.rows,
        item_href=lambda row: f"moments:X={row.x}",
        links=list(artefacts),
        templates=[("run-config", config)],
    )


def verification_document(report: VerificationReport) -> CollectionJson:
    error = None
    if report.failed:
        error = Error(
            title="Verification failed",
            code=1,
            message=f"{report.failed} of {len(report.rows)} rows failed in suite {report.suite.value}",
        )
    return ReportBuilder().create_collection_json(
        title=f"Verify {report.suite.value}",
        items=report.rows,
        templates=[("suite-options", report.options)],
        error=error,
    )


def error_document(title: str, code: int, exc: BaseException) -> CollectionJson:
    return ReportBuilder().create_collection_json(
        title=title,
        error=Error(title=type(exc).__name__, code=code, message=str(exc)),
    )
