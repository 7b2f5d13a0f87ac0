"""Collection+JSON documents for run reports.

A report is one collection: table rows become items, produced files become
links, and the configuration of the run is echoed as the template so that a
reader can replay it.
"""

from __future__ import annotations

from typing import Any, TypeAlias

from pydantic import BaseModel, ConfigDict, Field
from pydantic.types import StrictBool

DataValue: TypeAlias = StrictBool | int | float | str | list[Any] | None

_SCALAR_TYPES = {"boolean", "integer", "number", "string", "array"}


class Link(BaseModel):
    """A file written next to the report."""

    model_config = ConfigDict(frozen=True)

    rel: str
    href: str
    prompt: str | None = None
    media_type: str | None = None


class ItemData(BaseModel):
    name: str
    value: DataValue = Field(None, description="Field value, JSON encoded")
    prompt: str | None = Field(None, description="Column title shown to readers")
    type: str | None = Field(None, description="JSON type of the value")


class Item(BaseModel):
    href: str
    rel: str = "row"
    data: list[ItemData] = Field(default_factory=list)
    links: list[Link] = Field(default_factory=list)


class Collection(BaseModel):
    version: str = "1.0"
    href: str
    title: str
    links: list[Link] = Field(default_factory=list)
    items: list[Item] = Field(default_factory=list)


class Template(BaseModel):
    name: str
    prompt: str | None = None
    data: list[ItemData] = Field(default_factory=list)


class Error(BaseModel):
    """Why a run stopped; `code` is the process exit code."""

    title: str
    code: int
    message: str


class CollectionJson(BaseModel):
    collection: Collection
    template: list[Template] | None = Field(
        None, description="The run configuration that produced the collection"
    )
    error: Error | None = None

    def to_json(self) -> str:
        return self.model_dump_json(exclude_none=True, indent=2)


def _value_type(definition: dict[str, Any]) -> str | None:
    # Optional fields arrive as anyOf [T, null]; report the non-null member.
    options = definition.get("anyOf", [definition])
    for option in options:
        kind = option.get("type")
        if kind in _SCALAR_TYPES:
            return str(kind)
    return None


def _prompt(name: str, definition: dict[str, Any]) -> str:
    title = definition.get("title")
    if title and title != name.replace("_", " ").title():
        return str(title)
    return name.replace("_", " ").capitalize()


def model_to_item(model: BaseModel, href: str = "", links: list[Link] | None = None) -> Item:
    """One report row: every field of `model` with its value, prompt and JSON type."""
    properties = model.model_json_schema().get("properties", {})
    values = model.model_dump(mode="json")
    data = [
        ItemData(
            name=name,
            value=values.get(name),
            prompt=_prompt(name, definition),
            type=_value_type(definition),
        )
        for name, definition in properties.items()
    ]
    return Item(href=href, data=data, links=links or [])


def model_to_template(model: BaseModel, name: str, prompt: str | None = None) -> Template:
    return Template(name=name, prompt=prompt, data=model_to_item(model).data)
