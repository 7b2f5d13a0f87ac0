import csv
import io
from typing import Any

import jsonschema

_DATA = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "name": {"type": "string"},
            "value": {"type": ["boolean", "integer", "number", "string", "array", "null"]},
            "prompt": {"type": ["string", "null"]},
            "type": {"enum": ["boolean", "integer", "number", "string", "array"]},
        },
        "required": ["name"],
        "additionalProperties": False,
    },
}

_LINKS = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "rel": {"type": "string"},
            "href": {"type": "string"},
            "prompt": {"type": "string"},
            "media_type": {"type": "string"},
        },
        "required": ["rel", "href"],
        "additionalProperties": False,
    },
}

# Collection+JSON schema for report documents
CJ_SCHEMA = {
    "type": "object",
    "properties": {
        "collection": {
            "type": "object",
            "properties": {
                "version": {"type": "string"},
                "href": {"type": "string"},
                "title": {"type": "string"},
                "links": _LINKS,
                "items": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "href": {"type": "string"},
                            "rel": {"type": "string"},
                            "data": _DATA,
                            "links": _LINKS,
                        },
                        "required": ["href", "data"],
                    },
                },
            },
            "required": ["href", "title"],
        },
        "template": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "prompt": {"type": "string"},
                    "data": _DATA,
                },
                "required": ["name", "data"],
            },
        },
        "error": {
            "type": "object",
            "properties": {
                "title": {"type": "string"},
                "code": {"enum": [1, 2, 3]},
                "message": {"type": "string"},
            },
            "required": ["title", "code", "message"],
            "additionalProperties": False,
        },
    },
    "required": ["collection"],
}

MOMENTS_HEADER = ["X", "count", "S1", "S2", "S3", "S4", "ratio4", "seconds"]


def validate_collection_json(data: dict[str, Any]) -> bool:
    """Raises ValueError unless `data` is a well-formed report document."""
    try:
        jsonschema.validate(data, CJ_SCHEMA)
        return True
    except jsonschema.ValidationError as e:
        raise ValueError(f"Invalid Collection+JSON: {e.message}") from None


def is_valid_collection_json_response(response_data: dict[str, Any]) -> bool:
    """
    Check if report data is a valid Collection+JSON document.
    Returns True if valid, False otherwise.
    """
    try:
        validate_collection_json(response_data)
        return True
    except ValueError:
        return False


def item_values(item: dict[str, Any]) -> dict[str, Any]:
    """name -> value for one Collection+JSON item or template."""
    return {entry["name"]: entry.get("value") for entry in item["data"]}


def read_moments_csv(text: str) -> list[dict[str, str]]:
    """Parses moments.csv, checking the header and that every filled cell is numeric."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != MOMENTS_HEADER:
        raise ValueError(f"unexpected header {rows[0] if rows else None}")
    parsed = []
    for row in rows[1:]:
        for cell in row:
            if cell:
                float(cell)
        parsed.append(dict(zip(MOMENTS_HEADER, row)))
    return parsed
