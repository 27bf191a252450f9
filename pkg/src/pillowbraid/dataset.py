"""Loading and validation of the shipped catalog document."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import CatalogError

CATALOG_NAME = "catalog.json"
SCHEMA_NAME = "catalog.schema.json"


def _read_resource(name: str) -> str:
    return resources.files("pillowbraid.data").joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def catalog_schema() -> dict:
    return json.loads(_read_resource(SCHEMA_NAME))


def validate_catalog(doc: dict) -> None:
    try:
        jsonschema.validate(doc, catalog_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise CatalogError(f"catalog invalid at {where}: {exc.message}") from None
    _check_references(doc)


def _check_references(doc: dict) -> None:
    nl = doc["arrangement"]["line_count"]
    for section in ("degenerate_Dt", "regenerated_Dt"):
        keys = {int(k) for k in doc[section]}
        if keys != set(range(1, nl + 1)):
            raise CatalogError(f"{section} must have one entry per line")
        for t, rec in doc[section].items():
            for p in rec["indices"]:
                if not 1 <= p < int(t):
                    raise CatalogError(f"{section}/{t}: index {p} not below {t}")
    covered = sorted(t for ts in doc["ctilde"].values() for t in ts)
    if covered != list(range(1, nl + 1)):
        raise CatalogError("ctilde groups must cover every line exactly once")


@lru_cache(maxsize=4)
def _load_cached(path: str | None) -> str:
    if path is None:
        return _read_resource(CATALOG_NAME)
    return Path(path).read_text(encoding="utf-8")


def load_catalog(path: str | Path | None = None, validate: bool = True) -> dict:
    """Parse (and by default validate) the catalog; a fresh dict on every call."""
    try:
        text = _load_cached(None if path is None else str(path))
    except OSError as exc:
        raise CatalogError(f"cannot read catalog: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog is not valid JSON: {exc}") from None
    if validate:
        validate_catalog(doc)
    return doc


def dump_catalog(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n"
