"""Ingestion, validation and canonical serialization of API/mashup records.

Two on-disk formats are supported:

* ``json_lines``: one JSON object per line. A row is a mashup when it has
  ``kind == "mashup"`` or carries an ``api_ids`` key, otherwise an API.
* ``csv_pair``: a directory holding ``apis.csv`` and ``mashups.csv``. List
  columns (``api_ids``, ``successor_ids``) are ``;``-separated.

Records that look wrong are flagged, never dropped. Rows that cannot be
parsed at all land in :attr:`Dataset.errors`.
"""
from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .dates import DateLike, iso, to_day

STATUSES = ("available", "deprecated")

API_COLUMNS = (
    "id", "name", "start", "labeled_status", "deathpool_date", "endpoint_url",
    "primary_category", "description", "successor_ids",
)
MASHUP_COLUMNS = (
    "id", "name", "start", "labeled_status", "deathpool_date", "homepage_url",
    "primary_category", "api_ids", "description",
)
_REQUIRED = ("id", "name", "start", "labeled_status", "primary_category")

# flag classes
IMPLAUSIBLE_DEATH = "implausible_death"
DANGLING_REFERENCE = "dangling_reference"
EMPTY_COMPOSITION = "empty_composition"
MISSING_CATEGORY = "missing_category"
FLAG_CLASSES = (IMPLAUSIBLE_DEATH, DANGLING_REFERENCE, EMPTY_COMPOSITION, MISSING_CATEGORY)

DEFAULT_TRUST_WINDOW = (to_day("2018-01-01"), to_day("2020-12-31"))


class DatasetError(Exception):
    """Fatal ingestion problem."""


class SchemaError(DatasetError):
    pass


class DuplicateIdError(DatasetError):
    def __init__(self, entity_id, first_row, second_row):
        self.entity_id = entity_id
        self.rows = (first_row, second_row)
        super().__init__(
            f"duplicate id {entity_id!r}: row {first_row[0]} {first_row[1]!r} "
            f"and row {second_row[0]} {second_row[1]!r}"
        )


@dataclass(frozen=True)
class ApiRecord:
    id: str
    name: str
    start: int
    labeled_status: str = "available"
    deathpool_date: int | None = None
    endpoint_url: str | None = None
    primary_category: str = ""
    description: str = ""
    successor_ids: tuple[str, ...] = ()

    kind = "api"


@dataclass(frozen=True)
class MashupRecord:
    id: str
    name: str
    start: int
    labeled_status: str = "available"
    deathpool_date: int | None = None
    homepage_url: str | None = None
    primary_category: str = ""
    api_ids: tuple[str, ...] = ()
    description: str = ""

    kind = "mashup"


@dataclass(frozen=True)
class RowError:
    source: str
    line: int
    message: str
    raw: str = ""


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of API and mashup records plus their flags."""

    apis: Mapping[str, ApiRecord]
    mashups: Mapping[str, MashupRecord]
    metadata: Mapping[str, object] = field(default_factory=dict)
    errors: tuple[RowError, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "apis", MappingProxyType(dict(self.apis)))
        object.__setattr__(self, "mashups", MappingProxyType(dict(self.mashups)))
        meta = dict(self.metadata)
        meta.setdefault("source", "")
        meta.setdefault("snapshot_date", None)
        meta["n_apis"] = len(self.apis)
        meta["n_mashups"] = len(self.mashups)
        object.__setattr__(self, "metadata", MappingProxyType(meta))
        object.__setattr__(self, "_flags", _compute_flags(self))

    @property
    def counts(self) -> tuple[int, int]:
        return len(self.apis), len(self.mashups)

    def flags(self, entity_id: str) -> frozenset[str]:
        return self._flags.get(entity_id, frozenset())

    def record(self, entity_id: str):
        if entity_id in self.apis:
            return self.apis[entity_id]
        return self.mashups[entity_id]

    def __iter__(self):
        yield from self.apis.values()
        yield from self.mashups.values()

    def __len__(self):
        return len(self.apis) + len(self.mashups)


def _compute_flags(ds: Dataset) -> dict[str, frozenset[str]]:
    flags: dict[str, set[str]] = {}
    for rec in ds:
        f = set()
        if rec.deathpool_date is not None and rec.deathpool_date < rec.start:
            f.add(IMPLAUSIBLE_DEATH)
        if not rec.primary_category.strip():
            f.add(MISSING_CATEGORY)
        if rec.kind == "mashup":
            if not rec.api_ids:
                f.add(EMPTY_COMPOSITION)
            if any(a not in ds.apis for a in rec.api_ids):
                f.add(DANGLING_REFERENCE)
        if f:
            flags[rec.id] = frozenset(f)
    return flags


# ---------------------------------------------------------------- parsing

def _opt(value) -> str | None:
    if value is None:
        return None
    value = str(value).strip()
    return value or None


def _id_list(value) -> tuple[str, ...]:
    if value is None:
        return ()
    if isinstance(value, str):
        value = value.split(";")
    return tuple(v.strip() for v in value if v and str(v).strip())


def _make_record(row: Mapping, kind: str):
    missing = [k for k in _REQUIRED if row.get(k) in (None, "") and k != "primary_category"]
    if missing:
        raise ValueError(f"missing required field(s): {', '.join(missing)}")
    status = str(row["labeled_status"]).strip().lower()
    if status not in STATUSES:
        raise ValueError(f"labeled_status must be one of {STATUSES}, got {status!r}")
    dp = _opt(row.get("deathpool_date"))
    common = dict(
        id=str(row["id"]).strip(),
        name=str(row["name"]),
        start=to_day(row["start"]),
        labeled_status=status,
        deathpool_date=None if dp is None else to_day(dp),
        primary_category=str(row.get("primary_category") or "").strip(),
        description=str(row.get("description") or ""),
    )
    if kind == "mashup":
        return MashupRecord(
            homepage_url=_opt(row.get("homepage_url")),
            api_ids=_id_list(row.get("api_ids")),
            **common,
        )
    return ApiRecord(
        endpoint_url=_opt(row.get("endpoint_url")),
        successor_ids=_id_list(row.get("successor_ids")),
        **common,
    )


def _row_kind(row: Mapping) -> str:
    kind = row.get("kind")
    if kind in ("api", "mashup"):
        return kind
    return "mashup" if "api_ids" in row else "api"


def _collect(rows: Iterable[tuple[str, int, str, Mapping | None, str | None]], source):
    """Build a Dataset from ``(source, line, raw, row_or_None, kind)`` tuples."""
    apis: dict[str, ApiRecord] = {}
    mashups: dict[str, MashupRecord] = {}
    seen: dict[str, tuple[int, str]] = {}
    errors: list[RowError] = []
    for src, line, raw, row, kind in rows:
        if row is None:
            errors.append(RowError(src, line, "unparseable row", raw))
            continue
        try:
            rec = _make_record(row, kind or _row_kind(row))
        except (ValueError, TypeError, KeyError) as exc:
            errors.append(RowError(src, line, str(exc), raw))
            continue
        if rec.id in seen:
            raise DuplicateIdError(rec.id, seen[rec.id], (line, raw))
        seen[rec.id] = (line, raw)
        (mashups if rec.kind == "mashup" else apis)[rec.id] = rec
    return Dataset(apis, mashups, {"source": str(source)}, tuple(errors))


def _read_json_lines(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    rows = []
    n_objects = 0
    for i, line in enumerate(text.split("\n"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            obj = None
        if obj is not None and not isinstance(obj, dict):
            obj = None
        if obj is not None and "id" in obj:
            n_objects += 1
        rows.append((str(path), i, line, obj, None))
    if rows and n_objects == 0:
        raise SchemaError(f"{path}: no line is a JSON object with an 'id' key")
    return rows


def _read_csv(path: Path, kind: str, columns):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        need = set(_REQUIRED) | ({"api_ids"} if kind == "mashup" else set())
        if not need <= set(header):
            raise SchemaError(f"{path}: header lacks {sorted(need - set(header))}")
        rows = []
        for row in reader:
            raw = ",".join("" if v is None else str(v) for v in row.values())
            ok = None not in row and all(v is not None for v in row.values())
            rows.append((str(path), reader.line_num, raw, row if ok else None, kind))
    return rows


def parse_dataset(path: str | os.PathLike, format: str = "json_lines") -> Dataset:
    """Read a dataset file (``json_lines``) or directory (``csv_pair``).

    Raises :class:`DatasetError` for unreadable input, :class:`SchemaError`
    when the file does not look like the declared format and
    :class:`DuplicateIdError` on repeated ids.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if format == "json_lines":
        rows = _read_json_lines(path)
    elif format == "csv_pair":
        base = path if path.is_dir() else path.parent
        for name in ("apis.csv", "mashups.csv"):
            if not (base / name).exists():
                raise FileNotFoundError(base / name)
        rows = _read_csv(base / "apis.csv", "api", API_COLUMNS)
        rows += _read_csv(base / "mashups.csv", "mashup", MASHUP_COLUMNS)
    else:
        raise ValueError(f"unknown format {format!r}")
    return _collect(rows, path)


def from_records(records: Iterable, source: str = "memory") -> Dataset:
    """Build a Dataset from record objects, enforcing id uniqueness."""
    apis, mashups = {}, {}
    for n, rec in enumerate(records):
        if rec.id in apis or rec.id in mashups:
            raise DuplicateIdError(rec.id, (None, rec.id), (n, rec.id))
        (mashups if rec.kind == "mashup" else apis)[rec.id] = rec
    return Dataset(apis, mashups, {"source": source})


# ---------------------------------------------------------- serialization

def record_to_dict(rec) -> dict:
    d = {
        "kind": rec.kind,
        "id": rec.id,
        "name": rec.name,
        "start": iso(rec.start),
        "labeled_status": rec.labeled_status,
        "deathpool_date": iso(rec.deathpool_date),
        "primary_category": rec.primary_category,
        "description": rec.description,
    }
    if rec.kind == "api":
        d["endpoint_url"] = rec.endpoint_url
        d["successor_ids"] = list(rec.successor_ids)
    else:
        d["homepage_url"] = rec.homepage_url
        d["api_ids"] = list(rec.api_ids)
    return d


def record_from_dict(d: Mapping):
    return _make_record(d, _row_kind(d))


def write_json_lines(ds: Dataset, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in ds:
            fh.write(json.dumps(record_to_dict(rec), sort_keys=True, ensure_ascii=False) + "\n")


def write_csv_pair(ds: Dataset, directory: str | os.PathLike) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, columns, recs in (
        ("apis.csv", API_COLUMNS, ds.apis.values()),
        ("mashups.csv", MASHUP_COLUMNS, ds.mashups.values()),
    ):
        with open(directory / name, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
            w.writeheader()
            for rec in recs:
                d = record_to_dict(rec)
                row = {}
                for c in columns:
                    v = d.get(c)
                    row[c] = ";".join(v) if isinstance(v, list) else ("" if v is None else v)
                w.writerow(row)


def serialize(ds: Dataset, path: str | os.PathLike, format: str = "json_lines") -> None:
    if format == "json_lines":
        write_json_lines(ds, path)
    elif format == "csv_pair":
        write_csv_pair(ds, path)
    else:
        raise ValueError(f"unknown format {format!r}")


# ------------------------------------------------------------- validation

@dataclass(frozen=True)
class ValidationReport:
    counts: Mapping[str, int]
    ids: Mapping[str, tuple[str, ...]]
    row_errors: tuple[RowError, ...] = ()

    def __bool__(self):
        return bool(self.counts) or bool(self.row_errors)

    def to_dict(self) -> dict:
        return {
            "counts": dict(self.counts),
            "ids": {k: list(v) for k, v in self.ids.items()},
            "row_errors": [
                {"source": e.source, "line": e.line, "message": e.message}
                for e in self.row_errors
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def validate(ds: Dataset) -> ValidationReport:
    """Summarize record flags. Empty classes are omitted; ``ds`` is untouched."""
    ids: dict[str, list[str]] = {}
    for rec in ds:
        for flag in sorted(ds.flags(rec.id)):
            ids.setdefault(flag, []).append(rec.id)
    ids = {k: tuple(sorted(v)) for k, v in sorted(ids.items())}
    counts = {k: len(v) for k, v in ids.items()}
    return ValidationReport(counts, ids, tuple(ds.errors))


def deathpool_window(
    ds: Dataset,
    start: DateLike = DEFAULT_TRUST_WINDOW[0],
    end: DateLike = DEFAULT_TRUST_WINDOW[1],
    kind: str = "api",
) -> list[int]:
    """Longevity samples (days) for deathpool entries dated inside ``[start, end]``.

    ``kind`` is ``"api"``, ``"mashup"`` or ``"all"``. Implausible deaths and
    negative longevities are excluded.
    """
    lo, hi = to_day(start), to_day(end)
    if lo > hi:
        raise ValueError("window start after window end")
    if kind == "api":
        recs = ds.apis.values()
    elif kind == "mashup":
        recs = ds.mashups.values()
    elif kind == "all":
        recs = list(ds)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    out = []
    for rec in recs:
        dp = rec.deathpool_date
        if dp is None or not lo <= dp <= hi or IMPLAUSIBLE_DEATH in ds.flags(rec.id):
            continue
        days = dp - rec.start
        if days >= 0:
            out.append(days)
    return out
