"""Corpus ingestion: labeled training examples and unlabeled post records
from CSV files (RFC-4180, UTF-8, header row mandatory).

Schema maps are explicit {logical field -> column name} dictionaries with
sensible defaults. Rows with empty text are skipped, not fatal; the skip
count is surfaced in the load summary. Unparseable labels/dates abort the
load with the offending row number.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

from .errors import StressKitError
from . import textprep

log = logging.getLogger(__name__)


class MissingColumn(StressKitError):
    pass


class BadLabel(StressKitError):
    pass


class BadDate(StressKitError):
    pass


class BadField(StressKitError):
    """A cell that should parse to a typed value (score, kind) does not."""


DEFAULT_LABELED_SCHEMA: Mapping[str, str] = {
    "id": "id",
    "text": "text",
    "label": "label",
    "domain": "domain",
}

DEFAULT_POSTS_SCHEMA: Mapping[str, str] = {
    "id": "id",
    "date": "date",
    "title": "title",
    "text": "text",
    "score": "score",
    "tag": "tag",
    "community": "community",
    "kind": "kind",
}

POST_KINDS = ("post", "comment")


@dataclass(frozen=True)
class LabeledExample:
    id: str
    text: str
    label: int
    domain: str | None = None

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        if not self.text.strip():
            raise ValueError("text is empty")


@dataclass(frozen=True)
class PostRecord:
    id: str
    date: datetime
    title: str
    body: str
    score: int
    community: str
    tag: str | None = None
    kind: str = "post"

    def __post_init__(self):
        if not self.community:
            raise ValueError("community is empty")
        if not (self.title.strip() or self.body.strip()):
            raise ValueError("title and body are both empty")
        if self.kind not in POST_KINDS:
            raise ValueError(f"kind must be one of {POST_KINDS}, got {self.kind!r}")

    @property
    def text(self) -> str:
        """Classification input: title and body joined with one space."""
        return f"{self.title} {self.body}".strip()


@dataclass
class LoadSummary:
    rows_read: int = 0
    rows_kept: int = 0
    rows_skipped: int = 0
    errors: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "rows_read": self.rows_read,
                "rows_kept": self.rows_kept,
                "rows_skipped": self.rows_skipped,
                "errors": self.errors,
            }
        )


@dataclass(frozen=True)
class CorpusStats:
    record_count: int
    per_community: Mapping[str, int]
    per_tag: Mapping[str, int]
    unique_words: int


def _resolve_schema(
    user_schema: Mapping[str, str] | None,
    defaults: Mapping[str, str],
    header: Sequence[str],
    required: Sequence[str],
) -> dict[str, str | None]:
    """Merge user schema over defaults and check the header.

    Required logical fields must resolve to a present column. Optional
    fields named explicitly by the user must also be present; defaulted
    optional columns that are absent are simply treated as all-missing.
    """
    user_schema = dict(user_schema or {})
    resolved: dict[str, str | None] = {}
    header_set = set(header)
    for logical, default_col in defaults.items():
        explicit = logical in user_schema
        column = user_schema.get(logical, default_col)
        if column in header_set:
            resolved[logical] = column
        elif logical in required or explicit:
            raise MissingColumn(
                f"column {column!r} (for field {logical!r}) not in header {list(header)}"
            )
        else:
            resolved[logical] = None
    return resolved


def _open_rows(path: str | Path):
    handle = open(path, newline="", encoding="utf-8")
    reader = csv.DictReader(handle)
    if reader.fieldnames is None:
        handle.close()
        raise MissingColumn(f"{path}: file has no header row")
    return handle, reader


def load_labeled_with_summary(
    path: str | Path,
    schema: Mapping[str, str] | None = None,
    *,
    true_labels: Sequence[str] = ("1",),
    false_labels: Sequence[str] = ("0",),
) -> tuple[list[LabeledExample], LoadSummary]:
    handle, reader = _open_rows(path)
    summary = LoadSummary()
    examples: list[LabeledExample] = []
    with handle:
        cols = _resolve_schema(
            schema, DEFAULT_LABELED_SCHEMA, reader.fieldnames, required=("text", "label")
        )
        for rownum, row in enumerate(reader, start=2):  # 1 is the header line
            summary.rows_read += 1
            text = (row.get(cols["text"]) or "").strip()
            if not text:
                summary.rows_skipped += 1
                summary.errors.append(f"row {rownum}: empty text (skipped)")
                log.warning("%s: row %d skipped: empty text", path, rownum)
                continue
            raw_label = (row.get(cols["label"]) or "").strip()
            if raw_label in true_labels:
                label = 1
            elif raw_label in false_labels:
                label = 0
            else:
                raise BadLabel(f"{path}: row {rownum}: label {raw_label!r} is not 0/1")
            example_id = (row.get(cols["id"]) or "").strip() if cols["id"] else ""
            domain = (row.get(cols["domain"]) or "").strip() if cols["domain"] else ""
            examples.append(
                LabeledExample(
                    id=example_id or str(rownum - 1),
                    text=text,
                    label=label,
                    domain=domain or None,
                )
            )
            summary.rows_kept += 1
    return examples, summary


def load_labeled(
    path: str | Path,
    schema: Mapping[str, str] | None = None,
    **kwargs,
) -> list[LabeledExample]:
    return load_labeled_with_summary(path, schema, **kwargs)[0]


def parse_date(cell: str) -> datetime:
    """ISO-8601 first, then integer epoch seconds; always returns UTC."""
    cell = cell.strip()
    iso = cell[:-1] + "+00:00" if cell.endswith("Z") else cell
    try:
        parsed = datetime.fromisoformat(iso)
    except ValueError:
        pass
    else:
        if parsed.tzinfo is None:
            parsed = parsed.replace(tzinfo=timezone.utc)
        return parsed.astimezone(timezone.utc)
    try:
        epoch = int(cell)
    except ValueError:
        raise BadDate(f"date {cell!r} is neither ISO-8601 nor epoch seconds")
    return datetime.fromtimestamp(epoch, tz=timezone.utc)


def iter_post_rows(
    path: str | Path,
    schema: Mapping[str, str] | None = None,
):
    """Yield (fieldnames, raw_row, record_or_None, skip_reason_or_None) per
    data row, preserving file order. Unparseable dates/fields abort."""
    handle, reader = _open_rows(path)
    with handle:
        cols = _resolve_schema(
            schema,
            DEFAULT_POSTS_SCHEMA,
            reader.fieldnames,
            required=("date", "text", "community"),
        )

        def cell(row, logical):
            col = cols[logical]
            return (row.get(col) or "").strip() if col else ""

        for rownum, row in enumerate(reader, start=2):
            title = cell(row, "title")
            body = cell(row, "text")
            if not (title or body):
                yield reader.fieldnames, row, None, f"row {rownum}: title and body both empty (skipped)"
                continue
            try:
                date = parse_date(cell(row, "date"))
            except BadDate as exc:
                raise BadDate(f"{path}: row {rownum}: {exc}") from None
            raw_score = cell(row, "score")
            try:
                score = int(raw_score) if raw_score else 0
            except ValueError:
                raise BadField(f"{path}: row {rownum}: score {raw_score!r} is not an integer")
            raw_kind = cell(row, "kind").lower()
            if raw_kind and raw_kind not in POST_KINDS:
                raise BadField(f"{path}: row {rownum}: kind {raw_kind!r} not in {POST_KINDS}")
            community = cell(row, "community")
            if not community:
                raise BadField(f"{path}: row {rownum}: community is empty")
            tag = cell(row, "tag")
            record_id = cell(row, "id")
            record = PostRecord(
                id=record_id or str(rownum - 1),
                date=date,
                title=title,
                body=body,
                score=score,
                community=community,
                tag=tag or None,
                kind=raw_kind or "post",
            )
            yield reader.fieldnames, row, record, None


def load_posts_with_summary(
    path: str | Path,
    schema: Mapping[str, str] | None = None,
) -> tuple[list[PostRecord], LoadSummary]:
    summary = LoadSummary()
    records: list[PostRecord] = []
    for _fields, _row, record, reason in iter_post_rows(path, schema):
        summary.rows_read += 1
        if record is None:
            summary.rows_skipped += 1
            summary.errors.append(reason)
            log.warning("%s: %s", path, reason)
            continue
        records.append(record)
        summary.rows_kept += 1
    return records, summary


def load_posts(path: str | Path, schema: Mapping[str, str] | None = None) -> list[PostRecord]:
    return load_posts_with_summary(path, schema)[0]


def write_labeled(examples: Sequence[LabeledExample], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "text", "label", "domain"])
        for ex in examples:
            writer.writerow([ex.id, ex.text, ex.label, ex.domain or ""])


def write_posts(records: Sequence[PostRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "date", "title", "text", "score", "tag", "community", "kind"])
        for rec in records:
            writer.writerow(
                [
                    rec.id,
                    rec.date.isoformat(),
                    rec.title,
                    rec.body,
                    rec.score,
                    rec.tag or "",
                    rec.community,
                    rec.kind,
                ]
            )


def corpus_stats(
    records: Sequence[PostRecord],
    config: textprep.PipelineConfig | None = None,
) -> CorpusStats:
    """Exact per-community/per-tag counts plus the distinct preprocessed
    token count across all titles and bodies."""
    config = config or textprep.PipelineConfig.default()
    per_community: dict[str, int] = {}
    per_tag: dict[str, int] = {}
    vocabulary: set[str] = set()
    for rec in records:
        per_community[rec.community] = per_community.get(rec.community, 0) + 1
        if rec.tag is not None:
            per_tag[rec.tag] = per_tag.get(rec.tag, 0) + 1
        vocabulary.update(textprep.preprocess(rec.text, config).split())
    return CorpusStats(
        record_count=len(records),
        per_community=dict(sorted(per_community.items())),
        per_tag=dict(sorted(per_tag.items())),
        unique_words=len(vocabulary),
    )
