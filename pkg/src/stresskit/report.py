"""Apply a trained model to a post corpus and build the corpus-level
stress report: per-group stress percentages, academic-year monthly series,
upvote statistics, top stressed-text words, and emotion summaries.

Months are bucketed September through August to match the academic year.
The upvote median uses the mean-of-two convention for even counts by
default and the standard deviation is the population form; both choices
are recorded in the report metadata.
"""

from __future__ import annotations

import csv
import json
import logging
import statistics
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import classify, emotion, textprep
from .corpus import PostRecord
from .errors import FingerprintMismatchWarning, StressKitError
from .features import vectorize

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

MONTHS = ("Sep", "Oct", "Nov", "Dec", "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug")

OTHER_GROUP = "other"

DEFAULT_GROUP_MAP: Mapping[str, str] = {
    "r/csMajors": "Bachelor students",
    "r/EngineeringStudents": "Bachelor students",
    "r/GradSchool": "Graduate students",
    "r/PhD": "PhD students",
    "r/Professors": "Professors",
}


class UnknownFormat(StressKitError):
    pass


@dataclass(frozen=True)
class ClassifiedPost:
    post: PostRecord
    label: int
    score: float  # probability (logistic, naive bayes) or margin (svm)
    emotions: emotion.EmotionProfile | None = None


@dataclass(frozen=True)
class UpvoteStats:
    mean: float
    median: float
    std: float
    n: int


@dataclass(frozen=True)
class MonthlySeries:
    counts: tuple[int, ...]  # 12 buckets, September first
    unknown: int = 0


@dataclass(frozen=True)
class WhiskerStats:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    outliers: tuple[float, ...]


@dataclass(frozen=True)
class EmotionSummary:
    monthly: Mapping[str, tuple[float | None, ...]]  # affect -> 12 means
    whisker: Mapping[str, WhiskerStats]


@dataclass(frozen=True)
class GroupReport:
    name: str
    total: int
    stressed: int
    stressed_pct: float
    not_stressed_pct: float
    monthly: MonthlySeries
    upvotes: Mapping[str, UpvoteStats | None]  # keys: stressed, not_stressed
    top_words: tuple[tuple[str, int], ...]
    emotions: EmotionSummary | None


@dataclass(frozen=True)
class StressReport:
    groups: tuple[GroupReport, ...]
    overall_mean_stress_pct: int
    model: Mapping[str, str]
    metadata: Mapping[str, object]


def month_index(when: datetime) -> int:
    """Academic-year bucket: September is 0, August is 11."""
    return (when.month - 9) % 12


def classify_corpus(
    model: classify.Model,
    posts: Sequence[PostRecord],
    config: textprep.PipelineConfig,
    *,
    lexicon: emotion.EmotionLexicon | None = None,
    emotions_for_all: bool = False,
    jobs: int = 1,
) -> list[ClassifiedPost]:
    """One ClassifiedPost per input, in order. Classification input text is
    the title and body joined with one space. Emotion profiles are computed
    for stressed posts only unless emotions_for_all is set."""
    if model.pipeline_fingerprint and model.pipeline_fingerprint != config.fingerprint():
        warnings.warn(
            "model was trained under a different preprocessing configuration",
            FingerprintMismatchWarning,
            stacklevel=2,
        )

    def one(post: PostRecord) -> ClassifiedPost:
        doc = textprep.preprocess(post.text, config)
        vec = vectorize(doc, model.vocabulary, model.feature_kind)
        pred = classify.predict(model, vec)
        profile = None
        if lexicon is not None and (pred.label == 1 or emotions_for_all):
            profile = emotion.score_emotions(post.text, lexicon)
        return ClassifiedPost(post=post, label=pred.label, score=pred.score, emotions=profile)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, posts))
    return [one(post) for post in posts]


def group_of(post: PostRecord, group_map: Mapping[str, str]) -> str:
    return group_map.get(post.community, OTHER_GROUP)


def stress_summary(
    classified: Sequence[ClassifiedPost],
    group_map: Mapping[str, str],
) -> dict[str, dict[str, float | int]]:
    """Per-group totals and percentages (rounded to 0.1). Communities not
    in the map are routed to the "other" group."""
    rows: dict[str, dict[str, float | int]] = {}
    unmapped = sorted(
        {item.post.community for item in classified} - set(group_map)
    )
    if unmapped:
        log.warning("unmapped communities routed to %r: %s", OTHER_GROUP, unmapped)
    for item in classified:
        group = group_of(item.post, group_map)
        row = rows.setdefault(group, {"total": 0, "stressed": 0})
        row["total"] += 1
        row["stressed"] += item.label
    for row in rows.values():
        total, stressed = row["total"], row["stressed"]
        row["stressed_pct"] = round(100.0 * stressed / total, 1)
        row["not_stressed_pct"] = round(100.0 * (total - stressed) / total, 1)
    return dict(sorted(rows.items()))


def mean_stress_pct(group_percentages: Sequence[float]) -> int:
    """Unweighted mean of group stressed-percentages, whole-percent."""
    return round(sum(group_percentages) / len(group_percentages))


def monthly_distribution(classified: Sequence[ClassifiedPost]) -> MonthlySeries:
    """Counts of stressed items per academic-year month bucket."""
    counts = [0] * 12
    unknown = 0
    for item in classified:
        if item.label != 1:
            continue
        when = item.post.date
        if when is None:
            unknown += 1
            continue
        counts[month_index(when)] += 1
    return MonthlySeries(counts=tuple(counts), unknown=unknown)


def upvote_stats(
    classified: Sequence[ClassifiedPost],
    *,
    median_convention: str = "mean_of_two",
) -> dict[str, UpvoteStats | None]:
    """Mean, median and population std of scores per stress class."""
    if median_convention not in ("mean_of_two", "lower"):
        raise ValueError(f"unknown median convention {median_convention!r}")
    out: dict[str, UpvoteStats | None] = {}
    for key, wanted in (("stressed", 1), ("not_stressed", 0)):
        scores = sorted(item.post.score for item in classified if item.label == wanted)
        if not scores:
            out[key] = None
            continue
        if median_convention == "mean_of_two":
            median = float(statistics.median(scores))
        else:
            median = float(statistics.median_low(scores))
        out[key] = UpvoteStats(
            mean=statistics.fmean(scores),
            median=median,
            std=statistics.pstdev(scores),
            n=len(scores),
        )
    return out


def top_words(
    classified: Sequence[ClassifiedPost],
    n: int,
    config: textprep.PipelineConfig,
) -> list[tuple[str, int]]:
    """Most frequent preprocessed tokens over stressed texts; count
    descending, ties alphabetical."""
    if n < 1:
        raise ValueError("n must be at least 1")
    counts: dict[str, int] = {}
    for item in classified:
        if item.label != 1:
            continue
        for token in textprep.preprocess(item.post.text, config).split():
            counts[token] = counts.get(token, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]


def _five_number(values: Sequence[float]) -> WhiskerStats:
    arr = np.asarray(values, dtype=float)
    q1, med, q3 = (float(np.percentile(arr, q)) for q in (25, 50, 75))
    iqr = q3 - q1
    low, high = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    outliers = tuple(float(v) for v in arr if v < low or v > high)
    return WhiskerStats(
        minimum=float(arr.min()),
        q1=q1,
        median=med,
        q3=q3,
        maximum=float(arr.max()),
        outliers=outliers,
    )


def emotion_summary(
    classified: Sequence[ClassifiedPost],
    lexicon: emotion.EmotionLexicon,
    affects: Sequence[str] = emotion.NEGATIVE_AFFECTS,
) -> EmotionSummary:
    """Per-month mean affect frequency and a five-number whisker summary
    (outliers beyond 1.5 IQR) over stressed items."""
    per_month: dict[str, list[list[float]]] = {a: [[] for _ in range(12)] for a in affects}
    overall: dict[str, list[float]] = {a: [] for a in affects}
    for item in classified:
        if item.label != 1:
            continue
        profile = item.emotions
        if profile is None:
            profile = emotion.score_emotions(item.post.text, lexicon)
        bucket = month_index(item.post.date)
        for affect in affects:
            value = profile.get(affect)
            per_month[affect][bucket].append(value)
            overall[affect].append(value)
    monthly = {
        affect: tuple(
            (sum(vals) / len(vals)) if vals else None for vals in per_month[affect]
        )
        for affect in affects
    }
    whisker = {
        affect: _five_number(vals) for affect, vals in overall.items() if vals
    }
    return EmotionSummary(monthly=monthly, whisker=whisker)


def build_report(
    classified: Sequence[ClassifiedPost],
    group_map: Mapping[str, str],
    *,
    config: textprep.PipelineConfig,
    lexicon: emotion.EmotionLexicon | None = None,
    top_n: int = 10,
    model_kind: str = "",
    model_fingerprint: str = "",
    median_convention: str = "mean_of_two",
    seed: int | None = None,
) -> StressReport:
    summary = stress_summary(classified, group_map)
    by_group: dict[str, list[ClassifiedPost]] = {}
    for item in classified:
        by_group.setdefault(group_of(item.post, group_map), []).append(item)
    groups = []
    for name in sorted(summary):
        members = by_group[name]
        row = summary[name]
        groups.append(
            GroupReport(
                name=name,
                total=int(row["total"]),
                stressed=int(row["stressed"]),
                stressed_pct=float(row["stressed_pct"]),
                not_stressed_pct=float(row["not_stressed_pct"]),
                monthly=monthly_distribution(members),
                upvotes=upvote_stats(members, median_convention=median_convention),
                top_words=tuple(top_words(members, top_n, config)),
                emotions=emotion_summary(members, lexicon) if lexicon else None,
            )
        )
    overall = mean_stress_pct([g.stressed_pct for g in groups]) if groups else 0
    metadata: dict[str, object] = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "classification_text": "title+body",
        "upvote_median": median_convention,
        "upvote_std": "population",
        "monthly_order": "Sep..Aug",
        "binarization": "stressed iff weighted mean < 0",
        "lexicon_version": lexicon.version if lexicon else None,
        "preprocessing_fingerprint": config.fingerprint(),
    }
    if seed is not None:
        metadata["seed"] = seed
    return StressReport(
        groups=tuple(groups),
        overall_mean_stress_pct=overall,
        model={"kind": model_kind, "fingerprint": model_fingerprint},
        metadata=metadata,
    )


def _upvotes_json(stats: UpvoteStats | None):
    if stats is None:
        return None
    return {"mean": stats.mean, "median": stats.median, "std": stats.std, "n": stats.n}


def report_to_json(report: StressReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "model": dict(report.model),
        "groups": [
            {
                "name": g.name,
                "total": g.total,
                "stressed": g.stressed,
                "stressed_pct": g.stressed_pct,
                "not_stressed_pct": g.not_stressed_pct,
                "monthly": list(g.monthly.counts),
                "monthly_unknown": g.monthly.unknown,
                "upvotes": {
                    "stressed": _upvotes_json(g.upvotes["stressed"]),
                    "not_stressed": _upvotes_json(g.upvotes["not_stressed"]),
                },
                "top_words": [[token, count] for token, count in g.top_words],
                "emotions": None
                if g.emotions is None
                else {
                    "monthly": {a: list(v) for a, v in g.emotions.monthly.items()},
                    "whisker": {
                        a: {
                            "min": w.minimum,
                            "q1": w.q1,
                            "median": w.median,
                            "q3": w.q3,
                            "max": w.maximum,
                            "outliers": list(w.outliers),
                        }
                        for a, w in g.emotions.whisker.items()
                    },
                },
            }
            for g in report.groups
        ],
        "overall": {"mean_stress_pct": report.overall_mean_stress_pct},
        "metadata": dict(report.metadata),
    }


def emit_report(report: StressReport, format: str, path: str | Path) -> list[Path]:
    """JSON: one document at `path`. CSV: one file per table under the
    `path` directory. Returns the written paths."""
    if format not in ("json", "csv"):
        raise UnknownFormat(f"unknown report format {format!r} (expected json or csv)")
    if format == "json":
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(report_to_json(report), indent=2) + "\n", encoding="utf-8")
        return [target]
    outdir = Path(path)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def table(name: str, header: list[str], rows: list[list]) -> None:
        target = outdir / name
        with open(target, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
        written.append(target)

    table(
        "summary.csv",
        ["group", "total", "stressed", "stressed_pct", "not_stressed_pct"],
        [
            [g.name, g.total, g.stressed, g.stressed_pct, g.not_stressed_pct]
            for g in report.groups
        ],
    )
    table(
        "monthly.csv",
        ["group", *MONTHS, "unknown"],
        [[g.name, *g.monthly.counts, g.monthly.unknown] for g in report.groups],
    )
    upvote_rows = []
    for g in report.groups:
        for cls in ("stressed", "not_stressed"):
            stats = g.upvotes[cls]
            if stats is None:
                upvote_rows.append([g.name, cls, "", "", "", 0])
            else:
                upvote_rows.append([g.name, cls, stats.mean, stats.median, stats.std, stats.n])
    table("upvotes.csv", ["group", "class", "mean", "median", "std", "n"], upvote_rows)
    table(
        "top_words.csv",
        ["group", "rank", "token", "count"],
        [
            [g.name, rank, token, count]
            for g in report.groups
            for rank, (token, count) in enumerate(g.top_words, start=1)
        ],
    )
    emotion_rows = []
    for g in report.groups:
        if g.emotions is None:
            continue
        for affect, means in sorted(g.emotions.monthly.items()):
            for month, value in zip(MONTHS, means):
                emotion_rows.append(
                    [g.name, affect, month, "" if value is None else value, "", "", "", "", "", ""]
                )
        for affect, w in sorted(g.emotions.whisker.items()):
            emotion_rows.append(
                [g.name, affect, "all", "", w.minimum, w.q1, w.median, w.q3, w.maximum,
                 len(w.outliers)]
            )
    table(
        "emotions.csv",
        ["group", "affect", "month", "mean", "min", "q1", "median", "q3", "max", "n_outliers"],
        emotion_rows,
    )
    return written


def load_group_map(path: str | Path) -> dict[str, str]:
    """CSV community,group."""
    mapping = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or set(reader.fieldnames) < {"community", "group"}:
            raise StressKitError(f"{path}: group map needs header community,group")
        for row in reader:
            mapping[row["community"]] = row["group"]
    return mapping
