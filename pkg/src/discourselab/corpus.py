"""Core data model: labeled posts, repost events, and calendar analysis windows.

Corpora arrive as line-delimited JSON, one record per line. Posts carry
pre-assigned opinion and emotion labels; records missing either label are
rejected at ingest because label inference happens upstream of this toolkit.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from calendar import monthrange
from dataclasses import dataclass
from datetime import datetime, timezone

OPINION_LABELS = ("pro", "neutral", "anti")
EMOTION_LABELS = ("Anger", "Confusion", "Depression", "Fatigue", "Tension", "Vigor", "Neutral")

POSTS_FORMAT = "posts"
REPOSTS_FORMAT = "reposts"


class DataFormatError(ValueError):
    """Raised when an input file fails validation beyond the configured tolerance."""


@dataclass(frozen=True, slots=True)
class PostRecord:
    post_id: str
    author_id: str
    timestamp: int
    tokens: tuple[str, ...]
    opinion: str
    emotion: str


@dataclass(frozen=True, slots=True)
class RepostRecord:
    reposter_id: str
    original_author_id: str
    timestamp: int


@dataclass(frozen=True, slots=True)
class AnalysisWindow:
    """A calendar-month span; start-inclusive, end-exclusive."""

    index: int
    start: int
    end: int
    months: int

    def contains(self, ts: int) -> bool:
        return self.start <= ts < self.end


@dataclass(frozen=True)
class LoadReport:
    path: str
    format: str
    accepted: int
    rejected: int
    dropped_self_reposts: int = 0


@dataclass(frozen=True)
class Corpus:
    posts: tuple[PostRecord, ...] = ()
    reposts: tuple[RepostRecord, ...] = ()

    def merged(self, other: "Corpus") -> "Corpus":
        return Corpus(self.posts + other.posts, self.reposts + other.reposts)

    def span(self) -> tuple[int, int]:
        """(earliest, latest) timestamp over posts and reposts."""
        stamps = [p.timestamp for p in self.posts]
        stamps += [r.timestamp for r in self.reposts]
        if not stamps:
            raise ValueError("empty corpus has no time span")
        return min(stamps), max(stamps)


def _parse_post(obj: dict) -> PostRecord:
    tokens = obj["tokens"]
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise ValueError("tokens must be a list of strings")
    opinion = obj["opinion"]
    if opinion not in OPINION_LABELS:
        raise ValueError(f"unknown opinion label {opinion!r}")
    emotion = obj["emotion"]
    if emotion not in EMOTION_LABELS:
        raise ValueError(f"unknown emotion label {emotion!r}")
    return PostRecord(
        post_id=str(obj["id"]),
        author_id=str(obj["author"]),
        timestamp=int(obj["ts"]),
        tokens=tuple(tokens),
        opinion=opinion,
        emotion=emotion,
    )


def _parse_repost(obj: dict) -> RepostRecord:
    return RepostRecord(
        reposter_id=str(obj["reposter"]),
        original_author_id=str(obj["author"]),
        timestamp=int(obj["ts"]),
    )


def load_corpus(path: str, format: str = POSTS_FORMAT,
                max_reject_fraction: float = 0.01) -> tuple[Corpus, LoadReport]:
    """Read one line-delimited JSON file into a Corpus.

    Invalid lines (bad JSON, missing keys, unknown labels, duplicate post ids)
    are counted and skipped; the load aborts if their fraction exceeds
    ``max_reject_fraction``. Self-reposts are valid lines that get dropped by
    rule and are reported separately.
    """
    if format not in (POSTS_FORMAT, REPOSTS_FORMAT):
        raise ValueError(f"unknown corpus format {format!r}")
    posts: list[PostRecord] = []
    reposts: list[RepostRecord] = []
    seen_ids: set[str] = set()
    total = rejected = dropped_self = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            total += 1
            try:
                obj = json.loads(line)
                if format == POSTS_FORMAT:
                    rec = _parse_post(obj)
                    if rec.post_id in seen_ids:
                        raise ValueError(f"duplicate post id {rec.post_id!r}")
                    seen_ids.add(rec.post_id)
                    posts.append(rec)
                else:
                    rep = _parse_repost(obj)
                    if rep.reposter_id == rep.original_author_id:
                        dropped_self += 1
                    else:
                        reposts.append(rep)
            except (ValueError, KeyError, TypeError):
                rejected += 1
    if total > 0 and rejected / total > max_reject_fraction:
        raise DataFormatError(
            f"{path}: {rejected}/{total} lines invalid, above the "
            f"{max_reject_fraction:.1%} tolerance"
        )
    report = LoadReport(path=str(path), format=format, accepted=len(posts) + len(reposts),
                        rejected=rejected, dropped_self_reposts=dropped_self)
    return Corpus(posts=tuple(posts), reposts=tuple(reposts)), report


def load_full_corpus(posts_path: str, reposts_path: str | None = None,
                     max_reject_fraction: float = 0.01) -> tuple[Corpus, list[LoadReport]]:
    """Load posts plus (optionally) reposts into one Corpus."""
    corpus, rep = load_corpus(posts_path, POSTS_FORMAT, max_reject_fraction)
    reports = [rep]
    if reposts_path is not None:
        more, rep2 = load_corpus(reposts_path, REPOSTS_FORMAT, max_reject_fraction)
        corpus = corpus.merged(more)
        reports.append(rep2)
    return corpus, reports


def _utc(ts: int) -> datetime:
    return datetime.fromtimestamp(ts, tz=timezone.utc)


def _epoch(dt: datetime) -> int:
    return int(dt.timestamp())


def _add_months(dt: datetime, n: int) -> datetime:
    month_index = dt.year * 12 + (dt.month - 1) + n
    year, month = divmod(month_index, 12)
    month += 1
    day = min(dt.day, monthrange(year, month)[1])
    return dt.replace(year=year, month=month, day=day)


def month_floor(ts: int) -> int:
    """Epoch seconds of the first instant of the UTC month containing ``ts``."""
    dt = _utc(ts)
    return _epoch(dt.replace(day=1, hour=0, minute=0, second=0, microsecond=0))


def partition_windows(corpus: Corpus, origin: int | None = None,
                      months: int = 3) -> list[AnalysisWindow]:
    """Slice the corpus period into contiguous calendar-month windows.

    ``origin`` defaults to the first day of the month containing the earliest
    record; it must not be later than the earliest record. Windows are
    generated until the latest record is covered.
    """
    if months < 1:
        raise ValueError("months must be >= 1")
    if not corpus.posts and not corpus.reposts:
        return []
    first, last = corpus.span()
    if origin is None:
        origin = month_floor(first)
    elif origin > first:
        raise ValueError("origin must be <= earliest record timestamp")
    bounds = [origin]
    dt = _utc(origin)
    while bounds[-1] <= last:
        dt = _add_months(dt, months)
        bounds.append(_epoch(dt))
    windows = [
        AnalysisWindow(index=i, start=bounds[i], end=bounds[i + 1], months=months)
        for i in range(len(bounds) - 1)
    ]
    return windows


def window_index(windows: list[AnalysisWindow], ts: int) -> int:
    """Index of the window containing ``ts``; raises if outside coverage."""
    if not windows or ts < windows[0].start or ts >= windows[-1].end:
        raise ValueError(f"timestamp {ts} outside window coverage")
    starts = [w.start for w in windows]
    return bisect_right(starts, ts) - 1


def posts_by_window(corpus: Corpus, windows: list[AnalysisWindow]) -> list[list[PostRecord]]:
    buckets: list[list[PostRecord]] = [[] for _ in windows]
    for post in corpus.posts:
        buckets[window_index(windows, post.timestamp)].append(post)
    return buckets


def filter_records(corpus: Corpus, include_tokens=frozenset(),
                   exclude_tokens=frozenset()) -> Corpus:
    """Keep posts holding at least one include token (when the set is
    non-empty) and none of the exclude tokens. Reposts pass through."""
    include = frozenset(include_tokens)
    exclude = frozenset(exclude_tokens)
    kept = []
    for post in corpus.posts:
        toks = set(post.tokens)
        if include and not (toks & include):
            continue
        if toks & exclude:
            continue
        kept.append(post)
    return Corpus(posts=tuple(kept), reposts=corpus.reposts)
