"""Event keyword scoring: a token's share of the event section divided by its
share of the whole corpus. Scores above one mark tokens concentrated in the
event."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus
from .trendseg import CountSeries, Peak, TrendSegment


@dataclass(frozen=True)
class KeywordScore:
    token: str
    event_freq: float
    global_freq: float
    score: float
    event_count: int
    global_count: int


def peak_section(series: CountSeries, segments: list[TrendSegment],
                 peak: Peak) -> tuple[int, int]:
    """Time interval of the event around ``peak``: the up trend ending at the
    peak plus the down trend that follows it. End-exclusive."""
    for k, seg in enumerate(segments):
        if seg.direction == "up" and seg.extremum_index == peak.bin_index:
            start_ts = series.timestamp(seg.start_index)
            if k + 1 < len(segments):
                end_ts = series.timestamp(segments[k + 1].end_index + 1)
            else:
                end_ts = series.timestamp(seg.end_index + 1)
            return start_ts, end_ts
    raise ValueError(f"no up trend ends at bin {peak.bin_index}")


def keyword_scores(corpus: Corpus, section: tuple[int, int], min_count: int = 5,
                   top_k: int = 50, stopwords=frozenset()) -> list[KeywordScore]:
    """Rank tokens of the posts inside ``section`` by their concentration.

    score(w) = (section share of w) / (corpus share of w). Tokens appearing
    fewer than ``min_count`` times inside the section are dropped, as are
    stopwords. Ties are broken lexicographically.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    t0, t1 = section
    stop = frozenset(stopwords)
    section_counts: Counter[str] = Counter()
    global_counts: Counter[str] = Counter()
    section_posts = 0
    for post in corpus.posts:
        global_counts.update(post.tokens)
        if t0 <= post.timestamp < t1:
            section_counts.update(post.tokens)
            section_posts += 1
    if section_posts == 0:
        raise ValueError("section contains no posts")
    section_total = sum(section_counts.values())
    global_total = sum(global_counts.values())
    scored = []
    for token, c_sec in section_counts.items():
        if c_sec < min_count or token in stop:
            continue
        c_glob = global_counts[token]
        event_freq = c_sec / section_total
        global_freq = c_glob / global_total
        scored.append(KeywordScore(
            token=token, event_freq=event_freq, global_freq=global_freq,
            score=event_freq / global_freq, event_count=c_sec, global_count=c_glob,
        ))
    scored.sort(key=lambda s: (-s.score, s.token))
    return scored[:top_k]
