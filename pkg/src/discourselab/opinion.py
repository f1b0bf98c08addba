"""Per-user opinion scoring, leaning classification, shift detection between
adjacent windows, and balanced cohort sampling."""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass

from .corpus import AnalysisWindow, Corpus, window_index

PRO, NEUTRAL, ANTI = "pro", "neutral", "anti"
TO_PRO, TO_ANTI = "to_pro", "to_anti"

LEANING_THRESHOLD = 0.3


@dataclass(frozen=True)
class OpinionProfile:
    user_id: str
    window: int
    n_pro: int
    n_neutral: int
    n_anti: int
    score: float

    @property
    def n_posts(self) -> int:
        return self.n_pro + self.n_neutral + self.n_anti

    @property
    def leaning(self) -> str:
        return classify_leaning(self.score)


@dataclass(frozen=True)
class OpinionShift:
    user_id: str
    from_window: int
    to_window: int
    from_score: float
    to_score: float
    from_posts: int
    to_posts: int
    direction: str | None  # to_pro / to_anti; None when the destination is neutral
    eligible: bool


def opinion_score(n_pro: int, n_neutral: int, n_anti: int) -> float:
    """(pro - anti) / total, in [-1, 1]."""
    total = n_pro + n_neutral + n_anti
    if total < 1:
        raise ValueError("at least one post required")
    return (n_pro - n_anti) / total


def classify_leaning(score: float) -> str:
    """pro above +0.3, anti below -0.3, neutral on the closed band between."""
    if not -1.0 <= score <= 1.0:
        raise ValueError("score must lie in [-1, 1]")
    if score > LEANING_THRESHOLD:
        return PRO
    if score < -LEANING_THRESHOLD:
        return ANTI
    return NEUTRAL


def build_profiles(corpus: Corpus, windows: list[AnalysisWindow]) -> list[OpinionProfile]:
    """One profile per (user, window) with at least one post."""
    counts: dict[tuple[str, int], list[int]] = defaultdict(lambda: [0, 0, 0])
    slot = {PRO: 0, NEUTRAL: 1, ANTI: 2}
    for post in corpus.posts:
        w = window_index(windows, post.timestamp)
        counts[(post.author_id, w)][slot[post.opinion]] += 1
    profiles = []
    for (user, w), (np_, nn, na) in sorted(counts.items()):
        profiles.append(OpinionProfile(
            user_id=user, window=w, n_pro=np_, n_neutral=nn, n_anti=na,
            score=opinion_score(np_, nn, na),
        ))
    return profiles


def _shift_direction(from_score: float, to_score: float) -> str | None:
    from_leaning = classify_leaning(from_score)
    to_leaning = classify_leaning(to_score)
    if to_leaning == PRO and from_leaning in (NEUTRAL, ANTI):
        return TO_PRO
    if to_leaning == ANTI and from_leaning in (NEUTRAL, PRO):
        return TO_ANTI
    return None


def detect_shifts(profiles: list[OpinionProfile], min_delta: float = 0.5,
                  min_posts: int = 5) -> list[OpinionShift]:
    """One shift record per user per adjacent-window pair with activity on
    both sides. A shift is cohort-eligible when the score moved by at least
    ``min_delta`` and the user posted at least ``min_posts`` times in both
    windows."""
    by_user: dict[str, dict[int, OpinionProfile]] = defaultdict(dict)
    for prof in profiles:
        by_user[prof.user_id][prof.window] = prof
    shifts = []
    for user in sorted(by_user):
        per_window = by_user[user]
        for w in sorted(per_window):
            nxt = per_window.get(w + 1)
            if nxt is None:
                continue
            cur = per_window[w]
            delta = abs(nxt.score - cur.score)
            eligible = delta >= min_delta and cur.n_posts >= min_posts and nxt.n_posts >= min_posts
            shifts.append(OpinionShift(
                user_id=user, from_window=w, to_window=w + 1,
                from_score=cur.score, to_score=nxt.score,
                from_posts=cur.n_posts, to_posts=nxt.n_posts,
                direction=_shift_direction(cur.score, nxt.score),
                eligible=eligible,
            ))
    return shifts


def sample_shifters(shifts: list[OpinionShift], cap: int = 100,
                    seed: int = 0) -> list[OpinionShift]:
    """Uniform sample without replacement of up to ``cap`` eligible shifts
    per (destination window, direction) stratum. Shifts whose destination
    leaning is neutral carry no direction and are never sampled."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    strata: dict[tuple[int, str], list[OpinionShift]] = defaultdict(list)
    for s in shifts:
        if s.eligible and s.direction is not None:
            strata[(s.to_window, s.direction)].append(s)
    rng = random.Random(seed)
    sampled: list[OpinionShift] = []
    for key in sorted(strata):
        pool = sorted(strata[key], key=lambda s: s.user_id)
        take = min(cap, len(pool))
        sampled.extend(rng.sample(pool, take))
    sampled.sort(key=lambda s: (s.to_window, s.direction, s.user_id))
    return sampled
