"""Keyword counting, threshold-based candidate selection and tie detection."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import EmptyTable
from .text_ingest import ALL_SOURCES, Token

DEFAULT_THRESHOLD = Fraction(2, 5)

Number = Union[int, float, str, Fraction]


@dataclass(frozen=True)
class FrequencyTable:
    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for kw, n in self.counts.items():
            if n < 1:
                raise ValueError(f"count for {kw!r} must be >= 1, got {n}")

    @property
    def total_keywords(self) -> int:
        return len(self.counts)

    def __len__(self):
        return len(self.counts)


@dataclass(frozen=True)
class CandidateSet:
    members: tuple  # ((keyword, count), ...), count desc then keyword asc
    threshold_fraction: Fraction

    def keywords(self) -> list[str]:
        return [kw for kw, _ in self.members]

    def as_dict(self) -> dict[str, int]:
        return dict(self.members)


@dataclass(frozen=True)
class TieGroup:
    count: int
    keywords: frozenset

    def __post_init__(self):
        if len(self.keywords) < 2:
            raise ValueError("a tie group needs at least two keywords")


def as_fraction(value: Number) -> Fraction:
    """Exact rational from user input; floats go through their decimal repr."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def count_frequencies(tokens: Iterable[Token], enabled_sources=ALL_SOURCES) -> FrequencyTable:
    enabled = frozenset(enabled_sources)
    return FrequencyTable(dict(Counter(t.text for t in tokens if t.source in enabled)))


def _ordered(counts: Mapping[str, int]) -> list[tuple[str, int]]:
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def cutoff_size(threshold_fraction: Number, total: int) -> int:
    """Number of keywords the threshold asks for: round-half-up, at least one."""
    f = as_fraction(threshold_fraction)
    return max(1, math.floor(f * total + Fraction(1, 2)))


def select_candidates(table: FrequencyTable, threshold_fraction: Number = DEFAULT_THRESHOLD) -> CandidateSet:
    """Keep the top fraction of distinct keywords by count.

    The threshold is a fraction of the number of distinct keywords, not of
    the maximum count. Keywords tied with the last selected one are kept
    as well, so the result never depends on how equal counts were ordered.
    """
    f = as_fraction(threshold_fraction)
    if not 0 < f <= 1:
        raise ValueError(f"threshold_fraction must be in (0, 1], got {f}")
    if not table.counts:
        raise EmptyTable("cannot select candidates from an empty frequency table")
    ordered = _ordered(table.counts)
    k = cutoff_size(f, table.total_keywords)
    floor_count = ordered[k - 1][1]
    members = tuple(kv for kv in ordered if kv[1] >= floor_count)
    return CandidateSet(members=members, threshold_fraction=f)


def detect_ties(candidates: CandidateSet) -> list[TieGroup]:
    by_count: dict[int, set] = {}
    for kw, n in candidates.members:
        by_count.setdefault(n, set()).add(kw)
    return [TieGroup(n, frozenset(kws)) for n, kws in sorted(by_count.items(), reverse=True)
            if len(kws) >= 2]
