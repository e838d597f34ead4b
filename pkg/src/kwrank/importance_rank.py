"""Correlation rank of keywords over the knowledge-base digraph.

``R(b)`` sums, over every backward word ``a`` (rule ``a -> b``), the transition
weight ``1/n_total`` plus ``R(a)``. On an acyclic graph this equals the number
of directed paths ending at ``b`` divided by ``n_total``; :func:`oracle_path_count`
enumerates those paths independently so the two can be checked against each other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Optional

from .errors import CyclicKnowledgeBase
from .frequency import TieGroup
from .knowledge_base import CycleReport, KnowledgeBase, validate_acyclic


def format_decimal(value: Fraction, digits: int = 12) -> str:
    """Shortest decimal rendering with at most ``digits`` significant digits."""
    if value == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(value.numerator) / Decimal(value.denominator)
    return format(d.normalize(), "f")


@dataclass(frozen=True)
class RankScore:
    keyword: str
    score: Fraction
    contributing_paths: int

    @property
    def decimal(self) -> str:
        return format_decimal(self.score)

    def __float__(self):
        return float(self.score)


@dataclass
class ImportanceReport:
    scores: dict = field(default_factory=dict)
    kb_fingerprint: str = ""

    def ordered(self) -> list[RankScore]:
        return sorted(self.scores.values(), key=lambda s: (-s.score, s.keyword))

    def score(self, keyword: str) -> Fraction:
        entry = self.scores.get(keyword)
        return entry.score if entry is not None else Fraction(0)


def transition_weight(kb: KnowledgeBase, a: str, b: str) -> Fraction:
    kb.require(a, b)
    return Fraction(1, kb.n_total) if kb.has_rule(a, b) else Fraction(0)


def _check_acyclic(kb: KnowledgeBase, w: str) -> None:
    report = validate_acyclic(kb, w)
    if report is not None:
        raise CyclicKnowledgeBase(report)


def _rank_memo(kb: KnowledgeBase, w: str, memo: dict) -> Fraction:
    # iterative post-order over the ancestor DAG; acyclicity already checked
    stack = [w]
    while stack:
        node = stack[-1]
        if node in memo:
            stack.pop()
            continue
        pending = [a for a in kb.predecessors(node) if a not in memo]
        if pending:
            stack.extend(pending)
            continue
        memo[node] = sum((transition_weight(kb, a, node) + memo[a] for a in kb.predecessors(node)),
                         Fraction(0))
        stack.pop()
    return memo[w]


def _score(kb: KnowledgeBase, w: str, value: Fraction) -> RankScore:
    paths = value * kb.n_total
    assert paths.denominator == 1, "rank must be a whole number of 1/n_total steps"
    return RankScore(w, value, int(paths))


def rank(kb: KnowledgeBase, w: str) -> RankScore:
    kb.require(w)
    _check_acyclic(kb, w)
    return _score(kb, w, _rank_memo(kb, w, {}))


def rank_all(kb: KnowledgeBase, words: Iterable[str]) -> ImportanceReport:
    words = sorted(set(words))
    kb.require(*words)
    memo: dict = {}
    report = ImportanceReport(kb_fingerprint=kb.fingerprint())
    for w in words:
        _check_acyclic(kb, w)
        report.scores[w] = _score(kb, w, _rank_memo(kb, w, memo))
    return report


def oracle_path_count(kb: KnowledgeBase, w: str) -> int:
    """Count directed paths of length >= 1 ending at ``w`` by listing each one.

    Deliberately unmemoized: every path is walked explicitly. Raises
    :class:`CyclicKnowledgeBase` if a walk revisits a keyword.
    """
    kb.require(w)
    count = 0
    stack = [(w,)]
    while stack:
        path = stack.pop()
        for a in kb.predecessors(path[-1]):
            if a in path:
                start = path.index(a)
                raise CyclicKnowledgeBase(CycleReport(path[start:] + (a,)))
            count += 1
            stack.append(path + (a,))
    return count


def resolve_tie(kb: KnowledgeBase, group: TieGroup,
                report: Optional[ImportanceReport] = None) -> list[str]:
    """Order tied keywords by rank, highest first, then alphabetically.

    Keywords outside the knowledge base rank 0.
    """
    scores = {}
    known = [w for w in group.keywords if w in kb.vocabulary]
    if report is None or any(w not in report.scores for w in known):
        report = rank_all(kb, known)
    for w in group.keywords:
        scores[w] = report.score(w)
    return sorted(group.keywords, key=lambda w: (-scores[w], w))


def format_report(report: ImportanceReport) -> str:
    """Tab-separated ``keyword, decimal, rational, path count`` lines, best first."""
    return "".join(f"{s.keyword}\t{s.decimal}\t{s.score.numerator}/{s.score.denominator}\t"
                   f"{s.contributing_paths}\n" for s in report.ordered())


def parse_report(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        kw, _dec, rational, paths = line.split("\t")
        out[kw] = RankScore(kw, Fraction(rational), int(paths))
    return out
