"""Word-correlation knowledge base: rules ``antecedent -> consequent`` plus the
vocabulary that fixes the uniform transition weight."""
from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Union

from .errors import EmptyInput, FormatError, UnknownKeyword, VocabularyError
from .frequency import Number, as_fraction

logger = logging.getLogger(__name__)

HEADER = ("ID", "TermsX", "TermsY")
VOCAB_MARKER = "[vocabulary]"
_KEYWORD_RE = re.compile(r"[^\W_]+")


def normalize_keyword(raw: str) -> str:
    kw = raw.strip().lower()
    if not _KEYWORD_RE.fullmatch(kw):
        raise FormatError(f"not a normalized keyword: {raw!r}")
    return kw


@dataclass(frozen=True)
class Rule:
    id: int
    antecedent: str
    consequent: str
    # only set by mine_rules; written to saved files as comments
    support: Optional[Fraction] = field(default=None, compare=False)
    confidence: Optional[Fraction] = field(default=None, compare=False)

    def __post_init__(self):
        if self.antecedent == self.consequent:
            raise FormatError(f"self-loop rule {self.antecedent!r} -> {self.consequent!r}")

    @property
    def edge(self) -> tuple[str, str]:
        return (self.antecedent, self.consequent)


@dataclass(frozen=True)
class CycleReport:
    cycle: tuple  # keyword sequence, first == last


class KnowledgeBase:
    """Immutable rule digraph with a vocabulary of ``n_total`` keywords."""

    def __init__(self, rules: Iterable[Rule], vocabulary: Optional[Iterable[str]] = None):
        kept: list[Rule] = []
        seen = set()
        for rule in rules:
            if rule.edge in seen:
                logger.warning("duplicate rule %s -> %s (id %d) ignored", rule.antecedent, rule.consequent, rule.id)
                continue
            seen.add(rule.edge)
            kept.append(rule)
        endpoints = {w for r in kept for w in r.edge}
        if vocabulary is None:
            vocab = frozenset(endpoints)
        else:
            vocab = frozenset(vocabulary)
            missing = endpoints - vocab
            if missing:
                raise VocabularyError("vocabulary lacks rule endpoint(s): " + ", ".join(sorted(missing)))
        self.rules: tuple = tuple(kept)
        self.vocabulary: frozenset = vocab
        self._backward: dict[str, list[str]] = {}
        for r in kept:
            self._backward.setdefault(r.consequent, []).append(r.antecedent)
        self._edges = frozenset(seen)

    @property
    def n_total(self) -> int:
        return len(self.vocabulary)

    def has_rule(self, a: str, b: str) -> bool:
        return (a, b) in self._edges

    def predecessors(self, w: str) -> list[str]:
        return self._backward.get(w, [])

    def require(self, *words: str) -> None:
        missing = [w for w in words if w not in self.vocabulary]
        if missing:
            raise UnknownKeyword(missing)

    def fingerprint(self) -> str:
        """Digest of the edge set and vocabulary; row order and IDs do not matter."""
        h = hashlib.sha256()
        for a, b in sorted(self._edges):
            h.update(f"{a}\t{b}\n".encode())
        h.update(b"--\n")
        for w in sorted(self.vocabulary):
            h.update(f"{w}\n".encode())
        return h.hexdigest()

    def __eq__(self, other):
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return set(self.rules) == set(other.rules) and self.vocabulary == other.vocabulary

    def __repr__(self):
        return f"KnowledgeBase({len(self.rules)} rules, n_total={self.n_total})"


def load_kb(data: Union[bytes, str]) -> KnowledgeBase:
    """Parse the tab-separated rule file, with an optional ``[vocabulary]`` section."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"knowledge base is not UTF-8: {exc}") from None
    rules: list[Rule] = []
    vocabulary: Optional[list[str]] = None
    header_seen = False
    for lineno, line in enumerate(data.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if vocabulary is not None:
            vocabulary.append(normalize_keyword(stripped))
            continue
        if stripped == VOCAB_MARKER:
            if not header_seen:
                raise FormatError(f"line {lineno}: {VOCAB_MARKER} before header")
            vocabulary = []
            continue
        cols = [c.strip() for c in line.rstrip("\r\n").split("\t")]
        if not header_seen:
            if tuple(cols) != HEADER:
                raise FormatError(f"line {lineno}: expected header {'/'.join(HEADER)}, got {line!r}")
            header_seen = True
            continue
        if len(cols) != 3 or not all(cols):
            raise FormatError(f"line {lineno}: expected 3 tab-separated columns, got {line!r}")
        try:
            rule_id = int(cols[0])
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer rule ID {cols[0]!r}") from None
        try:
            rules.append(Rule(rule_id, normalize_keyword(cols[1]), normalize_keyword(cols[2])))
        except FormatError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    if not header_seen:
        raise FormatError("missing header line")
    return KnowledgeBase(rules, vocabulary)


def save_kb(kb: KnowledgeBase) -> str:
    lines = ["\t".join(HEADER)]
    for r in kb.rules:
        if r.support is not None:
            lines.append(f"# support={r.support} confidence={r.confidence}")
        lines.append(f"{r.id}\t{r.antecedent}\t{r.consequent}")
    lines.append(VOCAB_MARKER)
    lines.extend(sorted(kb.vocabulary))
    return "\n".join(lines) + "\n"


def backward_words(kb: KnowledgeBase, w: str) -> set:
    kb.require(w)
    return set(kb.predecessors(w))


def validate_acyclic(kb: KnowledgeBase, target: str) -> Optional[CycleReport]:
    """Search the ancestors of ``target`` for a directed cycle.

    Returns ``None`` when the ancestor subgraph is acyclic, otherwise a
    :class:`CycleReport` whose sequence follows backward edges and starts
    and ends on the same keyword.
    """
    kb.require(target)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {target: GREY}
    path = [target]
    stack = [iter(kb.predecessors(target))]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            color[path.pop()] = BLACK
            stack.pop()
            continue
        state = color.get(nxt, WHITE)
        if state == GREY:
            start = path.index(nxt)
            return CycleReport(tuple(path[start:]) + (nxt,))
        if state == WHITE:
            color[nxt] = GREY
            path.append(nxt)
            stack.append(iter(kb.predecessors(nxt)))
    return None


def mine_rules(transactions: Iterable[Iterable[str]], min_support: Number,
               min_confidence: Number) -> KnowledgeBase:
    """Pairwise association rules from keyword transactions.

    Emits ``x -> y`` when the pair's support and the rule's confidence both
    reach their thresholds. The vocabulary is every keyword seen in any
    transaction.
    """
    s_min, c_min = as_fraction(min_support), as_fraction(min_confidence)
    if not 0 < s_min <= 1 or not 0 < c_min <= 1:
        raise ValueError("min_support and min_confidence must be in (0, 1]")
    baskets = [frozenset(normalize_keyword(w) for w in t) for t in transactions]
    if not baskets:
        raise EmptyInput("no transactions")
    n = len(baskets)
    item_count: dict[str, int] = {}
    pair_count: dict[tuple[str, str], int] = {}
    for basket in baskets:
        for w in basket:
            item_count[w] = item_count.get(w, 0) + 1
        for x, y in combinations(sorted(basket), 2):
            pair_count[(x, y)] = pair_count.get((x, y), 0) + 1

    found = []
    for (x, y), c in pair_count.items():
        support = Fraction(c, n)
        if support < s_min:
            continue
        for a, b in ((x, y), (y, x)):
            confidence = Fraction(c, item_count[a])
            if confidence >= c_min:
                found.append((a, b, support, confidence))
    found.sort()
    rules = [Rule(i, a, b, support=s, confidence=conf) for i, (a, b, s, conf) in enumerate(found, 1)]
    return KnowledgeBase(rules, vocabulary=item_count)


def read_transactions(text: str) -> list[list[str]]:
    """One transaction per line, keywords separated by commas or whitespace."""
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append([w for w in re.split(r"[,\s]+", line) if w])
    return out
