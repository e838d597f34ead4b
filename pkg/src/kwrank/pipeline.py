"""End-to-end run: URL list -> parse -> count -> select -> rank ties -> annotate -> index."""
from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from .annotation_index import DEFAULT_MAX_ANNOTATIONS, InvertedIndex, annotate_images
from .errors import ConfigError, CyclicKnowledgeBase, EmptyTable, FormatError, KBError, KwrankError
from .frequency import DEFAULT_THRESHOLD, as_fraction, count_frequencies, detect_ties, select_candidates
from .importance_rank import ImportanceReport, rank_all, resolve_tie
from .knowledge_base import KnowledgeBase, load_kb, validate_acyclic
from .text_ingest import (ALL_SOURCES, DEFAULT_TIMEOUT, MIN_TOKEN_LENGTH, TokenSource, is_url,
                          load_sources, load_stopwords, parse_document, read_url_list)

logger = logging.getLogger(__name__)

CONFIG_ENV = "KWRANK_CONFIG"


@dataclass
class PipelineConfig:
    url_list_path: str
    kb_path: str
    index_path: str
    stopwords_path: Optional[str] = None
    threshold_fraction: Fraction = DEFAULT_THRESHOLD
    max_annotations: int = DEFAULT_MAX_ANNOTATIONS
    enabled_token_sources: frozenset = ALL_SOURCES
    fetch_timeout_seconds: float = DEFAULT_TIMEOUT
    fetch_workers: int = 4
    min_token_length: int = MIN_TOKEN_LENGTH
    rank_all_candidates: bool = False
    summary_path: Optional[str] = None

    def __post_init__(self):
        self.threshold_fraction = as_fraction(self.threshold_fraction)
        if not 0 < self.threshold_fraction <= 1:
            raise ConfigError(f"threshold must be in (0, 1], got {self.threshold_fraction}")
        if self.max_annotations < 1:
            raise ConfigError("max_annotations must be >= 1")
        if self.fetch_timeout_seconds <= 0:
            raise ConfigError("fetch_timeout must be > 0")
        if self.min_token_length < 1:
            raise ConfigError("min_token_length must be >= 1")
        if self.fetch_workers < 1:
            raise ConfigError("fetch_workers must be >= 1")


# config-file key -> (field name, parser)
def _bool(v: str) -> bool:
    v = v.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


_KEYS = {
    "url_list": ("url_list_path", str),
    "kb": ("kb_path", str),
    "index": ("index_path", str),
    "stopwords": ("stopwords_path", str),
    "threshold": ("threshold_fraction", as_fraction),
    "max_annotations": ("max_annotations", int),
    "sources": ("enabled_token_sources", TokenSource.parse),
    "fetch_timeout": ("fetch_timeout_seconds", float),
    "fetch_workers": ("fetch_workers", int),
    "min_token_length": ("min_token_length", int),
    "rank_all_candidates": ("rank_all_candidates", _bool),
    "summary": ("summary_path", str),
}
_PATH_FIELDS = {"url_list_path", "kb_path", "index_path", "stopwords_path", "summary_path"}


def parse_config(text: str, base_dir: str = ".", overrides: Optional[dict] = None) -> PipelineConfig:
    """Build a config from ``key = value`` lines; ``overrides`` (field names) win.

    Relative paths in the file are taken relative to ``base_dir``.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, raw = (p.strip() for p in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        name, conv = _KEYS[key]
        try:
            value = conv(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"config line {lineno}: {exc}") from None
        if name in _PATH_FIELDS:
            value = os.path.join(base_dir, value)
        values[name] = value
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    missing = [name for name in ("url_list_path", "kb_path", "index_path") if name not in values]
    if missing:
        raise ConfigError("config missing required setting(s): " + ", ".join(missing))
    try:
        return PipelineConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> PipelineConfig:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        if overrides:
            return parse_config("", overrides=overrides)
        raise ConfigError(f"no config file given and {CONFIG_ENV} is unset")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, os.path.dirname(os.path.abspath(path)), overrides)


@dataclass
class DocumentResult:
    doc_id: str
    candidates: list  # [[keyword, count], ...]
    tie_groups: list  # [{"count": n, "order": [...]}, ...]
    ranks: dict  # keyword -> "num/den"
    images: int


@dataclass
class RunSummary:
    documents_processed: int = 0
    documents_failed: list = field(default_factory=list)  # [{"doc_id", "reason"}]
    images_indexed: int = 0
    tie_groups_resolved: int = 0
    documents: list = field(default_factory=list)  # DocumentResult

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def render(self) -> str:
        out = [f"documents processed: {self.documents_processed}",
               f"documents failed:    {len(self.documents_failed)}",
               f"images indexed:      {self.images_indexed}",
               f"tie groups resolved: {self.tie_groups_resolved}"]
        for f in self.documents_failed:
            out.append(f"  FAILED {f['doc_id']}: {f['reason']}")
        for d in self.documents:
            out.append(f"{d.doc_id}")
            out.append("  candidates: " + (", ".join(f"{k}:{n}" for k, n in d.candidates) or "(none)"))
            for g in d.tie_groups:
                out.append(f"  tie @{g['count']}: " + " > ".join(g["order"]))
            if d.ranks:
                out.append("  ranks: " + ", ".join(f"{k}={v}" for k, v in sorted(d.ranks.items())))
        return "\n".join(out) + "\n"


def load_knowledge_base(path: str) -> KnowledgeBase:
    try:
        with open(path, "rb") as fh:
            kb = load_kb(fh.read())
    except OSError as exc:
        raise KBError(f"cannot read knowledge base {path}: {exc}") from None
    except FormatError as exc:
        raise KBError(f"{path}: {exc}") from exc
    for w in sorted(kb.vocabulary):
        report = validate_acyclic(kb, w)
        if report is not None:
            raise CyclicKnowledgeBase(report)
    return kb


def run_pipeline(config: PipelineConfig) -> RunSummary:
    """Process every URL-list entry and write the index (and summary, if configured).

    Knowledge-base problems abort the run; per-document failures are recorded
    in the summary and skipped.
    """
    kb = load_knowledge_base(config.kb_path)
    try:
        locations = read_url_list(config.url_list_path)
        stopwords = load_stopwords(config.stopwords_path)
    except OSError as exc:
        raise ConfigError(str(exc)) from None

    summary = RunSummary()
    index = InvertedIndex()
    base = os.path.dirname(os.path.abspath(config.url_list_path))
    fetch_from = [loc if is_url(loc) or os.path.isabs(loc) else os.path.join(base, loc) for loc in locations]
    pages = load_sources(fetch_from, config.fetch_timeout_seconds, config.fetch_workers)
    seen = set()
    for location, fetched, page in zip(locations, fetch_from, pages):
        if location in seen:
            summary.documents_failed.append({"doc_id": location, "reason": "DuplicateLocation: listed twice"})
            continue
        seen.add(location)
        if isinstance(page, KwrankError):
            reason = str(page).replace(fetched, location)
            summary.documents_failed.append({"doc_id": location, "reason": f"{type(page).__name__}: {reason}"})
            continue
        try:
            doc = parse_document(location, page, stopwords, config.min_token_length)
        except KwrankError as exc:
            summary.documents_failed.append({"doc_id": location, "reason": f"{type(exc).__name__}: {exc}"})
            continue

        table = count_frequencies(doc.tokens, config.enabled_token_sources)
        try:
            candidates = select_candidates(table, config.threshold_fraction)
        except EmptyTable:
            candidates = None
        ties = detect_ties(candidates) if candidates is not None else []
        if config.rank_all_candidates and candidates is not None:
            to_rank = set(candidates.keywords())
        else:
            to_rank = {w for g in ties for w in g.keywords}
        report: ImportanceReport = rank_all(kb, to_rank & kb.vocabulary)
        groups = [{"count": g.count, "order": resolve_tie(kb, g, report)} for g in ties]

        annotated = annotate_images(doc, candidates, report, config.max_annotations, table=table,
                                    stopwords=stopwords, min_length=config.min_token_length)
        index.add(annotated)
        summary.documents_processed += 1
        summary.tie_groups_resolved += len(groups)
        summary.documents.append(DocumentResult(
            doc_id=location,
            candidates=[list(m) for m in candidates.members] if candidates is not None else [],
            tie_groups=groups,
            ranks={s.keyword: f"{s.score.numerator}/{s.score.denominator}" for s in report.ordered()},
            images=len(annotated),
        ))
        logger.info("%s: %d candidates, %d tie groups, %d images", location,
                    len(candidates.members) if candidates else 0, len(groups), len(annotated))

    summary.images_indexed = len(index)
    with open(config.index_path, "wb") as fh:
        fh.write(index.dumps().encode("utf-8"))
    if config.summary_path:
        with open(config.summary_path, "w", encoding="utf-8") as fh:
            fh.write(summary.to_json())
    return summary

