"""HTML ingestion: fetch pages, extract image references and a source-tagged
keyword stream."""
from __future__ import annotations

import enum
import logging
import os
import re
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional, Union
from urllib.parse import urljoin, urlparse

import requests
from bs4 import BeautifulSoup, Comment, Doctype, MarkupResemblesLocatorWarning
from bs4.element import CData, Declaration, NavigableString, ProcessingInstruction, Tag

from .errors import FetchError, InvalidEncoding, KwrankError, NotFound

logger = logging.getLogger(__name__)

USER_AGENT = "kwrank/0.1 (image annotation indexer)"
DEFAULT_TIMEOUT = 10.0
MIN_TOKEN_LENGTH = 2

_WORD_RE = re.compile(r"[^\W_]+")
_HEADINGS = {"h1", "h2", "h3", "h4", "h5", "h6"}
# elements whose text never counts as visible body text
_INVISIBLE = {"script", "style", "noscript", "template", "head", "title"}
_CHARSET_RE = re.compile(rb"""<meta[^>]+charset\s*=\s*["']?([A-Za-z0-9_\-:.]+)""", re.I)


class TokenSource(str, enum.Enum):
    ALT_TEXT = "alt"
    PAGE_TITLE = "title"
    META_KEYWORDS = "meta_keywords"
    META_DESCRIPTION = "meta_description"
    HEADING = "heading"
    BODY = "body"

    @classmethod
    def parse(cls, names: Union[str, Iterable[str]]) -> frozenset:
        if isinstance(names, str):
            names = [n for n in re.split(r"[,\s]+", names) if n]
        out = set()
        for name in names:
            if name == "all":
                out.update(cls)
                continue
            try:
                out.add(cls(name))
            except ValueError:
                raise ValueError(f"unknown token source {name!r}") from None
        return frozenset(out)


ALL_SOURCES = frozenset(TokenSource)


@dataclass(frozen=True)
class Token:
    text: str
    source: TokenSource


@dataclass(frozen=True)
class ImageRef:
    image_id: str
    alt_text: str
    owner_doc: str


@dataclass
class Document:
    doc_id: str
    title: str = ""
    images: list[ImageRef] = field(default_factory=list)
    tokens: list[Token] = field(default_factory=list)


def load_stopwords(path: Optional[str] = None) -> frozenset:
    """Read a stopword file (one word per line). ``None`` loads the bundled list."""
    if path is None:
        text = resources.files("kwrank").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#"))


DEFAULT_STOPWORDS = load_stopwords()


def tokenize(raw: str, stopwords: Iterable[str] = frozenset(),
             min_length: int = MIN_TOKEN_LENGTH) -> list[str]:
    """Lowercase ``raw`` and split it into alphanumeric keywords.

    Tokens shorter than ``min_length`` and tokens in ``stopwords`` are dropped.
    Order and duplicates are kept.

    >>> tokenize("Himalaya Mountain, water!")
    ['himalaya', 'mountain', 'water']
    """
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [w for w in _WORD_RE.findall(raw.lower()) if len(w) >= min_length and w not in stop]


def read_url_list(path: str) -> list[str]:
    """One location per line; blank lines and ``#`` comments are skipped."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    return [ln for ln in lines if ln and not ln.startswith("#")]


def is_url(location: str) -> bool:
    return urlparse(location).scheme in ("http", "https")


def load_source(location: str, timeout: float = DEFAULT_TIMEOUT) -> bytes:
    """Return the raw bytes at a local path or http(s) URL."""
    if is_url(location):
        try:
            resp = requests.get(location, timeout=timeout, headers={"User-Agent": USER_AGENT})
        except requests.RequestException as exc:
            raise FetchError(f"{location}: {exc}") from exc
        if resp.status_code >= 400:
            raise FetchError(f"{location}: HTTP {resp.status_code}")
        return resp.content
    try:
        with open(location, "rb") as fh:
            return fh.read()
    except FileNotFoundError:
        raise NotFound(location) from None
    except IsADirectoryError:
        raise NotFound(f"{location} is a directory") from None


def load_sources(locations: list[str], timeout: float = DEFAULT_TIMEOUT,
                 max_workers: int = 4) -> list[Union[bytes, KwrankError]]:
    """Fetch every location concurrently.

    Results come back in input order; a failed fetch yields its exception
    object in place of the bytes.
    """
    def fetch(loc):
        try:
            return load_source(loc, timeout)
        except KwrankError as exc:
            return exc

    if not locations:
        return []
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        return list(pool.map(fetch, locations))


def decode_html(html: Union[bytes, str]) -> str:
    if isinstance(html, str):
        return html
    if html.startswith(b"\xef\xbb\xbf"):
        html = html[3:]
    try:
        return html.decode("utf-8")
    except UnicodeDecodeError:
        pass
    m = _CHARSET_RE.search(html[:4096])
    if m:
        try:
            return html.decode(m.group(1).decode("ascii"))
        except (LookupError, UnicodeDecodeError):
            pass
    raise InvalidEncoding("document is neither valid UTF-8 nor its declared charset")


def resolve_src(src: str, doc_id: str) -> str:
    src = src.strip()
    if urlparse(src).scheme:
        return src
    if is_url(doc_id):
        return urljoin(doc_id, src)
    if src.startswith("/") or not doc_id:
        return src
    return os.path.normpath(os.path.join(os.path.dirname(doc_id), src))


def _attr(tag: Tag, name: str) -> str:
    value = tag.get(name)
    if value is None:
        return ""
    if isinstance(value, list):
        return " ".join(value)
    return str(value)


def parse_document(doc_id: str, html: Union[bytes, str],
                   stopwords: Iterable[str] = DEFAULT_STOPWORDS,
                   min_length: int = MIN_TOKEN_LENGTH) -> Document:
    """Extract title, images and source-tagged tokens from one HTML page.

    Tokens are emitted in document order. Images with the same resolved
    ``src`` collapse into one :class:`ImageRef` whose alt texts are joined
    with a space. Text inside script/style and similar elements is ignored.
    """
    if not doc_id:
        raise ValueError("doc_id must be non-empty")
    text = decode_html(html)
    stop = frozenset(stopwords)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MarkupResemblesLocatorWarning)
        soup = BeautifulSoup(text, "html.parser")

    doc = Document(doc_id=doc_id)
    images: dict[str, list[str]] = {}

    def emit(raw, source):
        doc.tokens.extend(Token(w, source) for w in tokenize(raw, stop, min_length))

    title_seen = False
    for node in soup.descendants:
        if isinstance(node, Tag):
            name = node.name.lower()
            if name == "img":
                alt = _attr(node, "alt")
                if alt:
                    emit(alt, TokenSource.ALT_TEXT)
                src = _attr(node, "src").strip()
                if src:
                    images.setdefault(resolve_src(src, doc_id), []).append(alt)
            elif name == "title" and not title_seen:
                title_seen = True
                doc.title = node.get_text(" ", strip=True)
                emit(doc.title, TokenSource.PAGE_TITLE)
            elif name == "meta":
                key = (_attr(node, "name") or _attr(node, "property")).strip().lower()
                if key == "keywords":
                    emit(_attr(node, "content"), TokenSource.META_KEYWORDS)
                elif key == "description":
                    emit(_attr(node, "content"), TokenSource.META_DESCRIPTION)
            continue
        if not isinstance(node, NavigableString) or isinstance(
                node, (Comment, Doctype, CData, Declaration, ProcessingInstruction)):
            continue
        source = TokenSource.BODY
        for parent in node.parents:
            pname = (parent.name or "").lower()
            if pname in _INVISIBLE:
                source = None
                break
            if pname in _HEADINGS:
                source = TokenSource.HEADING
        if source is not None:
            emit(str(node), source)

    doc.images = [ImageRef(image_id=src, alt_text=" ".join(a for a in alts if a), owner_doc=doc_id)
                  for src, alts in images.items()]
    return doc
