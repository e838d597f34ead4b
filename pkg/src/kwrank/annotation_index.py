"""Per-image annotations and the persistent keyword -> image inverted index."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .errors import FormatError
from .frequency import CandidateSet, FrequencyTable, count_frequencies
from .importance_rank import ImportanceReport
from .text_ingest import DEFAULT_STOPWORDS, MIN_TOKEN_LENGTH, Document, tokenize

FORMAT_TAG = "kwrankidx 1"
DEFAULT_MAX_ANNOTATIONS = 10


@dataclass(frozen=True)
class Annotation:
    keyword: str
    count: int
    rank: Fraction


@dataclass(frozen=True)
class AnnotatedImage:
    image_id: str
    owner_doc: str
    annotations: tuple  # of Annotation

    def keywords(self) -> list[str]:
        return [a.keyword for a in self.annotations]

    def get(self, keyword: str) -> Optional[Annotation]:
        for a in self.annotations:
            if a.keyword == keyword:
                return a
        return None


def annotate_images(doc: Document, candidates: Optional[CandidateSet], report: Optional[ImportanceReport],
                    max_annotations: int = DEFAULT_MAX_ANNOTATIONS, *,
                    table: Optional[FrequencyTable] = None,
                    stopwords: Iterable[str] = DEFAULT_STOPWORDS,
                    min_length: int = MIN_TOKEN_LENGTH) -> list[AnnotatedImage]:
    """Annotate every image in ``doc`` with its alt-text keywords and the page candidates.

    Ordering is frequency descending, alt-text keywords ahead of the others
    at equal frequency, then rank descending, then keyword. Alt-text keywords
    are chosen before any candidate when truncating to ``max_annotations``.
    ``stopwords``/``min_length`` must match what the document was parsed with.
    """
    if max_annotations < 1:
        raise ValueError("max_annotations must be >= 1")
    if table is None:
        table = count_frequencies(doc.tokens)
    page_counts = candidates.as_dict() if candidates is not None else {}
    doc_counts = None

    def frequency(kw):
        nonlocal doc_counts
        if kw in page_counts:
            return page_counts[kw]
        if kw in table.counts:
            return table.counts[kw]
        if doc_counts is None:
            doc_counts = count_frequencies(doc.tokens).counts
        return doc_counts.get(kw, 1)

    def rank_of(kw):
        return report.score(kw) if report is not None else Fraction(0)

    out = []
    for image in doc.images:
        alt = list(dict.fromkeys(tokenize(image.alt_text, stopwords, min_length)))
        alt_set = set(alt)
        entries = {kw: Annotation(kw, frequency(kw), rank_of(kw)) for kw in alt}
        for kw in page_counts:
            entries.setdefault(kw, Annotation(kw, frequency(kw), rank_of(kw)))
        if not entries:
            continue

        def key(a):
            return (-a.count, a.keyword not in alt_set, -a.rank, a.keyword)

        ordered = sorted(entries.values(), key=key)
        alt_first = [a for a in ordered if a.keyword in alt_set] + [a for a in ordered if a.keyword not in alt_set]
        chosen = sorted(alt_first[:max_annotations], key=key)
        out.append(AnnotatedImage(image.image_id, image.owner_doc, tuple(chosen)))
    return out


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def _unescape(s: str) -> str:
    out, i = [], 0
    table = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}
    while i < len(s):
        ch = s[i]
        if ch == "\\":
            if i + 1 >= len(s) or s[i + 1] not in table:
                raise FormatError(f"bad escape in {s!r}")
            out.append(table[s[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class InvertedIndex:
    """Keyword postings plus the annotated image records they point at."""

    def __init__(self):
        self.postings: dict[str, set] = {}
        self.images: dict[str, AnnotatedImage] = {}

    def __eq__(self, other):
        if not isinstance(other, InvertedIndex):
            return NotImplemented
        return self.postings == other.postings and self.images == other.images

    def __len__(self):
        return len(self.images)

    def _remove(self, image_id: str) -> None:
        old = self.images.pop(image_id, None)
        if old is None:
            return
        for kw in old.keywords():
            ids = self.postings.get(kw)
            if ids is not None:
                ids.discard(image_id)
                if not ids:
                    del self.postings[kw]

    def add(self, images: Iterable[AnnotatedImage]) -> "InvertedIndex":
        """Insert images; an image already present has its entry replaced."""
        for img in images:
            self._remove(img.image_id)
            self.images[img.image_id] = img
            for kw in img.keywords():
                self.postings.setdefault(kw, set()).add(img.image_id)
        return self

    def query(self, keyword: str) -> list[AnnotatedImage]:
        words = tokenize(keyword, min_length=1)
        if not words:
            return []
        if len(words) > 1:
            raise ValueError(f"query must be a single keyword, got {keyword!r}")
        kw = words[0]
        hits = [self.images[i] for i in self.postings.get(kw, ())]

        def key(img):
            a = img.get(kw)
            return (-a.count, -a.rank, img.image_id)

        return sorted(hits, key=key)

    def audit(self) -> list[str]:
        """Return every postings/images inconsistency found (empty when consistent)."""
        problems = []
        for kw, ids in self.postings.items():
            if not ids:
                problems.append(f"empty postings for {kw!r}")
            for i in ids:
                img = self.images.get(i)
                if img is None:
                    problems.append(f"{kw!r} posts missing image {i!r}")
                elif kw not in img.keywords():
                    problems.append(f"{kw!r} posts {i!r} which is not annotated with it")
        for i, img in self.images.items():
            if img.image_id != i:
                problems.append(f"image stored under wrong id {i!r}")
            if len(set(img.keywords())) != len(img.annotations):
                problems.append(f"duplicate keywords on {i!r}")
            for kw in img.keywords():
                if i not in self.postings.get(kw, ()):
                    problems.append(f"{i!r} annotated {kw!r} but not posted")
        return problems

    def dumps(self) -> str:
        lines = [FORMAT_TAG]
        for image_id in sorted(self.images):
            img = self.images[image_id]
            triples = [f"{a.keyword}:{a.count}:{a.rank.numerator}/{a.rank.denominator}" for a in img.annotations]
            lines.append("\t".join([_escape(img.image_id), _escape(img.owner_doc), *triples]))
        lines.append(f"end {len(self.images)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, data) -> "InvertedIndex":
        if isinstance(data, bytes):
            try:
                data = data.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise FormatError(f"index is not UTF-8: {exc}") from None
        if not data.endswith("\n"):
            raise FormatError("index truncated: missing final newline")
        lines = data[:-1].split("\n")
        if lines[0] != FORMAT_TAG:
            raise FormatError(f"unsupported index version line {lines[0]!r}")
        if len(lines) < 2 or not lines[-1].startswith("end "):
            raise FormatError("index truncated: missing end record")
        try:
            expected = int(lines[-1][4:])
        except ValueError:
            raise FormatError(f"bad end record {lines[-1]!r}") from None
        records = lines[1:-1]
        if expected != len(records):
            raise FormatError(f"index truncated: end record says {expected}, found {len(records)}")
        idx = cls()
        for lineno, line in enumerate(records, 2):
            cols = line.split("\t")
            if len(cols) < 3:
                raise FormatError(f"line {lineno}: image record without annotations")
            annotations = []
            for triple in cols[2:]:
                try:
                    kw, count, rank = triple.split(":")
                    annotations.append(Annotation(kw, int(count), Fraction(rank)))
                except ValueError:
                    raise FormatError(f"line {lineno}: bad annotation {triple!r}") from None
            img = AnnotatedImage(_unescape(cols[0]), _unescape(cols[1]), tuple(annotations))
            if img.image_id in idx.images:
                raise FormatError(f"line {lineno}: duplicate image {img.image_id!r}")
            idx.add([img])
        return idx


def index_add(idx: InvertedIndex, images: Iterable[AnnotatedImage]) -> InvertedIndex:
    return idx.add(images)


def query(idx: InvertedIndex, keyword: str) -> list[AnnotatedImage]:
    return idx.query(keyword)


def save_index(idx: InvertedIndex) -> bytes:
    return idx.dumps().encode("utf-8")


def load_index(data) -> InvertedIndex:
    return InvertedIndex.loads(data)
