"""Data model and persistence for scholarly documents and citation contexts.

Two kinds of records flow through the toolkit: documents (title/abstract
metadata of cited or citing papers) and citation contexts (the text snippet
around one in-text citation). Both can be read from a JSONL dump or fetched
through a GraphProvider (see providers). Context snippets are treated as
opaque provider-supplied text; no re-segmentation is attempted.

Dump format: UTF-8 JSONL, LF line endings. Each line is an object with
``"kind": "document"`` (fields: id, doi, title, abstract, year, set_tag) or
``"kind": "context"`` (fields: citing_id, cited_id, text, ordinal).
"""

from __future__ import annotations

import json
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CitemapWarning, ConfigError, ParseError

SET_TAGS = ("cited", "citing")

_DOI_PREFIXES = (
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi:",
)


def normalize_doi(raw: str | None) -> str | None:
    """Lowercase a DOI and strip URL/scheme prefixes. Blank input -> None."""
    if raw is None:
        return None
    doi = raw.strip().lower()
    for prefix in _DOI_PREFIXES:
        if doi.startswith(prefix):
            doi = doi[len(prefix):]
            break
    return doi or None


@dataclass(frozen=True)
class Document:
    """One scholarly record. The DOI is normalized at construction."""

    id: str
    title: str
    set_tag: str
    doi: str | None = None
    abstract: str | None = None
    year: int | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be non-empty")
        if self.set_tag not in SET_TAGS:
            raise ValueError(f"set_tag must be one of {SET_TAGS}, got {self.set_tag!r}")
        if self.doi is not None:
            norm = normalize_doi(self.doi)
            if norm is None or not norm.startswith("10."):
                raise ValueError(f"invalid DOI {self.doi!r}: expected a '10.' prefix after normalization")
            object.__setattr__(self, "doi", norm)
        if self.year is not None and not isinstance(self.year, int):
            raise ValueError(f"year must be an integer, got {self.year!r}")


@dataclass(frozen=True)
class CitationContext:
    """One text snippet around one citation of ``cited_id`` in ``citing_id``.

    Several contexts per (citing_id, cited_id) pair are legal; the ordinal
    (1-based) distinguishes them.
    """

    citing_id: str
    cited_id: str
    text: str
    ordinal: int = 1

    def __post_init__(self) -> None:
        stripped = self.text.strip()
        if not stripped:
            raise ValueError("context text must be non-empty after trimming")
        object.__setattr__(self, "text", stripped)
        if self.ordinal < 1:
            raise ValueError(f"ordinal must be >= 1, got {self.ordinal}")
        if not self.citing_id or not self.cited_id:
            raise ValueError("citing_id and cited_id must be non-empty")


class DocumentSet:
    """Ordered, duplicate-free collection of documents (insertion order kept)."""

    def __init__(self, documents: Iterable[Document] = (), label: str = ""):
        self.label = label
        self._docs: dict[str, Document] = {}
        for doc in documents:
            if not self.add(doc):
                raise ValueError(f"duplicate document id {doc.id!r}")

    def add(self, doc: Document) -> bool:
        """Insert a document; first occurrence of an id wins. Returns False on duplicate."""
        if doc.id in self._docs:
            return False
        self._docs[doc.id] = doc
        return True

    def get(self, doc_id: str) -> Document | None:
        return self._docs.get(doc_id)

    def ids(self) -> tuple[str, ...]:
        return tuple(self._docs)

    def filter_tag(self, set_tag: str) -> "DocumentSet":
        return DocumentSet((d for d in self if d.set_tag == set_tag), label=set_tag)

    def __iter__(self) -> Iterator[Document]:
        return iter(self._docs.values())

    def __len__(self) -> int:
        return len(self._docs)

    def __contains__(self, doc_id: object) -> bool:
        return doc_id in self._docs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DocumentSet):
            return NotImplemented
        return list(self) == list(other) and self.label == other.label

    def __repr__(self) -> str:
        return f"DocumentSet(label={self.label!r}, n={len(self)})"


@dataclass(frozen=True)
class CorpusStats:
    """Descriptive totals for a cited/citing corpus."""

    n_cited: int
    n_citing: int
    n_contexts: int
    n_overlap: int
    contexts_per_cited: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "n_cited": self.n_cited,
            "n_citing": self.n_citing,
            "n_contexts": self.n_contexts,
            "n_overlap": self.n_overlap,
            "contexts_per_cited": dict(sorted(self.contexts_per_cited.items())),
        }


_DOC_FIELDS = ("id", "doi", "title", "abstract", "year", "set_tag")
_CTX_FIELDS = ("citing_id", "cited_id", "text", "ordinal")


def _document_from_record(record: dict) -> Document:
    return Document(
        id=record.get("id", ""),
        title=record.get("title") or "",
        set_tag=record.get("set_tag", ""),
        doi=record.get("doi"),
        abstract=record.get("abstract"),
        year=record.get("year"),
    )


def _context_from_record(record: dict) -> CitationContext:
    return CitationContext(
        citing_id=record.get("citing_id", ""),
        cited_id=record.get("cited_id", ""),
        text=record.get("text", ""),
        ordinal=record.get("ordinal", 1),
    )


def load_corpus(path: str | Path, fmt: str = "jsonl") -> tuple[DocumentSet, list[CitationContext]]:
    """Read a corpus dump and return ``(documents, contexts)`` in file order.

    Duplicate document ids are deduplicated first-wins; duplicates and
    contexts referencing unknown documents each raise one CitemapWarning.
    A malformed line raises ParseError naming the line number.
    """
    if fmt != "jsonl":
        raise ConfigError(f"unsupported corpus format {fmt!r} (only 'jsonl')")
    path = Path(path)
    docs = DocumentSet(label=path.stem)
    contexts: list[CitationContext] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise ParseError(f"{path}:{lineno}: expected an object, got {type(record).__name__}")
            kind = record.get("kind")
            try:
                if kind == "document":
                    doc = _document_from_record(record)
                    if not docs.add(doc):
                        warnings.warn(f"{path}:{lineno}: duplicate document id {doc.id!r} ignored", CitemapWarning, stacklevel=2)
                elif kind == "context":
                    contexts.append(_context_from_record(record))
                else:
                    raise ValueError(f"unknown kind {kind!r}")
            except (ValueError, TypeError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    for ctx in contexts:
        missing = [i for i in (ctx.citing_id, ctx.cited_id) if i not in docs]
        if missing:
            warnings.warn(
                f"context ({ctx.citing_id!r} -> {ctx.cited_id!r} #{ctx.ordinal}) references unknown document(s) {missing}",
                CitemapWarning,
                stacklevel=2,
            )
    return docs, contexts


def write_corpus(path: str | Path, docs: DocumentSet, contexts: Iterable[CitationContext]) -> Path:
    """Write a corpus dump (inverse of load_corpus). Deterministic bytes."""
    path = Path(path)
    lines = []
    for doc in docs:
        record = {"kind": "document", "id": doc.id, "doi": doc.doi, "title": doc.title,
                  "abstract": doc.abstract, "year": doc.year, "set_tag": doc.set_tag}
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    for ctx in contexts:
        record = {"kind": "context", "citing_id": ctx.citing_id, "cited_id": ctx.cited_id,
                  "text": ctx.text, "ordinal": ctx.ordinal}
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8", newline="\n")
    return path


def dataset_stats(cited: DocumentSet, citing: DocumentSet, contexts: Iterable[CitationContext]) -> CorpusStats:
    """Totals plus the cited/citing overlap.

    A cited document overlaps the citing set when a citing document matches
    on DOI (if both carry one) or otherwise on id.
    """
    citing_dois = {d.doi for d in citing if d.doi}
    ids_without_doi = {d.id for d in citing if not d.doi}
    all_citing_ids = set(citing.ids())
    overlap = 0
    for doc in cited:
        if doc.doi:
            # DOI decides whenever both sides carry one; id only breaks the tie
            # against citing documents that have no DOI.
            if doc.doi in citing_dois or doc.id in ids_without_doi:
                overlap += 1
        elif doc.id in all_citing_ids:
            overlap += 1
    contexts = list(contexts)
    histogram = {doc.id: 0 for doc in cited}
    for cited_id, count in Counter(ctx.cited_id for ctx in contexts).items():
        histogram[cited_id] = count
    return CorpusStats(
        n_cited=len(cited),
        n_citing=len(citing),
        n_contexts=len(contexts),
        n_overlap=overlap,
        contexts_per_cited=histogram,
    )
