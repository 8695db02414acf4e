"""Candidate term extraction and lexicon construction.

A text unit is one title+abstract or one citation context. Units are
segmented into sentences, sentences into lowercase tokens; candidate terms
are the maximal runs of content tokens (no stopwords, no numbers) plus every
suffix sub-run, so "journal impact factor" also yields "impact factor" and
"factor". Counting is binary at the unit level: a term's occurrence count is
the number of distinct units containing it, however often it repeats inside
one unit.

Normalization is deliberately conservative: lowercase everything, strip one
trailing "s" only when the singular form already occurs somewhere in the
corpus (so "citation analysis" survives), and fold variants through an
optional thesaurus before counting. Author-name citations of the shape
"Moed et al" are blanked out of the raw text before segmentation, since
case information is gone afterwards.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .corpus import CitationContext, Document, DocumentSet
from .errors import ConfigError, ConsistencyError, ParseError

TITLE_ABSTRACT = "title_abstract"
CITATION_CONTEXT = "citation_context"

SENTENCE_BREAKERS = ".?!;"

# Suffixes that keep a "." from ending a sentence.
ABBREVIATION_GUARDS = (
    "et al.", "e.g.", "i.e.", "etc.", "cf.", "vs.", "viz.", "ca.", "resp.",
    "fig.", "figs.", "eq.", "eqs.", "ref.", "refs.", "vol.", "no.", "pp.",
    "ed.", "eds.", "jr.", "sr.", "dr.", "prof.",
)

_AUTHOR_CITATION = re.compile(r"\b[A-Z][\w\-]*\s+et\s+al\b\.?")


def strip_citation_authors(text: str) -> str:
    """Blank out '<Capitalized> et al' author citations from raw text."""
    return _AUTHOR_CITATION.sub(" ", text)


def _guarded(text: str, i: int) -> bool:
    head = text[: i + 1].lower()
    return any(head.endswith(guard) for guard in ABBREVIATION_GUARDS)


def _split_sentences(text: str) -> list[str]:
    pieces, start = [], 0
    for i, ch in enumerate(text):
        if ch in SENTENCE_BREAKERS and i + 1 < len(text) and text[i + 1].isspace() and not _guarded(text, i):
            pieces.append(text[start:i + 1])
            start = i + 1
    pieces.append(text[start:])
    return [p for p in pieces if p.strip()]


def _tokenize(piece: str) -> list[str]:
    tokens: list[str] = []
    current: list[str] = []
    for ch in piece:
        if ch.isalnum() or ch == "-":
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    # hyphens survive only inside a token
    cleaned = (t.strip("-").lower() for t in tokens)
    return [t for t in cleaned if t]


def segment(text: str) -> list[list[str]]:
    """Split text into sentences of lowercase tokens.

    Sentences end at ``.?!;`` followed by whitespace unless guarded by a
    known abbreviation ("et al.", "e.g.", ...); tokens split on whitespace
    and punctuation with hyphens preserved inside tokens.
    """
    sentences = []
    for piece in _split_sentences(text):
        tokens = _tokenize(piece)
        if tokens:
            sentences.append(tokens)
    return sentences


def _is_numeric(token: str) -> bool:
    return not any(ch.isalpha() for ch in token)


def _singularize(token: str, vocabulary: frozenset[str] | set[str] | None) -> str:
    if (
        vocabulary is not None
        and len(token) > 3
        and token.endswith("s")
        and token[:-1] in vocabulary
    ):
        return token[:-1]
    return token


@dataclass(frozen=True)
class TermCandidate:
    """One candidate term: a suffix sub-run of a content-token run."""

    surface: str
    normalized: str
    token_count: int


def extract_candidates(
    sentence: Sequence[str],
    stoplist: Iterable[str],
    singular_vocabulary: frozenset[str] | set[str] | None = None,
) -> list[TermCandidate]:
    """Candidates of one sentence: maximal content runs plus their suffixes.

    Stoplist words and numeric tokens break runs. When a corpus-wide token
    vocabulary is supplied, a trailing "s" is stripped from tokens longer
    than 3 characters whose singular form is already in the vocabulary.
    """
    stopset = stoplist if isinstance(stoplist, (set, frozenset)) else frozenset(stoplist)
    runs: list[list[str]] = []
    current: list[str] = []
    for token in sentence:
        if token in stopset or _is_numeric(token):
            if current:
                runs.append(current)
                current = []
        else:
            current.append(token)
    if current:
        runs.append(current)
    candidates = []
    for run in runs:
        for start in range(len(run)):
            tokens = run[start:]
            normalized = " ".join(_singularize(t, singular_vocabulary) for t in tokens)
            candidates.append(TermCandidate(" ".join(tokens), normalized, len(tokens)))
    return candidates


@dataclass(frozen=True)
class TextUnit:
    """One unit of analysis: a title+abstract or one citation context."""

    unit_id: str
    source: str
    text: str
    origin: str | tuple[str, str, int]


def make_units(source: DocumentSet | Iterable[CitationContext], mode: str) -> list[TextUnit]:
    """Turn documents or contexts into text units.

    ``title_abstract`` concatenates title and abstract (title alone when the
    abstract is missing), one unit per document; ``citation_context`` yields
    one unit per context.
    """
    units: list[TextUnit] = []
    if mode == TITLE_ABSTRACT:
        for doc in source:
            if not isinstance(doc, Document):
                raise ConsistencyError(f"title_abstract mode needs documents, got {type(doc).__name__}")
            text = f"{doc.title} {doc.abstract}" if doc.abstract else doc.title
            units.append(TextUnit(doc.id, mode, text, doc.id))
    elif mode == CITATION_CONTEXT:
        for ctx in source:
            if not isinstance(ctx, CitationContext):
                raise ConsistencyError(f"citation_context mode needs contexts, got {type(ctx).__name__}")
            unit_id = f"{ctx.citing_id}::{ctx.cited_id}::{ctx.ordinal}"
            units.append(TextUnit(unit_id, mode, ctx.text, (ctx.citing_id, ctx.cited_id, ctx.ordinal)))
    else:
        raise ConfigError(f"unknown unit mode {mode!r}")
    seen: set[str] = set()
    for unit in units:
        if unit.unit_id in seen:
            raise ConsistencyError(f"duplicate unit id {unit.unit_id!r}")
        seen.add(unit.unit_id)
    return units


@dataclass(frozen=True)
class LexiconEntry:
    term: str
    unit_counts: dict[str, int]  # unit id -> occurrences inside that unit

    @property
    def occurrence_count(self) -> int:
        return len(self.unit_counts)

    @property
    def unit_ids(self) -> frozenset[str]:
        return frozenset(self.unit_counts)


@dataclass(frozen=True)
class Lexicon:
    """Retained terms with per-unit occurrence data, sorted by term."""

    terms: dict[str, LexiconEntry]
    min_occurrences: int
    n_units: int
    applied_exclusions: int
    applied_merges: int

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: object) -> bool:
        return term in self.terms

    def __iter__(self) -> Iterator[LexiconEntry]:
        return iter(self.terms.values())

    def occurrence_count(self, term: str) -> int:
        return self.terms[term].occurrence_count


def resolve_thesaurus(mapping: Mapping[str, str]) -> dict[str, str]:
    """Compress variant->canonical chains to fixpoints; cycles are a ConfigError."""
    resolved: dict[str, str] = {}
    for variant in mapping:
        seen = [variant]
        target = variant
        while target in mapping:
            target = mapping[target]
            if target in seen:
                raise ConfigError(f"thesaurus cycle: {' -> '.join(seen + [target])}")
            seen.append(target)
        if target != variant:
            resolved[variant] = target
    return resolved


def build_lexicon(
    units: Sequence[TextUnit],
    min_occurrences: int = 4,
    exclusions: Iterable[str] = (),
    thesaurus: Mapping[str, str] | None = None,
    stoplist: Iterable[str] = (),
) -> Lexicon:
    """Count candidate terms per unit (binary) and keep the frequent ones.

    The thesaurus is applied before counting, so merged variants pool their
    unit sets; exclusion terms are removed after thresholding; a term whose
    normalized form equals a stoplist word never enters. The result does not
    depend on unit order.
    """
    if min_occurrences < 1:
        raise ConfigError(f"min_occurrences must be >= 1, got {min_occurrences}")
    stopset = frozenset(stoplist)
    exclusion_set = frozenset(exclusions)
    canon = resolve_thesaurus(thesaurus or {})

    # First pass: segment every unit once; the full token vocabulary drives
    # the conservative plural merge, keeping the result order-invariant.
    segmented: list[tuple[str, list[list[str]]]] = []
    vocabulary: set[str] = set()
    seen_units: set[str] = set()
    for unit in units:
        if unit.unit_id in seen_units:
            raise ConsistencyError(f"duplicate unit id {unit.unit_id!r}")
        seen_units.add(unit.unit_id)
        sentences = segment(strip_citation_authors(unit.text))
        segmented.append((unit.unit_id, sentences))
        for sentence in sentences:
            vocabulary.update(sentence)

    counts: dict[str, dict[str, int]] = {}
    merged_variants: set[str] = set()
    for unit_id, sentences in segmented:
        per_unit: Counter[str] = Counter()
        for sentence in sentences:
            for cand in extract_candidates(sentence, stopset, vocabulary):
                term = cand.normalized
                if term in canon:
                    merged_variants.add(term)
                    term = canon[term]
                if term in stopset:
                    continue
                per_unit[term] += 1
        for term, times in per_unit.items():
            counts.setdefault(term, {})[unit_id] = times

    kept = {term: uc for term, uc in counts.items() if len(uc) >= min_occurrences}
    removed = sorted(set(kept) & exclusion_set)
    for term in removed:
        del kept[term]

    entries = {
        term: LexiconEntry(term, dict(sorted(kept[term].items())))
        for term in sorted(kept)
    }
    return Lexicon(
        terms=entries,
        min_occurrences=min_occurrences,
        n_units=len(units),
        applied_exclusions=len(removed),
        applied_merges=len(merged_variants),
    )


def load_word_list(path: str | Path) -> list[str]:
    """Read a word-list file: one entry per line, '#' comments, blanks skipped."""
    entries = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        entry = line.split("#", 1)[0].strip()
        if entry:
            entries.append(entry.lower())
    return entries


def load_thesaurus(path: str | Path) -> dict[str, str]:
    """Read a two-column TSV thesaurus: variant<TAB>canonical."""
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ParseError(f"{path}:{lineno}: expected 'variant<TAB>canonical'")
        mapping[parts[0].strip().lower()] = parts[1].strip().lower()
    return mapping


def _builtin(name: str) -> str:
    return resources.files("citemap").joinpath("data").joinpath(name).read_text(encoding="utf-8")


def default_stoplist() -> frozenset[str]:
    """The bundled English stoplist."""
    lines = _builtin("stoplist.txt").splitlines()
    return frozenset(w.split("#", 1)[0].strip().lower() for w in lines if w.split("#", 1)[0].strip())


def default_exclusions() -> frozenset[str]:
    """The bundled exclusion list (structured-abstract boilerplate)."""
    lines = _builtin("exclusions.txt").splitlines()
    return frozenset(w.split("#", 1)[0].strip().lower() for w in lines if w.split("#", 1)[0].strip())
