"""Shared fixtures and tiny builders for the test suite."""

from __future__ import annotations

import pytest

from citemap.corpus import CitationContext, Document
from citemap.network import CoocNetwork, SimilarityMatrix, TermNode
from citemap.pipeline import builtin_corpus_path
from citemap.terms import TextUnit


@pytest.fixture(scope="session")
def demo_corpus():
    return builtin_corpus_path("demo")


@pytest.fixture(scope="session")
def planted_corpus():
    return builtin_corpus_path("planted")


def doc(doc_id: str, set_tag: str = "cited", title: str = "untitled", **kwargs) -> Document:
    return Document(id=doc_id, title=title, set_tag=set_tag, **kwargs)


def ctx(citing: str, cited: str, text: str = "some snippet", ordinal: int = 1) -> CitationContext:
    return CitationContext(citing, cited, text, ordinal)


def unit(unit_id: str, text: str, source: str = "title_abstract") -> TextUnit:
    return TextUnit(unit_id, source, text, unit_id)


def network(term_occurrences: dict[str, int], edges: dict[tuple[int, int], int],
            counting_mode: str = "binary") -> CoocNetwork:
    terms = tuple(TermNode(term, occ) for term, occ in term_occurrences.items())
    return CoocNetwork(terms, dict(edges), counting_mode)


def sim(n: int, strengths: dict[tuple[int, int], float]) -> SimilarityMatrix:
    return SimilarityMatrix(tuple(f"t{k}" for k in range(n)), dict(strengths), tuple([0] * n), 0)
