"""Corpus model, JSONL loading, and dataset statistics."""

from __future__ import annotations

import json
import warnings

import pytest

from citemap.corpus import (
    CitationContext,
    Document,
    DocumentSet,
    dataset_stats,
    load_corpus,
    normalize_doi,
    write_corpus,
)
from citemap.errors import CitemapWarning, ConfigError, ParseError

from conftest import ctx, doc


def write_lines(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


class TestDocument:
    def test_doi_normalized(self):
        d = doc("a", doi="https://doi.org/10.1000/XYZ.12")
        assert d.doi == "10.1000/xyz.12"

    @pytest.mark.parametrize("raw", ["10.1/x", "DOI:10.5/ABC", "http://dx.doi.org/10.9/q"])
    def test_doi_accepts_common_shapes(self, raw):
        assert doc("a", doi=raw).doi.startswith("10.")

    @pytest.mark.parametrize("raw", ["garbage", "11.1000/x", ""])
    def test_bad_doi_rejected(self, raw):
        with pytest.raises(ValueError):
            doc("a", doi=raw)

    def test_empty_id_rejected(self):
        with pytest.raises(ValueError):
            Document(id="", title="t", set_tag="cited")

    def test_bad_set_tag_rejected(self):
        with pytest.raises(ValueError):
            Document(id="a", title="t", set_tag="reviewer")

    def test_normalize_doi_blank(self):
        assert normalize_doi("   ") is None
        assert normalize_doi(None) is None


class TestCitationContext:
    def test_text_trimmed(self):
        c = CitationContext("a", "b", "  snippet \n")
        assert c.text == "snippet"

    def test_blank_text_rejected(self):
        with pytest.raises(ValueError):
            CitationContext("a", "b", "   ")

    def test_ordinal_must_be_positive(self):
        with pytest.raises(ValueError):
            CitationContext("a", "b", "x", ordinal=0)


class TestDocumentSet:
    def test_insertion_order_kept(self):
        ds = DocumentSet([doc("b"), doc("a"), doc("c")])
        assert ds.ids() == ("b", "a", "c")

    def test_first_wins_on_add(self):
        ds = DocumentSet()
        ds.add(doc("a", title="first"))
        assert not ds.add(doc("a", title="second"))
        assert ds.get("a").title == "first"

    def test_filter_tag(self):
        ds = DocumentSet([doc("a", "cited"), doc("b", "citing"), doc("c", "cited")])
        assert ds.filter_tag("cited").ids() == ("a", "c")


class TestLoadCorpus:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        docs, contexts = load_corpus(path)
        assert len(docs) == 0 and contexts == []

    def test_documents_and_context(self, tmp_path):
        path = tmp_path / "mini.jsonl"
        write_lines(path, [
            {"kind": "document", "id": "a", "title": "One", "set_tag": "cited"},
            {"kind": "document", "id": "b", "title": "Two", "set_tag": "citing"},
            {"kind": "context", "citing_id": "b", "cited_id": "a", "text": "around the citation", "ordinal": 1},
        ])
        docs, contexts = load_corpus(path)
        assert len(docs) == 2
        assert len(contexts) == 1
        assert contexts[0].citing_id == "b" and contexts[0].cited_id == "a"

    def test_dangling_reference_warns_once(self, tmp_path):
        path = tmp_path / "dangling.jsonl"
        write_lines(path, [
            {"kind": "document", "id": "b", "title": "Two", "set_tag": "citing"},
            {"kind": "context", "citing_id": "b", "cited_id": "ghost", "text": "snippet", "ordinal": 1},
        ])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            docs, contexts = load_corpus(path)
        assert len(contexts) == 1  # warning, not fatal
        assert sum(issubclass(w.category, CitemapWarning) for w in caught) == 1

    def test_duplicate_id_first_wins_and_warns(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        write_lines(path, [
            {"kind": "document", "id": "a", "title": "First", "set_tag": "cited"},
            {"kind": "document", "id": "a", "title": "Second", "set_tag": "cited"},
        ])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            docs, _ = load_corpus(path)
        assert len(docs) == 1
        assert docs.get("a").title == "First"
        assert sum(issubclass(w.category, CitemapWarning) for w in caught) == 1

    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"kind": "document", "id": "a", "title": "x", "set_tag": "cited"}\n{nope\n', encoding="utf-8")
        with pytest.raises(ParseError, match=r":2:"):
            load_corpus(path)

    def test_unknown_kind_names_line(self, tmp_path):
        path = tmp_path / "kind.jsonl"
        write_lines(path, [{"kind": "mystery"}])
        with pytest.raises(ParseError, match=r":1:"):
            load_corpus(path)

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_corpus(tmp_path / "x.csv", fmt="csv")

    def test_deterministic(self, tmp_path):
        path = tmp_path / "same.jsonl"
        write_lines(path, [
            {"kind": "document", "id": "a", "title": "One", "set_tag": "cited"},
            {"kind": "document", "id": "b", "title": "Two", "set_tag": "citing"},
            {"kind": "context", "citing_id": "b", "cited_id": "a", "text": "s", "ordinal": 1},
        ])
        first = load_corpus(path)
        second = load_corpus(path)
        assert list(first[0]) == list(second[0])
        assert first[1] == second[1]

    def test_round_trip_via_writer(self, tmp_path):
        docs = DocumentSet([doc("a", "cited", "One", doi="10.1/x", abstract="text", year=1999),
                            doc("b", "citing", "Two")])
        contexts = [ctx("b", "a", "context snippet", 1)]
        path = write_corpus(tmp_path / "rt.jsonl", docs, contexts)
        docs2, contexts2 = load_corpus(path)
        assert list(docs2) == list(docs)
        assert contexts2 == contexts


class TestDatasetStats:
    def test_disjoint_sets(self):
        cited = DocumentSet([doc("a"), doc("b")])
        citing = DocumentSet([doc("x", "citing"), doc("y", "citing")])
        assert dataset_stats(cited, citing, []).n_overlap == 0

    def test_two_shared_dois(self):
        cited = DocumentSet([doc("a", doi="10.1/one"), doc("b", doi="10.1/two"), doc("c")])
        citing = DocumentSet([
            doc("x", "citing", doi="10.1/one"),
            doc("y", "citing", doi="10.1/two"),
            doc("z", "citing", doi="10.1/three"),
        ])
        assert dataset_stats(cited, citing, []).n_overlap == 2

    def test_id_fallback_when_doi_missing(self):
        cited = DocumentSet([doc("shared")])
        citing = DocumentSet([doc("shared", "citing")])
        assert dataset_stats(cited, citing, []).n_overlap == 1

    def test_histogram_sums_to_context_count(self):
        # 428 contexts spread over 343 citing docs against 59 cited docs
        cited = DocumentSet([doc(f"c{k}") for k in range(59)])
        citing = DocumentSet([doc(f"r{k}", "citing") for k in range(343)])
        contexts = []
        for k in range(428):
            contexts.append(ctx(f"r{k % 343}", f"c{k % 59}", f"snippet {k}", ordinal=k // 343 + 1))
        stats = dataset_stats(cited, citing, contexts)
        assert stats.n_contexts == 428
        assert sum(stats.contexts_per_cited.values()) == 428
        assert stats.n_cited == 59 and stats.n_citing == 343

    def test_overlap_matches_brute_force(self):
        cited = DocumentSet([
            doc("a", doi="10.1/same-id-different-doi"),
            doc("b", doi="10.1/b"),
            doc("c"),
            doc("d"),
        ])
        citing = DocumentSet([
            doc("a", "citing", doi="10.1/conflicting"),  # same id, different DOI: DOI decides
            doc("b2", "citing", doi="10.1/b"),
            doc("c", "citing"),
            doc("e", "citing"),
        ])
        def brute_force():
            hits = 0
            for u in cited:
                for v in citing:
                    if u.doi and v.doi:
                        if u.doi == v.doi:
                            hits += 1
                            break
                    elif u.id == v.id:
                        hits += 1
                        break
            return hits
        assert dataset_stats(cited, citing, []).n_overlap == brute_force() == 2
