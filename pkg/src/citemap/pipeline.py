"""End-to-end pipeline: corpus -> units -> lexicon -> network -> map files.

Defaults: binary counting, minimum term occurrence 4, the 60% most relevant
terms kept, resolution 1.0, seed 42. A run writes all exports plus a
manifest holding every tunable parameter and the SHA-256 of every input,
and contains no timestamps, so identical inputs reproduce identical bytes.
The manifest doubles as a config file: feeding it back in reproduces the
run.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

from . import __version__
from .clustering import Clustering, cluster
from .compare import ComparisonReport, triplet_report
from .corpus import CitationContext, DocumentSet, dataset_stats, load_corpus
from .errors import CitemapError, ConfigError, StageError
from .exports import export_graph_json, export_map, export_network, render_svg
from .layout import MapLayout, layout
from .network import (
    CoocNetwork,
    SimilarityMatrix,
    association_strength,
    count_cooccurrences,
    relevance_scores,
    select_top_terms,
)
from .terms import (
    CITATION_CONTEXT,
    TITLE_ABSTRACT,
    Lexicon,
    TextUnit,
    build_lexicon,
    default_exclusions,
    default_stoplist,
    load_thesaurus,
    load_word_list,
    make_units,
)

MODES = ("title-abstract", "citation-context")
DOC_SETS = ("cited", "citing", "both")


@dataclass
class PipelineConfig:
    """All tunables of one run. A bare config runs the standard settings."""

    corpus: str | None = None
    mode: str = "title-abstract"
    doc_set: str = "cited"
    min_occurrences: int = 4
    counting: str = "binary"
    relevance_fraction: float = 0.6
    resolution: float = 1.0
    seed: int = 42
    restarts: int = 10
    stoplist: str | None = None
    exclusions: str | None = None
    thesaurus: str | None = None
    out_dir: str = "out"
    svg_node_scale: float = 1.0
    layout_max_iter: int = 10_000
    layout_tol: float = 1e-8

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.doc_set not in DOC_SETS:
            raise ConfigError(f"doc_set must be one of {DOC_SETS}, got {self.doc_set!r}")
        if self.min_occurrences < 1:
            raise ConfigError(f"min_occurrences must be >= 1, got {self.min_occurrences}")
        if self.counting not in ("binary", "full"):
            raise ConfigError(f"counting must be 'binary' or 'full', got {self.counting!r}")
        if not 0 < self.relevance_fraction <= 1:
            raise ConfigError(f"relevance_fraction must be in (0, 1], got {self.relevance_fraction}")
        if self.resolution <= 0:
            raise ConfigError(f"resolution must be > 0, got {self.resolution}")
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "PipelineConfig":
        if "parameters" in mapping and isinstance(mapping["parameters"], dict):
            mapping = mapping["parameters"]  # accept a manifest as config
        known = set(cls.__dataclass_fields__)
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        config = cls(**mapping)
        config.validate()
        return config

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        try:
            mapping = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid config JSON: {exc.msg}") from exc
        if not isinstance(mapping, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_mapping(mapping)


def builtin_corpus_path(name: str) -> Path:
    """Path of a bundled corpus ('demo' or 'planted')."""
    resource = resources.files("citemap").joinpath("data").joinpath(f"{name}_corpus.jsonl")
    with resources.as_file(resource) as concrete:
        return Path(concrete)


@dataclass
class WordLists:
    stoplist: frozenset[str]
    exclusions: frozenset[str]
    thesaurus: dict[str, str]
    digests: dict[str, str | None]


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _resolve_word_lists(config: PipelineConfig) -> WordLists:
    digests: dict[str, str | None] = {}
    if config.stoplist:
        stoplist = frozenset(load_word_list(config.stoplist))
        digests["stoplist"] = _sha256(Path(config.stoplist).read_bytes())
    else:
        stoplist = default_stoplist()
        digests["stoplist"] = _sha256(resources.files("citemap").joinpath("data/stoplist.txt").read_bytes())
    if config.exclusions:
        exclusions = frozenset(load_word_list(config.exclusions))
        digests["exclusions"] = _sha256(Path(config.exclusions).read_bytes())
    else:
        exclusions = default_exclusions()
        digests["exclusions"] = _sha256(resources.files("citemap").joinpath("data/exclusions.txt").read_bytes())
    if config.thesaurus:
        thesaurus = load_thesaurus(config.thesaurus)
        digests["thesaurus"] = _sha256(Path(config.thesaurus).read_bytes())
    else:
        thesaurus = {}
        digests["thesaurus"] = None
    return WordLists(stoplist, exclusions, thesaurus, digests)


@dataclass
class PipelineResult:
    """Everything one run produced, for programmatic use and the exporters."""

    config: PipelineConfig
    documents: DocumentSet
    contexts: list[CitationContext]
    units: list[TextUnit]
    lexicon: Lexicon
    full_network: CoocNetwork
    network: CoocNetwork
    similarity: SimilarityMatrix
    clustering: Clustering
    map_layout: MapLayout
    word_lists: WordLists
    corpus_digest: str
    warnings: list[str] = field(default_factory=list)


def _stage(name: str, call: Callable):
    try:
        return call()
    except CitemapError as exc:
        raise StageError(name, exc) from exc
    except (ValueError, OSError) as exc:
        raise StageError(name, exc) from exc


def _select_units(config: PipelineConfig, docs: DocumentSet, contexts: list[CitationContext]) -> list[TextUnit]:
    if config.mode == "citation-context":
        return make_units(contexts, CITATION_CONTEXT)
    if config.doc_set == "both":
        selected = docs
    else:
        selected = docs.filter_tag(config.doc_set)
    return make_units(selected, TITLE_ABSTRACT)


def analyze(config: PipelineConfig) -> PipelineResult:
    """Run every computation stage (no files written)."""
    config.validate()
    if not config.corpus:
        raise ConfigError("no corpus path configured; fetch one with 'ingest' first")
    corpus_path = Path(config.corpus)
    docs, contexts = _stage("ingest", lambda: load_corpus(corpus_path))
    corpus_digest = _sha256(corpus_path.read_bytes())
    word_lists = _stage("ingest", lambda: _resolve_word_lists(config))

    units = _stage("units", lambda: _select_units(config, docs, contexts))
    if not units:
        raise StageError("units", ValueError(f"no units for mode {config.mode!r} / set {config.doc_set!r}"))

    lexicon = _stage(
        "lexicon",
        lambda: build_lexicon(
            units,
            min_occurrences=config.min_occurrences,
            thesaurus=word_lists.thesaurus,
            stoplist=word_lists.stoplist,
        ),
    )
    if len(lexicon) == 0:
        raise StageError("lexicon", ValueError(f"empty lexicon: no term occurs in {config.min_occurrences}+ units"))

    full_network = _stage("network", lambda: count_cooccurrences(units, lexicon, config.counting))

    def _relevance_cut() -> CoocNetwork:
        scores = relevance_scores(full_network)
        selected = select_top_terms(full_network, scores, config.relevance_fraction, word_lists.exclusions)
        strengths = selected.node_strengths()
        connected = [i for i, w in enumerate(strengths) if w > 0]
        if len(connected) < len(selected.terms):
            # isolated terms have no similarity, hence no position on the map
            return selected.subnetwork(connected)
        return selected

    network = _stage("relevance", _relevance_cut)
    similarity = _stage("relevance", lambda: association_strength(network))

    clustering = _stage(
        "cluster", lambda: cluster(similarity, config.resolution, config.seed, config.restarts)
    )
    map_layout = _stage(
        "layout", lambda: layout(similarity, config.seed, config.layout_max_iter, config.layout_tol)
    )
    return PipelineResult(
        config=config,
        documents=docs,
        contexts=contexts,
        units=units,
        lexicon=lexicon,
        full_network=full_network,
        network=network,
        similarity=similarity,
        clustering=clustering,
        map_layout=map_layout,
        word_lists=word_lists,
        corpus_digest=corpus_digest,
    )


def build_manifest(result: PipelineResult, outputs: Iterable[str]) -> dict:
    config = result.config
    provenance = result.network.provenance
    return {
        "artifact": {"name": "citemap", "version": __version__},
        "parameters": asdict(config),
        "inputs": {
            "corpus_sha256": result.corpus_digest,
            "stoplist_sha256": result.word_lists.digests["stoplist"],
            "exclusions_sha256": result.word_lists.digests["exclusions"],
            "thesaurus_sha256": result.word_lists.digests["thesaurus"],
        },
        "summary": {
            "documents": len(result.documents),
            "contexts": len(result.contexts),
            "units": len(result.units),
            "lexicon_terms": len(result.lexicon),
            "retained_before_exclusions": provenance.get("retained_before_exclusions"),
            "retained_terms": len(result.network.terms),
            "edges": len(result.network.edges),
            "clusters": result.clustering.n_clusters,
            "clustering_quality": result.clustering.quality,
            "layout_objective": result.map_layout.objective,
            "layout_converged": result.map_layout.converged,
        },
        "outputs": sorted(outputs),
    }


OUTPUT_NAMES = (
    "map.tsv",
    "network.tsv",
    "network_terms.tsv",
    "graph.json",
    "map.svg",
    "corpus_stats.json",
    "manifest.json",
)


def run_pipeline(config: PipelineConfig) -> dict[str, Path]:
    """Execute all stages and write every artifact into ``config.out_dir``.

    Any stage failure aborts with the stage name and removes whatever was
    already written. Returns artifact name -> path.
    """
    result = analyze(config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    paths: dict[str, Path] = {}

    stats = dataset_stats(
        result.documents.filter_tag("cited"),
        result.documents.filter_tag("citing"),
        result.contexts,
    )
    try:
        def _write(name: str, writer: Callable[[Path], object]) -> None:
            target = out_dir / name
            writer(target)
            written.append(target)
            paths[name] = target

        _write("map.tsv", lambda p: export_map(result.map_layout, result.network, result.clustering, p))
        _write("network.tsv", lambda p: export_network(result.network, p, out_dir / "network_terms.tsv"))
        paths["network_terms.tsv"] = out_dir / "network_terms.tsv"
        written.append(out_dir / "network_terms.tsv")
        _write("graph.json", lambda p: export_graph_json(result.network, result.similarity,
                                                         result.map_layout, result.clustering, p))
        _write("map.svg", lambda p: render_svg(result.map_layout, result.network, result.clustering, p,
                                               sim=result.similarity, node_scale=config.svg_node_scale))
        _write("corpus_stats.json", lambda p: p.write_text(
            json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"))
        manifest = build_manifest(result, OUTPUT_NAMES)
        _write("manifest.json", lambda p: p.write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"))
    except Exception as exc:
        for target in written:
            target.unlink(missing_ok=True)
        if isinstance(exc, StageError):
            raise
        raise StageError("export", exc) from exc
    return paths


def compare_networks(config: PipelineConfig) -> ComparisonReport:
    """Build the three networks (cited, citing, context) and compare them."""
    variants = {
        "cited": replace(config, mode="title-abstract", doc_set="cited"),
        "citing": replace(config, mode="title-abstract", doc_set="citing"),
        "context": replace(config, mode="citation-context"),
    }
    networks = {label: analyze(variant).network for label, variant in variants.items()}
    return triplet_report(networks["cited"], networks["citing"], networks["context"])
