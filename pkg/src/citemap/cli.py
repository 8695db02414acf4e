"""Command-line front end.

Subcommands run the pipeline up to a stage and write that stage's artifact:
ingest (corpus stats, or fetch+dump from a provider), extract (lexicon),
build (network files), cluster, layout, export, compare, and pipeline
(everything plus the manifest). Settings come from flags, which override a
JSON config file, which overrides the built-in defaults.

Exit codes: 0 success, 2 configuration error, 3 input/parse error,
4 provider/transport error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import dataset_stats, load_corpus, write_corpus
from .errors import (
    CitemapError,
    ConfigError,
    ConsistencyError,
    ParseError,
    ProviderError,
    StageError,
)
from .exports import export_graph_json, export_map, export_network, render_svg
from .pipeline import PipelineConfig, analyze, compare_networks, run_pipeline
from .providers import HttpProvider, ProviderSpec, fetch_citing_with_contexts, fetch_publications

_FLAG_TO_FIELD = {
    "corpus": "corpus",
    "mode": "mode",
    "doc_set": "doc_set",
    "min_occurrences": "min_occurrences",
    "counting": "counting",
    "relevance_fraction": "relevance_fraction",
    "resolution": "resolution",
    "seed": "seed",
    "restarts": "restarts",
    "stoplist": "stoplist",
    "exclusions": "exclusions",
    "thesaurus": "thesaurus",
    "out": "out_dir",
}

def _settings_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("pipeline settings")
    group.add_argument("--config", help="JSON config file (or a previous run's manifest)")
    group.add_argument("--corpus", help="corpus dump (JSONL)")
    group.add_argument("--mode", choices=("title-abstract", "citation-context"),
                       help="unit mode (default title-abstract)")
    group.add_argument("--set", dest="doc_set", choices=("cited", "citing", "both"),
                       help="document set for title-abstract mode (default cited)")
    group.add_argument("--min-occurrences", dest="min_occurrences", type=int, help="term frequency threshold (default 4)")
    group.add_argument("--counting", choices=("binary", "full"), help="co-occurrence counting (default binary)")
    group.add_argument("--relevance-fraction", dest="relevance_fraction", type=float,
                       help="fraction of most relevant terms kept (default 0.6)")
    group.add_argument("--resolution", type=float, help="clustering resolution (default 1.0)")
    group.add_argument("--seed", type=int, help="random seed (default 42)")
    group.add_argument("--restarts", type=int, help="clustering restarts (default 10)")
    group.add_argument("--stoplist", help="stoplist file (default: bundled)")
    group.add_argument("--exclusions", help="exclusion list file (default: bundled)")
    group.add_argument("--thesaurus", help="thesaurus TSV (variant<TAB>canonical)")
    group.add_argument("--out", help="output directory (default out)")
    return parent


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    if getattr(args, "config", None):
        config = PipelineConfig.from_file(args.config)
    else:
        config = PipelineConfig()
    for flag, field_name in _FLAG_TO_FIELD.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, field_name, value)
    config.validate()
    return config


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")


def _out_dir(config: PipelineConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    out = _out_dir(config)
    if args.provider_config:
        if not args.query:
            raise ConfigError("--query is required when fetching from a provider")
        provider = HttpProvider(ProviderSpec.from_file(args.provider_config))
        cited = fetch_publications(provider, args.query, args.page_size)
        citing, contexts = fetch_citing_with_contexts(provider, list(cited.ids()), args.page_size)
        docs = cited
        for doc in citing:
            docs.add(doc)
        corpus_path = out / "corpus.jsonl"
        write_corpus(corpus_path, docs, contexts)
        config.corpus = str(corpus_path)
        print(f"wrote {corpus_path} ({len(docs)} documents, {len(contexts)} contexts)")
    if not config.corpus:
        raise ConfigError("either --corpus or --provider-config is required")
    docs, contexts = load_corpus(config.corpus)
    stats = dataset_stats(docs.filter_tag("cited"), docs.filter_tag("citing"), contexts)
    _write_json(out / "corpus_stats.json", stats.to_dict())
    print(f"{stats.n_cited} cited, {stats.n_citing} citing, {stats.n_contexts} contexts, "
          f"overlap {stats.n_overlap} -> {out / 'corpus_stats.json'}")
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = analyze(config)
    out = _out_dir(config)
    lexicon_path = out / "lexicon.tsv"
    rows = [f"{entry.term}\t{entry.occurrence_count}" for entry in result.lexicon]
    lexicon_path.write_text("\n".join(rows) + ("\n" if rows else ""), encoding="utf-8", newline="\n")
    print(f"{len(result.lexicon)} terms with {config.min_occurrences}+ occurrences -> {lexicon_path}")
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = analyze(config)
    out = _out_dir(config)
    export_network(result.network, out / "network.tsv", out / "network_terms.tsv")
    provenance = result.network.provenance
    print(f"{len(result.network.terms)} terms ({provenance.get('retained_before_exclusions')} before exclusions), "
          f"{len(result.network.edges)} edges -> {out / 'network.tsv'}")
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = analyze(config)
    out = _out_dir(config)
    path = out / "clusters.tsv"
    rows = [
        f"{i + 1}\t{node.term}\t{result.clustering.assignment[i]}"
        for i, node in enumerate(result.network.terms)
    ]
    path.write_text("\n".join(rows) + ("\n" if rows else ""), encoding="utf-8", newline="\n")
    print(f"{result.clustering.n_clusters} clusters at resolution {config.resolution} "
          f"(quality {result.clustering.quality:.6f}) -> {path}")
    return 0


def cmd_layout(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = analyze(config)
    out = _out_dir(config)
    path = export_map(result.map_layout, result.network, result.clustering, out / "map.tsv")
    state = "converged" if result.map_layout.converged else "max_iter reached"
    print(f"layout objective {result.map_layout.objective:.6f} ({state}, "
          f"{result.map_layout.iterations_used} iterations) -> {path}")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = analyze(config)
    out = _out_dir(config)
    export_map(result.map_layout, result.network, result.clustering, out / "map.tsv")
    export_network(result.network, out / "network.tsv", out / "network_terms.tsv")
    export_graph_json(result.network, result.similarity, result.map_layout, result.clustering, out / "graph.json")
    render_svg(result.map_layout, result.network, result.clustering, out / "map.svg",
               sim=result.similarity, node_scale=config.svg_node_scale)
    print(f"wrote map.tsv, network.tsv, network_terms.tsv, graph.json, map.svg under {out}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    report = compare_networks(config)
    out = _out_dir(config)
    path = out / "comparison.json"
    path.write_text(report.to_json(), encoding="utf-8", newline="\n")
    for metric in ("jaccard", "cosine"):
        matrix = getattr(report, metric)
        verdict = "holds" if report.ordering_holds[metric] else "does not hold"
        print(f"{metric}: sim(cited, context) = {matrix['cited']['context']:.4f}, "
              f"sim(citing, context) = {matrix['citing']['context']:.4f} -> ordering {verdict}")
    print(f"report -> {path}")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    paths = run_pipeline(config)
    print(f"wrote {len(paths)} artifacts under {Path(config.out_dir)}")
    for name in sorted(paths):
        print(f"  {paths[name]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citemap",
        description="Keyword co-occurrence maps from citation contexts and titles/abstracts.",
    )
    settings = _settings_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", parents=[settings], help="validate a corpus dump or fetch one from a provider")
    ingest.add_argument("--provider-config", help="JSON file with provider base URL and field mapping")
    ingest.add_argument("--query", help="entity query expression for the provider")
    ingest.add_argument("--page-size", dest="page_size", type=int, default=50)
    ingest.set_defaults(func=cmd_ingest)

    for name, func, help_text in (
        ("extract", cmd_extract, "build the thresholded lexicon"),
        ("build", cmd_build, "build the co-occurrence network files"),
        ("cluster", cmd_cluster, "cluster the network terms"),
        ("layout", cmd_layout, "compute the 2D map"),
        ("export", cmd_export, "write map, network, JSON, and SVG exports"),
        ("compare", cmd_compare, "compare the cited/citing/context networks"),
        ("pipeline", cmd_pipeline, "run everything and write the manifest"),
    ):
        command = sub.add_parser(name, parents=[settings], help=help_text)
        command.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cause = exc.cause
        if isinstance(cause, ConfigError):
            return 2
        if isinstance(cause, ProviderError):
            return 4
        return 3
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, ConsistencyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ProviderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except CitemapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
