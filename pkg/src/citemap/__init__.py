"""citemap: keyword co-occurrence maps from citation contexts.

Builds keyword co-occurrence networks from titles/abstracts of a cited
paper set, from the papers citing it, and from the citation-context
snippets around those citations; clusters and lays out each network; and
compares the three.
"""

__version__ = "0.1.0"

from .clustering import Clustering, cluster, quality
from .compare import (
    ComparisonReport,
    FrequencyTable,
    frequency_table,
    term_set_similarity,
    triplet_report,
    weighted_profile_similarity,
)
from .corpus import (
    CitationContext,
    CorpusStats,
    Document,
    DocumentSet,
    dataset_stats,
    load_corpus,
    write_corpus,
)
from .errors import (
    CitemapError,
    CitemapWarning,
    ConfigError,
    ConsistencyError,
    ParseError,
    ProviderError,
    ResponseError,
    StageError,
    TransportError,
)
from .exports import (
    MapRecord,
    export_graph_json,
    export_map,
    export_network,
    map_records,
    read_map_file,
    read_network_file,
    render_svg,
)
from .layout import MapLayout, layout, layout_objective
from .network import (
    CoocNetwork,
    RelevanceScores,
    SimilarityMatrix,
    TermNode,
    association_strength,
    count_cooccurrences,
    relevance_scores,
    select_top_terms,
)
from .pipeline import PipelineConfig, PipelineResult, analyze, builtin_corpus_path, compare_networks, run_pipeline
from .providers import (
    FileProvider,
    GraphProvider,
    HttpProvider,
    ProviderSpec,
    fetch_citing_with_contexts,
    fetch_publications,
)
from .terms import (
    CITATION_CONTEXT,
    TITLE_ABSTRACT,
    Lexicon,
    TermCandidate,
    TextUnit,
    build_lexicon,
    default_exclusions,
    default_stoplist,
    extract_candidates,
    load_thesaurus,
    load_word_list,
    make_units,
    segment,
    strip_citation_authors,
)

__all__ = [name for name in dir() if not name.startswith("_")]
