"""Keyword extraction for scientific abstracts.

TextRank over co-occurrence graphs, K-Means clustering of precomputed
document embeddings, NER annotations as keyword candidates, and fuzzy-match
precision/recall evaluation for all three.
"""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    DocumentRecord,
    SplitResult,
    parse_corpus,
    parse_corpus_text,
    parse_keyword_list,
    split_corpus,
)
from .textproc import Category, Normalizer, PipelineConfig, Token, TokenizedText, filter_tokens, tokenize
from .textrank import (
    CooccurrenceGraph,
    Keyphrase,
    RankConfig,
    RankMode,
    ScoredTerm,
    agglomerate_phrases,
    build_graph,
    extract_keywords,
    rank_terms,
    stationary_scores,
)
from .clustering import (
    ClusterModel,
    EmbeddingTable,
    build_cluster_reference,
    extract_cluster_keyphrases,
    kmeans,
    load_embeddings,
)
from .evaluation import (
    EvalReport,
    InstanceScore,
    MatchConfig,
    aggregate,
    evaluate_cluster,
    evaluate_instances,
    match_lists,
    score_instance,
    similarity,
)
from .nermatch import (
    ModelManifest,
    NerAnnotation,
    evaluate_ner_as_keywords,
    keyword_presence,
    load_annotations,
)
