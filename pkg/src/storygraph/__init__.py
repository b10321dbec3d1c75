"""Story detection over social-media posts.

Filters a keyword-matched corpus down to assertions, links posts that
assert the same thing into a similarity graph, and extracts story
clusters either by modularity communities or by an agglomerative tf-idf
baseline, with chance-corrected metrics to compare the two.
"""

__version__ = "0.1.0"

from .corpus import BooleanQuery, Corpus, CorpusError, Post, QueryError, load_corpus, parse_query
from .louvain import ClusterHierarchy, Partition, cut_to_k, louvain_hierarchy, modularity
from .paraphrase import ParaphraseModel, is_paraphrase, train_paraphrase
from .pipeline import PipelineConfig, StoryReport, run_pipeline
from .simgraph import SimilarityGraph, build_graph

__all__ = [
    "BooleanQuery",
    "ClusterHierarchy",
    "Corpus",
    "CorpusError",
    "ParaphraseModel",
    "Partition",
    "PipelineConfig",
    "Post",
    "QueryError",
    "SimilarityGraph",
    "StoryReport",
    "build_graph",
    "cut_to_k",
    "is_paraphrase",
    "load_corpus",
    "louvain_hierarchy",
    "modularity",
    "parse_query",
    "run_pipeline",
    "train_paraphrase",
    "__version__",
]
