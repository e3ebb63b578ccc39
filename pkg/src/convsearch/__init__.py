"""Rule-based conversational search: session-aware question completion,
question classification, Dirichlet-smoothed retrieval, answer-type
reranking, and TREC-style evaluation."""

from .classify import ClassifierRules, QuestionCategory, classify, default_rules
from .errors import ConvSearchError
from .evalkit import (Qrels, RunList, compare, evaluate, ndcg_at_k, parse_qrels,
                      parse_run, recall_at_k, write_run)
from .index import Document, InvertedIndex, build_index, load_index, save_index
from .pipeline import PipelineParams, SessionEngine, make_snippet, run_pipeline
from .rerank import CueLexicon, RerankParams, cue_count, default_lexicon, rerank
from .retrieval import RetrievalParams, ScoredDoc, WeightedQuery, search
from .rewrite import (FusionWeights, Topic, Turn, compose_weighted_query,
                      extract_topic_phrase, load_topics, resolve_references)
from .textproc import TextprocConfig

__version__ = "0.1.0"

__all__ = [
    "ClassifierRules", "QuestionCategory", "classify", "default_rules",
    "ConvSearchError",
    "Qrels", "RunList", "compare", "evaluate", "ndcg_at_k", "parse_qrels",
    "parse_run", "recall_at_k", "write_run",
    "Document", "InvertedIndex", "build_index", "load_index", "save_index",
    "PipelineParams", "SessionEngine", "make_snippet", "run_pipeline",
    "CueLexicon", "RerankParams", "cue_count", "default_lexicon", "rerank",
    "RetrievalParams", "ScoredDoc", "WeightedQuery", "search",
    "FusionWeights", "Topic", "Turn", "compose_weighted_query",
    "extract_topic_phrase", "load_topics", "resolve_references",
    "TextprocConfig",
    "__version__",
]
