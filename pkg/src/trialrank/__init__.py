"""Batch retrieval of clinical trials for patient topics, plus evaluation.

Pipeline: parse trial XML and topic files, embed both with a pluggable
backend (hashed TF-IDF, trained paragraph vectors, or a remote encoder),
rank by cosine similarity into standard run files, and score those against
graded qrels with NDCG/P/AP/Recall at configurable cutoffs.
"""

from . import errors
from .config import PipelineConfig, from_yaml, load_config, preset, save_config, to_yaml
from .corpus import (
    ClinicalTrialDoc,
    CorpusStats,
    clean_text,
    load_corpus,
    parse_trial_xml,
    segment_eligibility,
)
from .embedding import (
    EmbedderConfig,
    EmbeddingVector,
    ParagraphVectorModel,
    PvConfig,
    VocabModel,
    build_vocab,
    document_text,
    embed_hashed_tfidf,
    embed_remote,
    embed_remote_many,
    infer_vector,
    load_pv_model,
    tokenize,
    train_paragraph_vectors,
)
from .metrics import (
    MetricReport,
    QrelSet,
    average_precision_at_k,
    evaluate_run,
    ndcg_at_k,
    parse_qrels,
    precision_at_k,
    recall_at_k,
)
from .ranking import (
    RankedRun,
    RunEntry,
    VectorIndex,
    cosine_similarity,
    emit_run_file,
    format_run,
    parse_run_file,
    rank_all,
    rank_topic,
)
from .report import emit_report, summary_table_text
from .topics import Topic, flatten_fields, load_topics, parse_topics

__version__ = "0.1.0"

__all__ = [
    "ClinicalTrialDoc",
    "CorpusStats",
    "EmbedderConfig",
    "EmbeddingVector",
    "MetricReport",
    "ParagraphVectorModel",
    "PipelineConfig",
    "PvConfig",
    "QrelSet",
    "RankedRun",
    "RunEntry",
    "Topic",
    "VectorIndex",
    "VocabModel",
    "average_precision_at_k",
    "build_vocab",
    "clean_text",
    "cosine_similarity",
    "document_text",
    "embed_hashed_tfidf",
    "embed_remote",
    "embed_remote_many",
    "emit_report",
    "emit_run_file",
    "errors",
    "evaluate_run",
    "flatten_fields",
    "format_run",
    "from_yaml",
    "infer_vector",
    "load_config",
    "load_corpus",
    "load_pv_model",
    "load_topics",
    "ndcg_at_k",
    "parse_qrels",
    "parse_run_file",
    "parse_topics",
    "parse_trial_xml",
    "precision_at_k",
    "preset",
    "rank_all",
    "rank_topic",
    "recall_at_k",
    "save_config",
    "segment_eligibility",
    "summary_table_text",
    "to_yaml",
    "tokenize",
    "train_paragraph_vectors",
    "__version__",
]
