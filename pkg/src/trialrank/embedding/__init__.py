"""Text-to-vector backends: hashed TF-IDF, paragraph vectors, remote service."""

from .config import BACKENDS, DOC_FIELDS, EmbedderConfig, PvConfig
from .hashed import embed_hashed_tfidf, token_hash
from .paragraph import (
    ParagraphVectorModel,
    infer_vector,
    load_pv_model,
    negative_sampling_grad,
    negative_sampling_loss,
    train_paragraph_vectors,
)
from .remote import MAX_BATCH, embed_remote, embed_remote_many
from .text import document_text, tokenize
from .vectors import EmbeddingVector, make_vector
from .vocab import VocabModel, build_vocab

__all__ = [
    "BACKENDS",
    "DOC_FIELDS",
    "EmbedderConfig",
    "EmbeddingVector",
    "MAX_BATCH",
    "ParagraphVectorModel",
    "PvConfig",
    "VocabModel",
    "build_vocab",
    "document_text",
    "embed_hashed_tfidf",
    "embed_remote",
    "embed_remote_many",
    "infer_vector",
    "load_pv_model",
    "make_vector",
    "negative_sampling_grad",
    "negative_sampling_loss",
    "token_hash",
    "tokenize",
    "train_paragraph_vectors",
]
