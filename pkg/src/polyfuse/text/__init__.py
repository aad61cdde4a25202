"""Text pipeline: tokenization, embeddings, the recurrent classifier, and
bag-of-words baselines."""

from polyfuse.text.baselines import predict_bow, train_bow_baseline
from polyfuse.text.embeddings import (
    EMBEDDING_DIM,
    MAX_TOKENS,
    EmbeddingTable,
    UtteranceTensorText,
    embed_sequence,
    load_embeddings,
    save_embeddings,
)
from polyfuse.text.model import (
    TEXT_PIPELINE_VERSION,
    TextModelConfig,
    predict_text,
    predict_text_batch,
    text_penultimate_batch,
    train_text_model,
)
from polyfuse.text.tokenize import tokenize

__all__ = [
    "EMBEDDING_DIM",
    "EmbeddingTable",
    "MAX_TOKENS",
    "TEXT_PIPELINE_VERSION",
    "TextModelConfig",
    "UtteranceTensorText",
    "embed_sequence",
    "load_embeddings",
    "predict_bow",
    "predict_text",
    "predict_text_batch",
    "save_embeddings",
    "text_penultimate_batch",
    "tokenize",
    "train_bow_baseline",
    "train_text_model",
]
