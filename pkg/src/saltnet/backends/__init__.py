"""Text-generation and embedding backends."""

from .base import (
    Backend,
    BackendError,
    GenerationRequest,
    RetryableBackendError,
    TerminalBackendError,
)
from .embedding import (
    DEFAULT_DIM,
    DimensionMismatchError,
    EmbeddingVector,
    HashingEmbedder,
    ZeroInformationError,
    cosine,
)
from .http import HttpBackend
from .mock import MockBackend
from .text import STOPWORDS, content_words, keyword_phrases, keywords, tokenize

__all__ = [
    "Backend",
    "BackendError",
    "DEFAULT_DIM",
    "DimensionMismatchError",
    "EmbeddingVector",
    "GenerationRequest",
    "HashingEmbedder",
    "HttpBackend",
    "MockBackend",
    "RetryableBackendError",
    "STOPWORDS",
    "TerminalBackendError",
    "ZeroInformationError",
    "content_words",
    "cosine",
    "keyword_phrases",
    "keywords",
    "tokenize",
]
