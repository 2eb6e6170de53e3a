"""refspan: rank reference-document sentences against citing sentences.

The package covers the full pipeline: corpus ingestion, text
preprocessing, lexical and semantic sentence scorers (tf-idf, online
LDA topic vectors, skip-gram embeddings with word mover's distance),
WordNet synonym expansion, hybrid score mixing with a lambda sweep,
and retrieval evaluation with bootstrap significance testing.
"""

__version__ = "0.1.0"

from .errors import RefspanError, ConfigError

__all__ = ["RefspanError", "ConfigError", "__version__"]
