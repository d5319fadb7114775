"""Model server for span extraction and text embedding.

Serves a token-classification checkpoint behind POST /extract and a
registry of encoder checkpoints behind POST /embed, with the wire
contracts shared with the retrieval client (see ../schemas at the
repository root).
"""

from .app import create_app
from .embedder import TextEmbedder
from .extractor import SpanExtractor, merge_positive_tokens
from .settings import Settings

__version__ = "0.1.0"
