"""De-identification engine for free-text clinical notes.

Detection (gazetteer recognizers + contextual rules), priority-based chunk
merging, masking or consistency-preserving obfuscation, a re-identification
vault, and an entity-level evaluation harness, driven by per-language
resource packs.
"""

from ._kernels import BACKEND as kernel_backend
from .model import Document, EntityChunk, EntityLabel, Span, to_coarse
from .pipeline import Pipeline, PipelineConfig

__all__ = [
    "Document",
    "EntityChunk",
    "EntityLabel",
    "Pipeline",
    "PipelineConfig",
    "Span",
    "kernel_backend",
    "to_coarse",
]

__version__ = "0.1.0"
