"""Selects the kernel backend at import: compiled extension when available,
pure Python otherwise. ``DEIDPIPE_PURE=1`` forces the pure lane (used by the
benchmark and the lane-equivalence tests)."""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("DEIDPIPE_PURE"):
    _impl = _pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

BACKEND: str = _impl.BACKEND
tokenize_spans = _impl.tokenize_spans
levenshtein = _impl.levenshtein
scan_token_trie = _impl.scan_token_trie
