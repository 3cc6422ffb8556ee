"""Pluggable entity recognizers.

The pipeline treats statistical NER as one swappable stage; what ships here
are gazetteer recognizers that honor the same contract: consume a document
plus its tokens, emit token-aligned `EntityChunk`s, never raise at inference
time. Anything that can misconfigure does so at load.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Protocol

from . import _kernels
from .model import Document, EntityChunk, EntityLabel, Span, is_phi_label, parse_label
from .preprocess import Token


class GazetteerError(ValueError):
    pass


def _normalize(text: str, case_sensitive: bool) -> str:
    text = unicodedata.normalize("NFC", text)
    return text if case_sensitive else text.casefold()


@dataclass
class Gazetteer:
    """A dictionary of entity surface forms matched over token windows.

    Entries are stored as normalized token sequences in a nested-dict trie
    (token → subtrie, "" marks an entry end) so lookup cost is independent
    of vocabulary size.
    """

    label: EntityLabel
    entries: frozenset[str]
    case_sensitive: bool = False
    max_entry_tokens: int = 8
    _trie: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_entries(
        cls,
        label: EntityLabel,
        raw_entries,
        case_sensitive: bool = False,
        max_entry_tokens: int = 8,
    ) -> "Gazetteer":
        normalized = []
        trie: dict = {}
        for raw in raw_entries:
            entry = _normalize(raw.strip(), case_sensitive)
            if not entry:
                continue
            parts = [entry[s:e] for s, e in _kernels.tokenize_spans(entry)]
            if len(parts) > max_entry_tokens:
                raise GazetteerError(
                    f"entry {raw!r} spans {len(parts)} tokens "
                    f"(limit {max_entry_tokens})"
                )
            node = trie
            for part in parts:
                node = node.setdefault(part, {})
            node[""] = True
            normalized.append(entry)
        if not normalized:
            raise GazetteerError("gazetteer has no entries")
        return cls(
            label=label,
            entries=frozenset(normalized),
            case_sensitive=case_sensitive,
            max_entry_tokens=max_entry_tokens,
            _trie=trie,
        )


def load_gazetteer(path, max_entry_tokens: int = 8) -> Gazetteer:
    """Load the one-entry-per-line format with a
    ``label=<EntityLabel>;case_sensitive=<bool>`` header."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        fields = {}
        for part in header.split(";"):
            if "=" not in part:
                raise GazetteerError(f"{path}: malformed header {header!r}")
            key, _, value = part.partition("=")
            fields[key.strip()] = value.strip()
        if "label" not in fields:
            raise GazetteerError(f"{path}: header missing label=")
        label = parse_label(fields["label"])
        case_sensitive = fields.get("case_sensitive", "false").lower() == "true"
        entries = [
            line.strip()
            for line in fh
            if line.strip() and not line.lstrip().startswith("#")
        ]
    try:
        return Gazetteer.from_entries(
            label, entries, case_sensitive=case_sensitive,
            max_entry_tokens=max_entry_tokens,
        )
    except GazetteerError as exc:
        raise GazetteerError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class RecognizerOutput:
    chunks: list[EntityChunk]
    recognizer_id: str


class Recognizer(Protocol):
    recognizer_id: str

    def recognize(self, doc: Document, tokens: list[Token]) -> RecognizerOutput: ...


def gazetteer_scan(
    tokens: list[Token],
    gazetteer: Gazetteer,
    text: str,
    source: str,
) -> list[EntityChunk]:
    """Greedy longest-match over token windows, one sentence at a time.

    Matching compares normalized token sequences, so entry whitespace and
    document whitespace need not agree; shorter overlapping matches are
    suppressed within this gazetteer only (cross-recognizer conflicts are
    the merger's job).
    """
    chunks = []
    is_phi = is_phi_label(gazetteer.label)
    sentence_start = 0
    n = len(tokens)
    while sentence_start < n:
        idx = tokens[sentence_start].sentence_index
        sentence_end = sentence_start
        while sentence_end < n and tokens[sentence_end].sentence_index == idx:
            sentence_end += 1
        group = tokens[sentence_start:sentence_end]
        norm = [_normalize(t.text, gazetteer.case_sensitive) for t in group]
        for i, count in _kernels.scan_token_trie(norm, gazetteer._trie):
            span = Span(group[i].span.start, group[i + count - 1].span.end)
            chunks.append(
                EntityChunk(
                    span=span,
                    label=gazetteer.label,
                    text=text[span.start : span.end],
                    source=source,
                    is_phi=is_phi,
                )
            )
        sentence_start = sentence_end
    return chunks


@dataclass
class GazetteerRecognizer:
    """Adapts one gazetteer to the recognizer contract."""

    name: str
    gazetteer: Gazetteer

    @property
    def recognizer_id(self) -> str:
        return f"gazetteer:{self.name}"

    def recognize(self, doc: Document, tokens: list[Token]) -> RecognizerOutput:
        chunks = gazetteer_scan(tokens, self.gazetteer, doc.text, self.recognizer_id)
        return RecognizerOutput(chunks=chunks, recognizer_id=self.recognizer_id)
