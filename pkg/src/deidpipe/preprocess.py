"""Sentence boundary detection and offset-preserving tokenization.

The sentence detector is a clinical-note heuristic behind a small config
surface so a smarter implementation can be swapped in without touching the
rest of the pipeline. Tokens always index into the original document, never
into copies, so downstream spans line up with the source text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import _kernels
from .model import Span

_TERMINAL = ".!?"
_PUNCT_RUN_RE = re.compile(r"[.!?]+")
_LINE_RE = re.compile(r"[^\n]*\n|[^\n]+$")


@dataclass(frozen=True)
class SentenceConfig:
    """Abbreviations are stored casefolded without the trailing period."""

    abbreviations: frozenset[str] = frozenset()


@dataclass(frozen=True)
class SentenceSpan:
    span: Span
    index: int


@dataclass(frozen=True)
class Token:
    span: Span
    text: str
    sentence_index: int


def load_abbreviations(path) -> frozenset[str]:
    """One entry per line, UTF-8, ``#`` comments; trailing periods dropped."""
    entries = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            entries.add(line.rstrip(".").casefold())
    return frozenset(entries)


def _word_before(text: str, pos: int) -> str:
    """The abbreviation-shaped token ending at pos (alnum runs joined by dots)."""
    i = pos
    while i > 0 and (text[i - 1].isalnum() or text[i - 1] == "."):
        i -= 1
    return text[i:pos]


def _punct_breaks(text: str, abbreviations: frozenset[str]) -> set[int]:
    breaks = set()
    for m in _PUNCT_RUN_RE.finditer(text):
        q = m.end()
        while q < len(text) and text[q].isspace():
            q += 1
        if q == m.end() or q == len(text) or not text[q].isupper():
            continue
        word = _word_before(text, m.start()).rstrip(".")
        if word.casefold() in abbreviations:
            continue
        if len(word) == 1 and word.isalpha() and word.isupper():
            continue  # middle initial, "John F. Kennedy"
        breaks.add(m.end())
    return breaks


def _newline_breaks(text: str) -> set[int]:
    breaks = set()
    for m in _LINE_RE.finditer(text):
        line = m.group(0)
        if not line.endswith("\n"):
            continue
        content = line[:-1].rstrip()
        # blank lines always separate; unterminated lines end their sentence
        if not content or content[-1] not in _TERMINAL:
            breaks.add(m.end())
    return breaks


def detect_sentences(text: str, config: SentenceConfig | None = None) -> list[SentenceSpan]:
    """Heuristic sentence boundaries: terminal punctuation followed by
    whitespace and a capital, blank lines, and newlines after unterminated
    lines. The abbreviation list suppresses false splits ("Dr. Hopkins")."""
    if not text.strip():
        return []
    config = config or SentenceConfig()
    breaks = sorted(
        _punct_breaks(text, config.abbreviations) | _newline_breaks(text)
    )
    sentences = []
    start = 0
    for cut in [*breaks, len(text)]:
        segment = text[start:cut]
        lead = len(segment) - len(segment.lstrip())
        body = segment.strip()
        if body:
            s = start + lead
            sentences.append(
                SentenceSpan(span=Span(s, s + len(body)), index=len(sentences))
            )
        start = cut
    return sentences


def tokenize(sentence: SentenceSpan, text: str) -> list[Token]:
    """Maximal alphanumeric runs plus single-character special tokens;
    whitespace yields nothing. Spans index into the original document."""
    base = sentence.span.start
    chunk = text[base : sentence.span.end]
    return [
        Token(
            span=Span(base + s, base + e),
            text=chunk[s:e],
            sentence_index=sentence.index,
        )
        for s, e in _kernels.tokenize_spans(chunk)
    ]


def tokenize_document(text: str, config: SentenceConfig | None = None) -> list[Token]:
    """Sentence-detect then tokenize the whole document in one call."""
    tokens = []
    for sentence in detect_sentences(text, config):
        tokens.extend(tokenize(sentence, text))
    return tokens
