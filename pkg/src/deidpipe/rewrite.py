"""Final text rewriting: masking or obfuscation over merged chunks.

Replacements are computed left-to-right (so per-patient name maps fill in
document order) and applied right-to-left (so earlier offsets stay valid).
Characters outside chunk spans are never touched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import dates, surrogates
from .model import Document, EntityChunk, EntityLabel, Span
from .seeding import keyed_rng
from .surrogates import PatientContext

MASK_ENTITY = "mask-entity"
MASK_FIXED = "mask-fixed"
MASK_LENGTH = "mask-length"
OBFUSCATE = "obfuscate"

MODES = (MASK_ENTITY, MASK_FIXED, MASK_LENGTH, OBFUSCATE)
_MODE_ALIASES = {"mask-same-length": MASK_LENGTH}

_NAME_LABELS = {EntityLabel.PATIENT, EntityLabel.DOCTOR, EntityLabel.NAME}
_DIGIT_LABELS = {EntityLabel.PHONE, EntityLabel.ID, EntityLabel.ZIP, EntityLabel.CONTACT}
_AGE_NUM_RE = re.compile(r"\d{1,3}")


class PipelineInvariantError(RuntimeError):
    """Overlapping or misaligned chunks reached the rewriter: a bug in an
    upstream stage, never a user error."""


def normalize_mode(mode: str) -> str:
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"unknown rewrite mode {mode!r}")
    return mode


@dataclass(frozen=True)
class RewritePolicy:
    mode: str = MASK_ENTITY
    fixed_mask_width: int = 3
    whitelist: frozenset[EntityLabel] = frozenset()
    length_mode: str = "free"  # obfuscation only: "free" | "same-length"
    date_fallback: str = "mask"  # unparseable dates: "mask" | "random"

    def __post_init__(self):
        object.__setattr__(self, "mode", normalize_mode(self.mode))
        if self.fixed_mask_width < 1:
            raise ValueError("fixed_mask_width must be >= 1")
        if self.length_mode not in ("free", "same-length"):
            raise ValueError(f"unknown length_mode {self.length_mode!r}")
        if self.date_fallback not in ("mask", "random"):
            raise ValueError(f"unknown date_fallback {self.date_fallback!r}")


@dataclass(frozen=True)
class Replacement:
    chunk: EntityChunk
    replacement: str
    output_span: Span


@dataclass(frozen=True)
class RewriteResult:
    text: str
    replacements: tuple[Replacement, ...]


@dataclass
class Obfuscator:
    """Routes chunks to the right surrogate generator.

    Dates go through parse → per-patient day shift → re-render in the
    original format; ages stay inside their age group with surrounding text
    preserved; names map component-wise per patient; numeric identifiers
    get digit substitution; everything else draws from its label vocabulary.
    """

    name_vocab: surrogates.NameVocabulary | None = None
    vocabs: dict = field(default_factory=dict)  # EntityLabel -> SurrogateVocabulary
    month_table: dates.MonthTable | None = None
    date_order: str = "MDY"
    titles: tuple[str, ...] = ()
    user_dictionary: dict | None = None
    age_table: surrogates.AgeGroupTable = field(default_factory=surrogates.AgeGroupTable)

    def replacement_for(
        self, chunk: EntityChunk, ctx: PatientContext, policy: RewritePolicy
    ) -> str:
        same_length = policy.length_mode == "same-length"
        override = surrogates.lookup_override(
            chunk.text, chunk.label, self.user_dictionary
        )
        if override is not None:
            if chunk.label in _NAME_LABELS:
                surrogates.pin_name_override(ctx, chunk.text, override)
            return surrogates.force_length(override, len(chunk.text)) if same_length else override

        if chunk.label is EntityLabel.DATE:
            out = self._fake_date(chunk.text, ctx, policy)
        elif chunk.label is EntityLabel.AGE:
            out = self._fake_age_text(chunk.text, ctx, same_length)
        elif chunk.label in _NAME_LABELS:
            if self.name_vocab is None:
                raise surrogates.SurrogateError("no name vocabulary configured")
            out = surrogates.fake_name(
                chunk.text, ctx, surrogates.UNKNOWN, self.name_vocab,
                titles=self.titles, same_length=same_length,
            )
        elif chunk.label in _DIGIT_LABELS:
            out = surrogates.digit_substitute(chunk.text, ctx, chunk.label.value)
            if out == chunk.text:  # nothing numeric to change
                vocab = self.vocabs.get(chunk.label)
                out = (
                    surrogates.pick_surrogate(chunk.text, vocab, ctx, policy.length_mode)
                    if vocab
                    else "*" * len(chunk.text)
                )
        else:
            vocab = self.vocabs.get(chunk.label)
            if vocab is None:
                raise surrogates.SurrogateError(
                    f"no surrogate vocabulary for label {chunk.label.value}"
                )
            out = surrogates.pick_surrogate(chunk.text, vocab, ctx, policy.length_mode)
        return surrogates.force_length(out, len(chunk.text)) if same_length else out

    def _fake_date(self, text: str, ctx: PatientContext, policy: RewritePolicy) -> str:
        try:
            parsed = dates.parse_date(
                text, month_table=self.month_table, date_order=self.date_order
            )
        except dates.NotADate:
            if policy.date_fallback == "mask":
                return "*" * len(text)
            rng = keyed_rng(ctx.seed, "randdate", text)
            year = rng.randrange(1970, 2030)
            month = rng.randrange(1, 13)
            day = rng.randrange(1, 29)
            random_date = dates.ParsedDate(
                year=year, month=month, day=day, day_present=True,
                descriptor="MM/DD/YYYY",
            )
            return dates.render_date(
                random_date, month_table=self.month_table, date_order=self.date_order
            )
        shifted = dates.shift_date(parsed, ctx.day_shift)
        return dates.render_date(
            shifted, month_table=self.month_table, date_order=self.date_order
        )

    def _fake_age_text(self, text: str, ctx: PatientContext, same_length: bool) -> str:
        m = _AGE_NUM_RE.search(text)
        if not m:
            return "*" * len(text)
        age = int(m.group(0))
        fake = surrogates.fake_age(
            age, self.age_table, ctx, prefer_same_digits=True
        )
        return f"{text[: m.start()]}{fake}{text[m.end():]}"


def _validate_chunks(doc: Document, chunks: list[EntityChunk]) -> None:
    prev_end = -1
    for chunk in chunks:
        if chunk.span.start < prev_end:
            raise PipelineInvariantError(
                f"overlapping chunks reached rewrite at {chunk.span}"
            )
        if chunk.span.end > len(doc.text):
            raise PipelineInvariantError(f"chunk {chunk.span} outside document")
        if doc.text[chunk.span.start : chunk.span.end] != chunk.text:
            raise PipelineInvariantError(
                f"chunk text mismatch at {chunk.span}: {chunk.text!r}"
            )
        prev_end = chunk.span.end


def rewrite(
    doc: Document,
    chunks,
    policy: RewritePolicy,
    ctx: PatientContext | None = None,
    obfuscator: Obfuscator | None = None,
) -> RewriteResult:
    """Produce the de-identified text plus the replacement log.

    ``chunks`` is a MergedChunks or a non-overlapping chunk list; whitelisted
    labels pass through untouched (and unlogged — nothing to restore).
    """
    chunk_list = list(getattr(chunks, "chunks", chunks))
    chunk_list.sort(key=lambda c: c.span.start)
    _validate_chunks(doc, chunk_list)
    if policy.mode == OBFUSCATE and (ctx is None or obfuscator is None):
        raise ValueError("obfuscation requires a patient context and an obfuscator")

    replacements: list[Replacement] = []
    delta = 0
    for chunk in chunk_list:
        if chunk.label in policy.whitelist:
            continue
        if policy.mode == MASK_ENTITY:
            repl = chunk.label.value.upper()
        elif policy.mode == MASK_FIXED:
            repl = "*" * policy.fixed_mask_width
        elif policy.mode == MASK_LENGTH:
            repl = "*" * len(chunk.text)
        else:
            repl = obfuscator.replacement_for(chunk, ctx, policy)
        out_start = chunk.span.start + delta
        replacements.append(
            Replacement(
                chunk=chunk,
                replacement=repl,
                output_span=Span(out_start, out_start + len(repl)),
            )
        )
        delta += len(repl) - len(chunk.span)

    text = doc.text
    for r in reversed(replacements):
        text = (
            text[: r.chunk.span.start] + r.replacement + text[r.chunk.span.end :]
        )
    return RewriteResult(text=text, replacements=tuple(replacements))
