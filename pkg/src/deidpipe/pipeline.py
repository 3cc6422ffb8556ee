"""End-to-end document processing: preprocess → recognize → rules → merge →
rewrite. The CLI drives this; it is equally usable as a library.

A pipeline instance is cheap to build from a loaded pack and safe to use
across many documents. All obfuscation randomness is keyed by
(seed, patient, original), so two pipelines with the same pack and config
produce identical output for the same document no matter the order or
process in which documents are handled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dates import DayShiftPolicy, shift_for_patient
from .langpack import LanguagePack
from .merge import MergedChunks, MergePolicy, merge
from .model import Document, EntityLabel
from .preprocess import SentenceConfig, detect_sentences, tokenize
from .recognize import GazetteerRecognizer
from .rewrite import (
    OBFUSCATE,
    Obfuscator,
    RewritePolicy,
    RewriteResult,
    rewrite,
)
from .rules import apply_rules
from .surrogates import AgeGroupTable, PatientContext


class ConfigError(ValueError):
    pass


# labels whose surrogates do not come from a per-label vocabulary
_NON_VOCAB_LABELS = {
    EntityLabel.DATE,
    EntityLabel.AGE,
    EntityLabel.PHONE,
    EntityLabel.ID,
    EntityLabel.ZIP,
    EntityLabel.CONTACT,
    EntityLabel.PATIENT,
    EntityLabel.DOCTOR,
    EntityLabel.NAME,
    EntityLabel.DISEASE,
}


@dataclass(frozen=True)
class PipelineConfig:
    language: str = "en"
    mode: str = "mask-entity"
    fixed_mask_width: int = 3
    whitelist: frozenset = frozenset()
    length_mode: str = "free"
    date_fallback: str = "mask"
    seed: int | None = None
    shift_policy: DayShiftPolicy | None = None
    merge_policy: MergePolicy | None = None
    user_dictionary: dict | None = None
    age_table: AgeGroupTable = field(default_factory=AgeGroupTable)


@dataclass
class ProcessOutcome:
    doc: Document
    merged: MergedChunks
    result: RewriteResult

    def label_counts(self) -> dict:
        counts: dict[str, int] = {}
        for chunk in self.merged.chunks:
            counts[chunk.label.value] = counts.get(chunk.label.value, 0) + 1
        return counts


class Pipeline:
    def __init__(self, pack: LanguagePack, config: PipelineConfig):
        self.pack = pack
        self.config = config
        self.sentence_config = SentenceConfig(abbreviations=pack.abbreviations)
        self.recognizers = [
            GazetteerRecognizer(name, gaz)
            for name, gaz in sorted(pack.gazetteers.items())
        ]
        self.rewrite_policy = RewritePolicy(
            mode=config.mode,
            fixed_mask_width=config.fixed_mask_width,
            whitelist=frozenset(config.whitelist),
            length_mode=config.length_mode,
            date_fallback=config.date_fallback,
        )
        self.merge_policy = config.merge_policy or MergePolicy()
        self.obfuscator: Obfuscator | None = None
        self._contexts: dict[str, PatientContext] = {}
        if self.rewrite_policy.mode == OBFUSCATE:
            if config.seed is None:
                raise ConfigError("obfuscation requires an explicit --seed")
            self.shift_policy = config.shift_policy or DayShiftPolicy(seed=config.seed)
            self.obfuscator = Obfuscator(
                name_vocab=pack.name_vocab,
                vocabs=pack.vocabs,
                month_table=pack.month_table,
                date_order=pack.date_order,
                titles=pack.titles,
                user_dictionary=config.user_dictionary,
                age_table=config.age_table,
            )
            self._check_vocab_coverage()
        else:
            self.shift_policy = config.shift_policy or DayShiftPolicy(seed=config.seed or 0)

    def _check_vocab_coverage(self) -> None:
        """Obfuscation needs a surrogate source for every label the pack's
        recognizers can emit; fail at construction, not mid-corpus."""
        missing = []
        for name, gaz in sorted(self.pack.gazetteers.items()):
            label = gaz.label
            if label in _NON_VOCAB_LABELS:
                if label in (EntityLabel.PATIENT, EntityLabel.DOCTOR, EntityLabel.NAME):
                    if self.pack.name_vocab is None:
                        missing.append(f"name vocabulary (for gazetteer {name})")
                continue
            if label not in self.pack.vocabs:
                missing.append(f"vocab for label {label.value} (gazetteer {name})")
        if missing:
            raise ConfigError(
                "pack cannot obfuscate: missing " + ", ".join(sorted(set(missing)))
            )

    def detect(self, doc: Document) -> MergedChunks:
        """Run recognizers and rules, then resolve overlaps."""
        sentences = detect_sentences(doc.text, self.sentence_config)
        tokens = []
        for sentence in sentences:
            tokens.extend(tokenize(sentence, doc.text))
        chunks = []
        for recognizer in self.recognizers:
            chunks.extend(recognizer.recognize(doc, tokens).chunks)
        if self.pack.ruleset is not None:
            chunks.extend(apply_rules(doc, self.pack.ruleset))
        return merge(chunks, self.merge_policy)

    def context_for(self, doc: Document) -> PatientContext:
        """One context per patient (or per document when no patient id);
        cached so dictionary overrides stay pinned across a patient's docs."""
        key = doc.chunk_key()
        ctx = self._contexts.get(key)
        if ctx is None:
            ctx = PatientContext.create(
                self.config.seed or 0,
                key,
                day_shift=shift_for_patient(key, self.shift_policy),
                age_table=self.config.age_table,
            )
            self._contexts[key] = ctx
        return ctx

    def process(self, doc: Document) -> ProcessOutcome:
        merged = self.detect(doc)
        ctx = self.context_for(doc) if self.obfuscator else None
        result = rewrite(
            doc, merged, self.rewrite_policy, ctx=ctx, obfuscator=self.obfuscator
        )
        return ProcessOutcome(doc=doc, merged=merged, result=result)
