"""Consistent surrogate generation for obfuscation.

Within one patient, the same original name always maps to the same fake
name (component-wise, so a later bare "Jane" reuses the first name drawn
for "Jane Doe"); across patients the maps are independent. Every draw is
keyed by (patient seed, normalized original), which makes the whole thing a
pure function of (corpus, config, seed) — there is no draw ordering to
protect, so documents can be processed in any order or in parallel.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from ._kernels import levenshtein
from .model import EntityLabel
from .seeding import keyed_int, keyed_rng

FEMININE = "feminine"
MASCULINE = "masculine"
UNKNOWN = "unknown"

_TAG_TO_GENDER = {"f": FEMININE, "m": MASCULINE, "-": UNKNOWN, "u": UNKNOWN}


class SurrogateError(ValueError):
    pass


def normalize_key(text: str) -> str:
    return unicodedata.normalize("NFC", text).casefold()


@dataclass(frozen=True)
class VocabEntry:
    text: str
    gender: str = UNKNOWN
    locale: str = "en"


@dataclass(frozen=True)
class SurrogateVocabulary:
    """Entries bucketed by character length so same-length lookups do not
    scan the whole vocabulary."""

    label: str
    entries: tuple[VocabEntry, ...]
    length_buckets: dict = field(default_factory=dict)

    @classmethod
    def from_entries(cls, label: str, entries) -> "SurrogateVocabulary":
        entries = tuple(entries)
        if not entries:
            raise SurrogateError(f"empty surrogate vocabulary for {label}")
        buckets: dict[int, list[int]] = {}
        for i, entry in enumerate(entries):
            buckets.setdefault(len(entry.text), []).append(i)
        return cls(label=label, entries=entries, length_buckets=buckets)

    def gender_of(self, name: str) -> str:
        key = normalize_key(name)
        for entry in self.entries:
            if normalize_key(entry.text) == key:
                return entry.gender
        return UNKNOWN


def load_vocabulary(path, label: str) -> SurrogateVocabulary:
    """``entry<TAB>gender<TAB>locale`` rows; gender is f/m/- ."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise SurrogateError(
                    f"{path}:{lineno}: expected entry<TAB>gender<TAB>locale"
                )
            text, tag, locale = (p.strip() for p in parts)
            if tag not in _TAG_TO_GENDER:
                raise SurrogateError(f"{path}:{lineno}: unknown gender tag {tag!r}")
            entries.append(
                VocabEntry(
                    text=unicodedata.normalize("NFC", text),
                    gender=_TAG_TO_GENDER[tag],
                    locale=locale,
                )
            )
    try:
        return SurrogateVocabulary.from_entries(label, entries)
    except SurrogateError as exc:
        raise SurrogateError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class NameVocabulary:
    first: SurrogateVocabulary
    last: SurrogateVocabulary


@dataclass(frozen=True)
class AgeGroupTable:
    """Group start ages, ascending from 0; the last group is open-ended.

    The default mirrors common clinical bands: 0-4, 5-12, 13-19, 20-39,
    40-59, 60-79, 80+.
    """

    boundaries: tuple[int, ...] = (0, 5, 13, 20, 40, 60, 80)

    def __post_init__(self):
        if not self.boundaries or self.boundaries[0] != 0:
            raise ValueError("age groups must start at 0")
        if list(self.boundaries) != sorted(set(self.boundaries)):
            raise ValueError("age group boundaries must be strictly increasing")

    def group_of(self, age: int) -> tuple[int, int | None]:
        if age < 0:
            raise ValueError("age must be non-negative")
        for i in range(len(self.boundaries) - 1, -1, -1):
            lo = self.boundaries[i]
            if age >= lo:
                hi = (
                    self.boundaries[i + 1] - 1
                    if i + 1 < len(self.boundaries)
                    else None
                )
                return lo, hi
        raise AssertionError("unreachable")


@dataclass
class PatientContext:
    """Obfuscation state scoped to one patient (or one document when no
    patient id is known). The maps are caches of keyed draws, kept so the
    mapping is inspectable and overrides can pin entries."""

    patient_id: str
    seed: int
    day_shift: int = 0
    age_table: AgeGroupTable = field(default_factory=AgeGroupTable)
    name_map: dict = field(default_factory=dict)
    first_map: dict = field(default_factory=dict)
    last_map: dict = field(default_factory=dict)

    @classmethod
    def create(
        cls,
        global_seed: int,
        patient_id: str,
        day_shift: int = 0,
        age_table: AgeGroupTable | None = None,
    ) -> "PatientContext":
        return cls(
            patient_id=patient_id,
            seed=keyed_int(global_seed, "patient", patient_id),
            day_shift=day_shift,
            age_table=age_table or AgeGroupTable(),
        )


def force_length(text: str, n: int) -> str:
    """Pad (repeating the final character) or trim to exactly n characters."""
    if len(text) > n:
        return text[:n]
    if len(text) < n and text:
        return text + text[-1] * (n - len(text))
    return text


def _draw(candidates: list[str], rng) -> str:
    return candidates[rng.randrange(len(candidates))]


def _pick_name_component(
    original: str,
    vocab: SurrogateVocabulary,
    ctx: PatientContext,
    kind: str,
    gender: str,
    want_length: int | None,
) -> str:
    key = normalize_key(original)
    cache = ctx.first_map if kind == "first" else ctx.last_map
    if key in cache:
        return cache[key]
    pool = [
        e.text
        for e in vocab.entries
        if (gender == UNKNOWN or e.gender == gender or e.gender == UNKNOWN)
        and normalize_key(e.text) != key
    ]
    if not pool:
        raise SurrogateError(
            f"no {kind}-name surrogates available for gender={gender}"
        )
    if want_length is not None:
        sized = [t for t in pool if len(t) == want_length]
        if sized:
            pool = sized
    rng = keyed_rng(ctx.seed, "name", kind, key)
    choice = _draw(pool, rng)
    cache[key] = choice
    return choice


def _match_case(surrogate: str, original: str) -> str:
    if original.isupper():
        return surrogate.upper()
    if original.islower():
        return surrogate.lower()
    return surrogate


def fake_name(
    original: str,
    ctx: PatientContext,
    gender: str,
    vocab: NameVocabulary,
    titles: tuple[str, ...] = (),
    same_length: bool = False,
) -> str:
    """Replace a personal name component-wise with per-patient consistency.

    Titles from the language pack ("Dr.", "Mrs.") are preserved verbatim;
    when the requested gender is unknown it is inferred from the vocabulary
    tag of the original first name, so Jane stays feminine.
    """
    stripped = original.strip()
    title = ""
    for candidate in sorted(titles, key=len, reverse=True):
        if stripped.lower().startswith(candidate.lower()):
            rest = stripped[len(candidate):]
            if not rest or rest[0].isspace():
                title = stripped[: len(candidate)]
                stripped = rest.strip()
                break
    if not stripped:
        return original
    parts = stripped.split()
    if gender == UNKNOWN:
        gender = vocab.first.gender_of(parts[0])
    out_parts = [
        _match_case(
            _pick_name_component(
                parts[0], vocab.first, ctx, "first", gender,
                len(parts[0]) if same_length else None,
            ),
            parts[0],
        )
    ]
    for part in parts[1:]:
        out_parts.append(
            _match_case(
                _pick_name_component(
                    part, vocab.last, ctx, "last", UNKNOWN,
                    len(part) if same_length else None,
                ),
                part,
            )
        )
    result = " ".join(out_parts)
    if title:
        result = f"{title} {result}"
    ctx.name_map[normalize_key(stripped)] = result if not title else " ".join(out_parts)
    return result


def fake_age(
    age: int,
    table: AgeGroupTable,
    ctx: PatientContext,
    prefer_same_digits: bool = False,
) -> int:
    """A different age from the same group; deterministic per (ctx, age).

    Open-ended top groups draw from a 20-year band extended to cover the
    input. Singleton groups return the input unchanged.
    """
    lo, hi = table.group_of(age)
    if hi is None:
        hi = max(lo + 19, age)
    candidates = [a for a in range(lo, hi + 1) if a != age]
    if not candidates:
        return age
    if prefer_same_digits:
        sized = [a for a in candidates if len(str(a)) == len(str(age))]
        if sized:
            candidates = sized
    rng = keyed_rng(ctx.seed, "age", str(age))
    return candidates[rng.randrange(len(candidates))]


def pick_surrogate(
    text: str,
    vocab: SurrogateVocabulary,
    ctx: PatientContext,
    length_mode: str = "free",
) -> str:
    """Draw a replacement from a vocabulary; never returns the input.

    same-length mode draws from the bucket of len(text), falling back to
    the Levenshtein-nearest entry padded/trimmed to the exact length.
    free mode picks among the entries closest to the original by edit
    distance, which keeps the replacement near the original's shape without
    demanding exact equality.
    """
    rng = keyed_rng(ctx.seed, "vocab", vocab.label, normalize_key(text))
    if length_mode == "same-length":
        bucket = [
            vocab.entries[i].text
            for i in vocab.length_buckets.get(len(text), [])
            if vocab.entries[i].text != text
        ]
        if bucket:
            return _draw(bucket, rng)
        ranked = sorted(
            (e.text for e in vocab.entries if e.text != text),
            key=lambda t: (levenshtein(t, text), t),
        )
        if not ranked:
            raise SurrogateError(
                f"vocabulary for {vocab.label} has no alternative to {text!r}"
            )
        return force_length(ranked[0], len(text))
    pool = [e.text for e in vocab.entries if e.text != text]
    if not pool:
        raise SurrogateError(
            f"vocabulary for {vocab.label} has no alternative to {text!r}"
        )
    best = min(levenshtein(t, text) for t in pool)
    nearest = [t for t in pool if levenshtein(t, text) == best]
    return _draw(nearest, rng)


def digit_substitute(text: str, ctx: PatientContext, tag: str) -> str:
    """Replace every digit deterministically, leaving layout intact; used
    for phones, identifiers, and zip codes where format is the semantics."""
    rng = keyed_rng(ctx.seed, "digits", tag, normalize_key(text))
    out = [str(rng.randrange(10)) if ch.isdigit() else ch for ch in text]
    result = "".join(out)
    if result == text and any(ch.isdigit() for ch in text):
        # collision with the original: bump the first digit
        for i, ch in enumerate(result):
            if ch.isdigit():
                result = result[:i] + str((int(ch) + 1) % 10) + result[i + 1:]
                break
    return result


def lookup_override(
    text: str, label: EntityLabel, user_dictionary: dict | None
) -> str | None:
    """User-supplied replacements win over generated surrogates; keys are
    either the original string or (label name, original string)."""
    if not user_dictionary:
        return None
    hit = user_dictionary.get((label.value, text))
    if hit is None:
        hit = user_dictionary.get(text)
    return hit


def pin_name_override(ctx: PatientContext, original: str, replacement: str) -> None:
    """Keep the name maps consistent after a dictionary override of a name:
    later bare occurrences of the same components reuse the override."""
    orig_parts = original.strip().split()
    repl_parts = replacement.strip().split()
    ctx.name_map[normalize_key(original.strip())] = replacement
    if orig_parts and repl_parts:
        ctx.first_map[normalize_key(orig_parts[0])] = repl_parts[0]
    if len(orig_parts) > 1 and len(repl_parts) > 1:
        ctx.last_map[normalize_key(orig_parts[-1])] = repl_parts[-1]
