"""Contextual rule engine: regex cores gated by nearby prefix/suffix terms.

Rules complement the recognizers on formulaic PHI (identifiers, ages,
dates) without retraining anything. A rule fires only when its context
terms appear within a character window of the core match, which is the
false-positive control the recognizers cannot provide.

Rule file format (UTF-8, ``#`` comment lines)::

    rule <id> label=<Label> core=/regex/ prefix=[a,b] suffix=[c,d] \
        window=<chars> ctxlen=<chars> phi=<bool>

``core`` is required; ``/`` inside the regex is written ``\\/``. Context
terms are matched case-insensitively after NFC normalization, with word
boundaries applied on alphanumeric term edges so ``age`` does not fire
inside ``page``.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

from .model import Document, EntityChunk, EntityLabel, Span, parse_label

DEFAULT_WINDOW = 20


class RuleParseError(ValueError):
    pass


def _term_pattern(term: str) -> re.Pattern:
    pat = re.escape(term)
    if term[0].isalnum():
        pat = r"(?<!\w)" + pat
    if term[-1].isalnum():
        pat = pat + r"(?!\w)"
    return re.compile(pat, re.IGNORECASE)


@dataclass(frozen=True)
class ContextualRule:
    rule_id: str
    label: EntityLabel
    core: re.Pattern
    prefix_terms: tuple[str, ...] = ()
    suffix_terms: tuple[str, ...] = ()
    context_window: int = DEFAULT_WINDOW
    context_length_limit: int | None = None
    is_phi: bool = True
    _prefix_patterns: tuple[re.Pattern, ...] = field(default=(), repr=False)
    _suffix_patterns: tuple[re.Pattern, ...] = field(default=(), repr=False)

    @classmethod
    def build(
        cls,
        rule_id: str,
        label: EntityLabel,
        core: str,
        prefix_terms=(),
        suffix_terms=(),
        context_window: int = DEFAULT_WINDOW,
        context_length_limit: int | None = None,
        is_phi: bool = True,
    ) -> "ContextualRule":
        if context_window < 0:
            raise RuleParseError(f"rule {rule_id}: window must be >= 0")
        try:
            compiled = re.compile(core)
        except re.error as exc:
            raise RuleParseError(f"rule {rule_id}: invalid regex: {exc}") from None
        prefix = tuple(unicodedata.normalize("NFC", t) for t in prefix_terms)
        suffix = tuple(unicodedata.normalize("NFC", t) for t in suffix_terms)
        return cls(
            rule_id=rule_id,
            label=label,
            core=compiled,
            prefix_terms=prefix,
            suffix_terms=suffix,
            context_window=context_window,
            context_length_limit=context_length_limit,
            is_phi=is_phi,
            _prefix_patterns=tuple(_term_pattern(t) for t in prefix),
            _suffix_patterns=tuple(_term_pattern(t) for t in suffix),
        )

    def _eligible(self, term: str) -> bool:
        return self.context_length_limit is None or len(term) <= self.context_length_limit

    def _prefix_ok(self, text: str, start: int) -> bool:
        if not self.prefix_terms:
            return True
        for term, pattern in zip(self.prefix_terms, self._prefix_patterns):
            if not self._eligible(term):
                continue
            lo = max(0, start - self.context_window - len(term))
            for m in pattern.finditer(text, lo, start):
                # distance from the term's end to the match start
                if start - m.end() <= self.context_window:
                    return True
        return False

    def _suffix_ok(self, text: str, end: int) -> bool:
        if not self.suffix_terms:
            return True
        for term, pattern in zip(self.suffix_terms, self._suffix_patterns):
            if not self._eligible(term):
                continue
            hi = min(len(text), end + self.context_window + len(term))
            for m in pattern.finditer(text, end, hi):
                if m.start() - end <= self.context_window:
                    return True
        return False


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[ContextualRule, ...]
    language: str = "en"

    def __post_init__(self):
        seen = set()
        for rule in self.rules:
            if rule.rule_id in seen:
                raise RuleParseError(f"duplicate rule id {rule.rule_id!r}")
            seen.add(rule.rule_id)


def apply_rules(doc: Document, ruleset: RuleSet) -> list[EntityChunk]:
    """Emit one chunk for every core match whose context terms are satisfied.

    The emitted set is independent of rule order; overlaps (within rules or
    against recognizers) are resolved later by the merger, never here.
    """
    text = doc.text
    chunks = {}
    for rule in ruleset.rules:
        for m in rule.core.finditer(text):
            if m.start() == m.end():
                continue
            if not rule._prefix_ok(text, m.start()):
                continue
            if not rule._suffix_ok(text, m.end()):
                continue
            key = (m.start(), m.end(), rule.rule_id)
            if key in chunks:
                continue
            chunks[key] = EntityChunk(
                span=Span(m.start(), m.end()),
                label=rule.label,
                text=m.group(0),
                source=f"rule:{rule.rule_id}",
                confidence=1.0,
                is_phi=rule.is_phi,
            )
    return [chunks[k] for k in sorted(chunks)]


# ------------------------------------------------------------------ parsing

_RULE_LINE_RE = re.compile(r"^rule\s+(\S+)\s*(.*)$")
_KEY_RE = re.compile(r"\s*(\w+)=")


def _parse_core(body: str, pos: int, where: str) -> tuple[str, int]:
    if pos >= len(body) or body[pos] != "/":
        raise RuleParseError(f"{where}: core value must be /regex/")
    out = []
    i = pos + 1
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body) and body[i + 1] == "/":
            out.append("/")
            i += 2
            continue
        if ch == "/":
            return "".join(out), i + 1
        out.append(ch)
        i += 1
    raise RuleParseError(f"{where}: unterminated /regex/")


def _parse_list(body: str, pos: int, where: str) -> tuple[tuple[str, ...], int]:
    if pos >= len(body) or body[pos] != "[":
        raise RuleParseError(f"{where}: expected [a,b,...] list")
    close = body.find("]", pos)
    if close < 0:
        raise RuleParseError(f"{where}: unterminated [...] list")
    items = tuple(t.strip() for t in body[pos + 1 : close].split(",") if t.strip())
    return items, close + 1


def _parse_rule_line(line: str, where: str) -> ContextualRule:
    m = _RULE_LINE_RE.match(line)
    if not m:
        raise RuleParseError(f"{where}: expected `rule <id> key=value ...`")
    rule_id, body = m.group(1), m.group(2)
    values: dict = {}
    pos = 0
    while pos < len(body):
        key_match = _KEY_RE.match(body, pos)
        if not key_match:
            if body[pos:].strip():
                raise RuleParseError(f"{where}: trailing junk {body[pos:].strip()!r}")
            break
        key = key_match.group(1)
        pos = key_match.end()
        if key == "core":
            values["core"], pos = _parse_core(body, pos, where)
        elif key in ("prefix", "suffix"):
            values[key], pos = _parse_list(body, pos, where)
        else:
            vm = re.match(r"(\S+)", body[pos:])
            if not vm:
                raise RuleParseError(f"{where}: missing value for {key}=")
            values[key] = vm.group(1)
            pos += vm.end()
    if "label" not in values:
        raise RuleParseError(f"{where}: missing label=")
    if "core" not in values:
        raise RuleParseError(f"{where}: missing core=")
    try:
        label = parse_label(values["label"])
    except ValueError as exc:
        raise RuleParseError(f"{where}: {exc}") from None
    try:
        window = int(values.get("window", DEFAULT_WINDOW))
        ctxlen = int(values["ctxlen"]) if "ctxlen" in values else None
    except ValueError:
        raise RuleParseError(f"{where}: window/ctxlen must be integers") from None
    return ContextualRule.build(
        rule_id=rule_id,
        label=label,
        core=values["core"],
        prefix_terms=values.get("prefix", ()),
        suffix_terms=values.get("suffix", ()),
        context_window=window,
        context_length_limit=ctxlen,
        is_phi=values.get("phi", "true").lower() != "false",
    )


def compile_ruleset(path, language: str = "en") -> RuleSet:
    """Parse and compile a rule file; every error names the file and line."""
    rules = []
    ids = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            where = f"{path}:{lineno}"
            rule = _parse_rule_line(line, where)
            if rule.rule_id in ids:
                raise RuleParseError(f"{where}: duplicate rule id {rule.rule_id!r}")
            ids.add(rule.rule_id)
            rules.append(rule)
    return RuleSet(rules=tuple(rules), language=language)
