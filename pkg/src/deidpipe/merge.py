"""Priority-based resolution of overlapping chunks from all detectors.

Every (source-class, label) pair maps to an integer priority; on overlap the
higher-priority chunk survives whole (no trimming), with ties broken by
longer span, then higher confidence, then earlier start, then source id.
Non-PHI winners (disease terms beating a name false positive) are excluded
from the PHI output but kept as suppressors so the override is auditable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .model import EntityChunk, parse_label

BRUTEFORCE_LIMIT = 20


class PolicyError(ValueError):
    pass


# Built-in defaults: rules beat gazetteers on overlap (formulaic PHI is the
# rules' home turf), and the disease gazetteer beats everything so clinical
# terms survive de-identification.
DEFAULT_PRIORITIES = {
    ("rule", "*"): 10,
    ("gazetteer", "*"): 5,
    ("gazetteer", "Disease"): 20,
}


@dataclass(frozen=True)
class MergePolicy:
    """Tie-break order is fixed: longer-span, higher-confidence,
    earlier-start, lexicographic source id."""

    priorities: dict = field(default_factory=lambda: dict(DEFAULT_PRIORITIES))
    default_priority: int = 0

    def priority_of(self, chunk: EntityChunk) -> int:
        cls = chunk.source_class
        for key in ((cls, chunk.label.value), (cls, "*")):
            if key in self.priorities:
                return self.priorities[key]
        return self.default_priority

    def sort_key(self, chunk: EntityChunk):
        # spec'd criteria first; the tail fields make the order total over
        # distinct chunks so merge output never depends on input order
        return (
            -self.priority_of(chunk),
            -len(chunk.span),
            -chunk.confidence,
            chunk.span.start,
            chunk.source,
            chunk.label.value,
            not chunk.is_phi,
        )


def load_policy(path) -> MergePolicy:
    """``priority <source-class> <label|*> <int>`` lines plus ``default <int>``."""
    priorities = {}
    default = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            where = f"{path}:{lineno}"
            if parts[0] == "default" and len(parts) == 2:
                default = _parse_int(parts[1], where)
            elif parts[0] == "priority" and len(parts) == 4:
                label = parts[2]
                if label != "*":
                    try:
                        label = parse_label(label).value
                    except ValueError as exc:
                        raise PolicyError(f"{where}: {exc}") from None
                priorities[(parts[1], label)] = _parse_int(parts[3], where)
            else:
                raise PolicyError(f"{where}: unrecognized line {line!r}")
    if default is None:
        raise PolicyError(f"{path}: missing `default <int>` line")
    return MergePolicy(priorities=priorities, default_priority=default)


def _parse_int(token: str, where: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise PolicyError(f"{where}: expected integer, got {token!r}") from None


@dataclass(frozen=True)
class MergedChunks:
    chunks: tuple[EntityChunk, ...]       # PHI survivors, sorted by start
    suppressors: tuple[EntityChunk, ...]  # non-PHI survivors, sorted by start

    def all_survivors(self) -> list[EntityChunk]:
        return sorted(
            [*self.chunks, *self.suppressors], key=lambda c: (c.span.start, c.span.end)
        )


def _split(survivors: Iterable[EntityChunk]) -> MergedChunks:
    by_start = sorted(survivors, key=lambda c: (c.span.start, c.span.end))
    return MergedChunks(
        chunks=tuple(c for c in by_start if c.is_phi),
        suppressors=tuple(c for c in by_start if not c.is_phi),
    )


def merge(chunks: Iterable[EntityChunk], policy: MergePolicy | None = None) -> MergedChunks:
    """Keep the strongest chunk of every overlapping group.

    Chunks are visited strongest-first; one survives iff it overlaps no
    already-surviving chunk. The result is the unique fixpoint of the
    priority order: input permutation cannot change it, and re-merging the
    output is the identity.
    """
    policy = policy or MergePolicy()
    ordered = sorted(dict.fromkeys(chunks), key=policy.sort_key)
    kept: list[EntityChunk] = []
    for chunk in ordered:
        if not any(chunk.span.overlaps(k.span) for k in kept):
            kept.append(chunk)
    return _split(kept)


def resolve_overlap_bruteforce(
    chunks: Iterable[EntityChunk], policy: MergePolicy | None = None
) -> MergedChunks:
    """Exhaustive test oracle: enumerate every pairwise-non-overlapping
    subset and keep the maximal one under the priority-then-tiebreak
    lexicographic order. Exponential; guarded to small instances."""
    policy = policy or MergePolicy()
    items = sorted(dict.fromkeys(chunks), key=policy.sort_key)
    n = len(items)
    if n > BRUTEFORCE_LIMIT:
        raise ValueError(f"brute-force resolver limited to {BRUTEFORCE_LIMIT} chunks")
    conflicts = [0] * n
    for i in range(n):
        for j in range(n):
            if i != j and items[i].span.overlaps(items[j].span):
                conflicts[i] |= 1 << j
    best_key = None
    best_mask = 0
    for mask in range(1 << n):
        valid = True
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            if conflicts[i] & mask:
                valid = False
                break
            m &= m - 1
        if not valid:
            continue
        # indices ascending = strongest-first; sentinel makes longer
        # extensions of a common prefix win
        key = tuple(i for i in range(n) if mask >> i & 1) + (n,)
        if best_key is None or key < best_key:
            best_key = key
            best_mask = mask
    return _split(items[i] for i in range(n) if best_mask >> i & 1)
